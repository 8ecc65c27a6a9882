#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chlab/errors.hpp"
#include "chlab/experiments.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

using namespace chlab;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg = default_config();
  cfg.nx = 16;
  cfg.nt = 64;
  cfg.modes = 0;
  cfg.replicates = 6;
  cfg.eps = {cfg.horizon / 32, cfg.horizon / 16, cfg.horizon / 8};
  return cfg;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string first_line(const fs::path& file) {
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  return line;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("parallel replicates keep replicate order") {
  const auto square = [](int r) { return r * r; };
  const auto one = parallel_replicates(50, 1, square);
  const auto four = parallel_replicates(50, 4, square);
  CHECK(one == four);
  CHECK(four[7] == 49);
  CHECK_THROWS_WITH(parallel_replicates(20, 3,
                                        [](int r) -> int {
                                          if (r == 5 || r == 11) throw std::runtime_error("bad " + std::to_string(r));
                                          return r;
                                        }),
                    "bad 5");
}

TEST_CASE("replicates are thread-count independent") {
  const ExperimentConfig cfg = small_config();
  const auto a = parallel_replicates(4, 1, [&](int r) { return run_replicate(cfg, r).path.u; });
  const auto b = parallel_replicates(4, 3, [&](int r) { return run_replicate(cfg, r).path.u; });
  CHECK(a == b);
  CHECK(a[0] != a[1]);
  const auto s1 = sample_ensemble(cfg, 8, 1);
  const auto s3 = sample_ensemble(cfg, 8, 3);
  CHECK(s1.samples == s3.samples);
}

TEST_CASE("subcommands write preambled artifacts") {
  const ExperimentConfig cfg = small_config();
  const std::string preamble = "# config_digest=" + cfg.digest() + " master_seed=" + std::to_string(cfg.master_seed);

  SUBCASE("simulate") {
    const fs::path dir = fresh_dir("chlab_exp_sim");
    CHECK(run_simulate(cfg, {dir.string(), 2, nullptr}) == 0);
    for (const char* f : {"path_r0.csv", "path_r5.csv", "sup_norms.csv", "sup_moment.txt"}) {
      REQUIRE(fs::exists(dir / f));
      CHECK(first_line(dir / f) == preamble);
    }
    const fs::path again = fresh_dir("chlab_exp_sim2");
    CHECK(run_simulate(cfg, {again.string(), 1, nullptr}) == 0);
    CHECK(slurp(dir / "path_r3.csv") == slurp(again / "path_r3.csv"));
    CHECK(slurp(dir / "sup_moment.txt") == slurp(again / "sup_moment.txt"));
  }
  SUBCASE("picard") {
    const fs::path dir = fresh_dir("chlab_exp_picard");
    CHECK(run_picard(cfg, {dir.string(), 1, nullptr}) == 0);
    CHECK(first_line(dir / "picard_diffs.csv") == preamble);
    CHECK(fs::exists(dir / "picard_gap.csv"));
  }
  SUBCASE("malliavin") {
    const fs::path dir = fresh_dir("chlab_exp_mall");
    CHECK(run_malliavin(cfg, {dir.string(), 1, nullptr}) == 0);
    std::size_t count = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
      CHECK(first_line(e.path()) == preamble);
      ++count;
    }
    CHECK(count >= 6);
  }
  SUBCASE("density") {
    const fs::path dir = fresh_dir("chlab_exp_dens");
    CHECK(run_density(cfg, {dir.string(), 1, nullptr}) == 0);
    for (const char* f : {"samples.csv", "kde.csv", "diagnostics.txt"}) CHECK(first_line(dir / f) == preamble);
  }
  SUBCASE("localize") {
    const fs::path dir = fresh_dir("chlab_exp_loc");
    CHECK(run_localize(cfg, {dir.string(), 1, nullptr}) == 0);
    for (const char* f : {"localization.csv", "coverage.csv", "consistency.txt"}) CHECK(first_line(dir / f) == preamble);
  }
}
