// Command-line driver: chlab <simulate|picard|malliavin|density|localize|verify> [flags]

#include "chlab/acceptance.hpp"
#include "chlab/config.hpp"
#include "chlab/errors.hpp"
#include "chlab/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

enum ExitCode : int { kOk = 0, kValidation = 1, kBlowUp = 2, kAcceptance = 3 };

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::string out_dir = ".";
  int threads = 1;
};

chlab::ExperimentConfig resolve(const Flags& flags) {
  chlab::ExperimentConfig cfg = flags.config_path.empty() ? chlab::default_config() : chlab::load_config(flags.config_path);
  if (flags.seed) cfg.master_seed = *flags.seed;
  if (flags.replicates) cfg.replicates = *flags.replicates;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for the stochastic Cahn-Hilliard/Allen-Cahn equation with multiplicative noise"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config_path, "Sectioned key-value configuration file");
  app.add_option("--seed", flags.seed, "Master seed (overrides [seeds] master)");
  app.add_option("--replicates", flags.replicates, "Replicate count M (overrides [seeds] replicates)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out-dir", flags.out_dir, "Directory for CSV artifacts");
  app.add_option("--threads", flags.threads, "Worker threads for replicates (0 = hardware)")->check(CLI::NonNegativeNumber);
  app.fallthrough();

  auto* simulate = app.add_subcommand("simulate", "Solve paths and report sup_t E||u||^p");
  auto* picard = app.add_subcommand("picard", "Picard iteration traces");
  auto* malliavin = app.add_subcommand("malliavin", "Tangent SPDE, H-norms, window and remainder scans");
  auto* density = app.add_subcommand("density", "Samples of u(x*, t*), KDE and Gaussian oracle");
  auto* localize = app.add_subcommand("localize", "Localization records, coverage and cutoff consistency");
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    const chlab::ExperimentConfig cfg = resolve(flags);
    const chlab::RunOptions opts{flags.out_dir, flags.threads, &std::cout};
    if (*simulate) return chlab::run_simulate(cfg, opts);
    if (*picard) return chlab::run_picard(cfg, opts);
    if (*malliavin) return chlab::run_malliavin(cfg, opts);
    if (*density) return chlab::run_density(cfg, opts);
    if (*localize) return chlab::run_localize(cfg, opts);
    if (*verify) {
      const auto results = chlab::run_acceptance({cfg.master_seed, flags.threads}, std::cout);
      int failed = 0;
      for (const auto& r : results) failed += r.passed ? 0 : 1;
      std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed" << std::endl;
      return failed == 0 ? kOk : kAcceptance;
    }
  } catch (const chlab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kValidation;
  } catch (const chlab::BlowUpError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kBlowUp;
  } catch (const chlab::NonConvergenceError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kBlowUp;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}
