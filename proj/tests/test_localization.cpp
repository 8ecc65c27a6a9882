#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chlab/errors.hpp"
#include "chlab/localization.hpp"

#include <cmath>
#include <sstream>
#include <vector>

using namespace chlab;

namespace {

Eigen::VectorXd cosine_field(const GridSpec& g, double a = 1.0) {
  Eigen::VectorXd v(g.nx());
  for (int j = 0; j < g.nx(); ++j) v[j] = a * std::cos(g.node(j));
  return v;
}

}  // namespace

TEST_CASE("classification of deterministic paths") {
  const GridSpec g(64, 64, 0.25);
  ModelParams p;
  p.sigma = SigmaSpec::zero();
  const SpectralBasis b(64, p.rho, p.qtilde);
  const std::vector<double> levels{0.5, 1.0, 1.5, 2.0};

  const FieldPath decay = solve_path(cosine_field(g), NoiseRealization::silent(g), p, b);
  const LocalizationRecord r = classify(decay, levels);
  // The largest nodal value of cos x is cos(dx/2), one midpoint away from 1.
  CHECK(r.sup_norm == doctest::Approx(1.0).epsilon(g.dx() * g.dx() / 8));
  CHECK(r.member == std::vector<bool>{false, true, true, true});

  const FieldPath zero = solve_path(Eigen::VectorXd::Zero(64), NoiseRealization::silent(g), p, b);
  const LocalizationRecord z = classify(zero, levels);
  CHECK(z.sup_norm == 0.0);
  CHECK(z.member == std::vector<bool>{true, true, true, true});
}

TEST_CASE("coverage is monotone in the level") {
  const GridSpec g(32, 64, 0.25);
  const ModelParams p;
  const SpectralBasis b(32, p.rho, p.qtilde);
  const std::vector<double> levels{0.5, 1.0, 1.2, 1.5, 2.0, 100.0};
  std::vector<LocalizationRecord> recs;
  for (int r = 0; r < 40; ++r) {
    recs.push_back(classify(solve_path(cosine_field(g), NoiseRealization::generate(g, 17, r), p, b), levels));
    for (std::size_t k = 1; k < levels.size(); ++k)
      if (recs.back().member[k - 1]) CHECK(recs.back().member[k]);
  }
  const auto cov = coverage_estimate(recs, levels);
  for (std::size_t k = 1; k < cov.size(); ++k) CHECK(cov[k] >= cov[k - 1]);
  CHECK(cov.back() == 1.0);
  const auto low = coverage_estimate(recs, std::vector<double>{1e-3});
  CHECK(low[0] == 0.0);

  std::ostringstream os;
  write_localization_csv(os, recs);
  CHECK(os.str().rfind("replicate,sup_norm,in_n=0.5,", 0) == 0);
}

TEST_CASE("solutions agree wherever the cutoff is inactive") {
  const GridSpec g(32, 128, 0.25);
  ModelParams p;
  p.sigma = SigmaSpec::power(0.05, 0.0, 0.3);
  const SpectralBasis b(32, p.rho, p.qtilde);
  for (int r = 0; r < 20; ++r) {
    const auto res = consistency_check(cosine_field(g), NoiseRealization::generate(g, 23, r), p, b, 5.0, 10.0);
    CHECK_FALSE(res.vacuous);
    CHECK(res.identical);
    CHECK(res.max_deviation == 0.0);
    CHECK(res.pass());
  }
  SUBCASE("vacuous when the path leaves the smaller ball") {
    const auto res = consistency_check(cosine_field(g, 3.0), NoiseRealization::generate(g, 23, 0), p, b, 1.0, 2.0);
    CHECK(res.vacuous);
    CHECK(res.pass());
  }
  CHECK_THROWS_AS(consistency_check(cosine_field(g), NoiseRealization::silent(g), p, b, 5.0, 5.0), ContractError);
}
