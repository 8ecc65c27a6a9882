#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chlab/density.hpp"
#include "chlab/errors.hpp"
#include "chlab/experiments.hpp"

#include <cmath>
#include <vector>

using namespace chlab;

TEST_CASE("kernel density estimate") {
  const std::vector<double> two{-1.0, 1.0};
  CHECK(kde_value(two, 0.5, 0.0) == doctest::Approx(0.107981933026376).epsilon(1e-12));
  const DensityReport r = kde(two, 0.5);
  CHECK(r.grid.size() == kKdeGridPoints);
  CHECK(r.grid.front() == doctest::Approx(-3.0));
  CHECK(r.grid.back() == doctest::Approx(3.0));
  CHECK(std::abs(r.diagnostics.kde_integral - 1.0) < 1e-3);
  for (std::size_t g = 0; g < r.grid.size(); ++g)
    CHECK(r.density[g] == doctest::Approx(r.density[r.grid.size() - 1 - g]).epsilon(1e-12));
  CHECK_THROWS_AS(kde(two, 0.0), DomainError);
  CHECK_THROWS_AS(kde(std::vector<double>{1.0}), ContractError);
}

TEST_CASE("Silverman bandwidth") {
  std::vector<double> s;
  for (int i = 0; i < 32; ++i) s.push_back(i);
  double mean = 15.5, var = 0.0;
  for (double v : s) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / 31.0);
  CHECK(silverman_bandwidth(s) == doctest::Approx(1.06 * sd * std::pow(32.0, -0.2)));
  CHECK_THROWS_AS(silverman_bandwidth(std::vector<double>(10, 0.3)), DegenerateLawError);
  CHECK_THROWS_AS(kde(std::vector<double>(10, 0.3)), DegenerateLawError);
}

TEST_CASE("multiplicity and KS distance") {
  CHECK(max_multiplicity(std::vector<double>{1.0, 2.0, 1.0, 3.0, 1.0}) == 3);
  CHECK(max_multiplicity(std::vector<double>{1.0, 2.0}) == 1);
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795));
  // Samples at normal quantiles (i + 1/2)/n sit exactly half a step from the CDF.
  const int n = 50;
  std::vector<double> q;
  for (int i = 0; i < n; ++i) {
    const double p = (i + 0.5) / n;
    double lo = -10, hi = 10;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    q.push_back(2.0 + 3.0 * 0.5 * (lo + hi));
  }
  CHECK(ks_distance_normal(q, 2.0, 3.0) == doctest::Approx(0.5 / n).epsilon(1e-9));
}

TEST_CASE("Gaussian oracle contracts") {
  const SpectralBasis b(16, 1.0, 1.0);
  const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(16);
  const std::vector<double> s{0.1, -0.2, 0.05};
  ModelParams p;
  CHECK_THROWS_AS(gaussian_oracle_check(s, kPi / 2, 0.25, u0, p, b), ContractError);
  p.f_enabled = false;
  CHECK_THROWS_AS(gaussian_oracle_check(s, kPi / 2, 0.25, u0, p, b), ContractError);
  p.sigma = SigmaSpec::zero();
  CHECK_THROWS_AS(gaussian_oracle_check(s, kPi / 2, 0.25, u0, p, b), DegenerateLawError);
}

TEST_CASE("linear equation has the Gaussian law") {
  ExperimentConfig cfg = default_config();
  cfg.model.f_enabled = false;
  cfg.model.sigma = SigmaSpec::constant(0.5);
  cfg.initial = InitialKind::zero;
  for (int m : {500, 1000}) {
    const SampleSet set = sample_ensemble(cfg, m, 1);
    CHECK(set.excluded == 0);
    const OracleCheck check =
        gaussian_oracle_check(set.samples, cfg.x_star, cfg.horizon, cfg.initial_field(), cfg.model, cfg.basis());
    CHECK(check.critical == doctest::Approx(1.63 / std::sqrt(m)));
    CHECK(check.pass);
  }
}

TEST_CASE("deterministic equation has an atomic law") {
  ExperimentConfig cfg = default_config();
  cfg.model.sigma = SigmaSpec::zero();
  const SampleSet set = sample_ensemble(cfg, 20, 1);
  CHECK(max_multiplicity(set.samples) == 20);
  CHECK_THROWS_AS(kde(set.samples), DegenerateLawError);
}

TEST_CASE("nonlinear ensemble has a spread-out law") {
  const ExperimentConfig cfg = default_config();
  const SampleSet set = sample_ensemble(cfg, 200, 1);
  CHECK(set.samples.size() == 200);
  const DensityReport r = kde(set.samples);
  CHECK(r.diagnostics.max_multiplicity == 1);
  CHECK(std::abs(r.diagnostics.kde_integral - 1.0) < 1e-2);
  for (double d : r.density) CHECK(std::isfinite(d));
}
