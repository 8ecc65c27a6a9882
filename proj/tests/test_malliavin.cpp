#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chlab/errors.hpp"
#include "chlab/malliavin.hpp"

#include <cmath>
#include <vector>

using namespace chlab;

namespace {

Eigen::VectorXd cosine_field(const GridSpec& g) {
  Eigen::VectorXd v(g.nx());
  for (int j = 0; j < g.nx(); ++j) v[j] = std::cos(g.node(j));
  return v;
}

ModelParams linear_constant(double c0) {
  ModelParams p;
  p.f_enabled = false;
  p.sigma = SigmaSpec::constant(c0);
  return p;
}

struct Fixture {
  GridSpec grid;
  ModelParams params;
  SpectralBasis basis;
  NoiseRealization noise;
  FieldPath path;

  Fixture(int nx, int nt, ModelParams p, std::uint64_t rep = 0)
      : grid(nx, nt, 0.25),
        params(p),
        basis(nx, p.rho, p.qtilde),
        noise(NoiseRealization::generate(grid, 31, rep)),
        path(solve_path(cosine_field(grid), noise, params, basis)) {}
};

}  // namespace

TEST_CASE("source seeding") {
  const Fixture fx(16, 32, linear_constant(0.5));
  const Eigen::VectorXd s = seed_source(fx.path, 3, 4, 10);
  CHECK(s[3] == 0.5 / fx.grid.dx());
  CHECK(s.sum() * fx.grid.dx() == doctest::Approx(0.5));
  CHECK(s.cwiseAbs().sum() == std::abs(s[3]));
  CHECK_THROWS_AS(seed_source(fx.path, 3, 10, 10), ContractError);
  CHECK_THROWS_AS(seed_source(fx.path, 16, 4, 10), ContractError);
}

TEST_CASE("linear equation: the derivative is the Green's function") {
  const double c0 = 0.5;
  const Fixture fx(32, 64, linear_constant(c0));
  const int obs = 64;
  std::vector<SourceIndex> sources;
  for (int lag : {1, 2, 5, 17, 64})
    for (int i : {0, 7, 16, 31}) sources.push_back({i, obs - lag});
  const Eigen::MatrixXd d = propagate_sources(fx.path, fx.noise, fx.basis, obs, sources);
  double err = 0.0;
  for (std::size_t c = 0; c < sources.size(); ++c) {
    const double tau = (obs - sources[c].m) * fx.grid.dt();
    for (int j = 0; j < 32; ++j) {
      const double ref = green_eval(fx.grid.node(j), fx.grid.node(sources[c].i), tau, fx.basis) * c0;
      err = std::max(err, std::abs(d(j, static_cast<Eigen::Index>(c)) - ref));
    }
  }
  CHECK(err <= 1e-8);
}

TEST_CASE("sources at or after the observation give zero") {
  const Fixture fx(16, 32, ModelParams{});
  const std::vector<SourceIndex> sources{{2, 20}, {2, 21}, {5, 25}};
  const Eigen::MatrixXd d = propagate_sources(fx.path, fx.noise, fx.basis, 20, sources);
  CHECK(d.col(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.col(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.col(2).cwiseAbs().maxCoeff() == 0.0);
  const MalliavinTensor t = propagate(fx.path, fx.noise, fx.basis, 20, 15);
  CHECK(t.value(3, 20, 4) == 0.0);
  CHECK(t.value(3, 31, 4) == 0.0);
  CHECK(t.value(3, 19, 4) != 0.0);
  CHECK_THROWS_AS(t.value(3, 14, 4), ContractError);
}

TEST_CASE("forward and adjoint sweeps agree") {
  const Fixture fx(16, 32, ModelParams{});
  for (int obs : {32, 13}) {
    const MalliavinTensor fwd = propagate(fx.path, fx.noise, fx.basis, obs);
    const MalliavinTensor adj = propagate_adjoint(fx.path, fx.noise, fx.basis, obs);
    const double scale = fwd.values().cwiseAbs().maxCoeff();
    CHECK((fwd.values() - adj.values()).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    const MalliavinTensor tail = propagate(fx.path, fx.noise, fx.basis, obs, obs - 4);
    CHECK((tail.values() - fwd.values().rightCols(4 * 16)).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}

TEST_CASE("tangent matches a finite difference of the solver") {
  const Fixture fx(16, 32, ModelParams{});
  const int obs = 32;
  const MalliavinTensor t = propagate_adjoint(fx.path, fx.noise, fx.basis, obs);
  const double delta = 1e-6;
  for (auto [i, m] : {std::pair{5, 27}, std::pair{10, 16}, std::pair{0, 3}}) {
    const auto up = solve_path(cosine_field(fx.grid), fx.noise.perturbed(m, i, delta), fx.params, fx.basis);
    const auto down = solve_path(cosine_field(fx.grid), fx.noise.perturbed(m, i, -delta), fx.params, fx.basis);
    const Eigen::VectorXd fd = (up.at(obs) - down.at(obs)) / (2.0 * delta);
    Eigen::VectorXd an(16);
    for (int j = 0; j < 16; ++j) an[j] = t.value(i, m, j);
    CHECK((fd - an).cwiseAbs().maxCoeff() <= 1e-5 * an.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("H-norm quadrature") {
  const double c0 = 0.5;
  const Fixture fx(32, 64, linear_constant(c0));
  const MalliavinTensor t = propagate_adjoint(fx.path, fx.noise, fx.basis, 64);
  const int j = 16;

  SUBCASE("additive over windows") {
    const double full = hnorm_sq(t, j);
    CHECK(hnorm_sq(t, j, 0, 40) + hnorm_sq(t, j, 40, 64) == doctest::Approx(full).epsilon(1e-12));
    CHECK(hnorm_sq(t, j, 10, 10) == 0.0);
  }
  SUBCASE("linear value is the discrete kernel sum") {
    double ref = 0.0;
    for (int m = 0; m < 64; ++m)
      for (int i = 0; i < 32; ++i)
        ref += std::pow(green_eval(fx.grid.node(j), fx.grid.node(i), (64 - m) * fx.grid.dt(), fx.basis) * c0, 2);
    ref *= fx.grid.dx() * fx.grid.dt();
    CHECK(hnorm_sq(t, j) == doctest::Approx(ref).epsilon(1e-10));
    CHECK(hnorm_sq(t, j) == doctest::Approx(c0 * c0 * kernel_energy(fx.grid.node(j), 0.25, fx.basis)).epsilon(0.25));
  }
  SUBCASE("zero tensor") {
    const MalliavinTensor zero(fx.grid, 64, 0, Eigen::MatrixXd::Zero(32, 64 * 32));
    CHECK(hnorm_sq(zero, 3) == 0.0);
  }
  SUBCASE("point profile at a node reproduces the tensor row") {
    const PointProfile p = point_profile(fx.path, fx.noise, fx.basis, 64, fx.grid.node(j), 8);
    CHECK(p.hnorm_sq == doctest::Approx(hnorm_sq(t, j)).epsilon(1e-10));
    for (double r : p.remainder) CHECK(r <= 1e-20);
  }
}

TEST_CASE("window and remainder scans") {
  const double c0 = 0.5;
  const int max_lag = 16;
  const Fixture lin(32, 128, linear_constant(c0));
  const GreenTable green(lin.grid, lin.basis, max_lag);
  const int obs = 128;
  std::vector<SlabProfile> profiles;
  for (int r = 0; r < 3; ++r) {
    const Fixture fx(32, 128, linear_constant(c0), static_cast<std::uint64_t>(r));
    profiles.push_back(slab_profile(propagate(fx.path, fx.noise, fx.basis, obs, obs - max_lag), fx.path, green));
  }
  const double t_obs = 0.25;
  const double dt = lin.grid.dt();

  SUBCASE("constant sigma matches the direct Green sum, remainder vanishes") {
    for (int slabs : {1, 3, 16}) {
      double ref = 0.0;
      for (int lag = 1; lag <= slabs; ++lag)
        for (int i = 0; i < 32; ++i) ref += green.at_lag(lag).col(i).cwiseAbs2().maxCoeff() * c0 * c0;
      ref *= lin.grid.dx() * dt;
      const auto w = window_estimate(profiles, t_obs, slabs * dt);
      CHECK(w.mean == doctest::Approx(ref).epsilon(1e-10));
      CHECK(w.std_error <= 1e-10 * w.mean);
      CHECK(remainder_estimate(profiles, t_obs, slabs * dt).mean <= 1e-20);
    }
  }
  SUBCASE("monotone in the window length") {
    double prev = 0.0;
    for (int slabs = 1; slabs <= max_lag; ++slabs) {
      const double v = window_estimate(profiles, t_obs, slabs * dt).mean;
      CHECK(v > prev);
      prev = v;
    }
  }
  SUBCASE("domain") {
    CHECK_THROWS_AS(window_estimate(profiles, t_obs, 0.0), DomainError);
    CHECK_THROWS_AS(window_estimate(profiles, t_obs, t_obs), DomainError);
    CHECK_THROWS_AS(remainder_estimate(profiles, t_obs, -1.0), DomainError);
    CHECK_THROWS_AS(window_estimate(profiles, t_obs, 20 * dt), ContractError);
  }
  CHECK(window_slabs(3 * dt, dt) == 3);
  CHECK(window_slabs(3.5 * dt, dt) == 3);
}

TEST_CASE("nonlinear remainder is small but present") {
  const int max_lag = 8;
  const Fixture fx(32, 128, ModelParams{});
  const GreenTable green(fx.grid, fx.basis, max_lag);
  const SlabProfile p = slab_profile(propagate(fx.path, fx.noise, fx.basis, 128, 128 - max_lag), fx.path, green);
  for (int l = 0; l < max_lag; ++l) {
    CHECK(p.window[l] > 0.0);
    CHECK(p.remainder[l] < p.window[l]);
  }
  CHECK(p.remainder[max_lag - 1] > 0.0);
}

TEST_CASE("positivity probability") {
  const std::vector<double> h{0.1, 0.2, 0.3, 0.4};
  CHECK(positivity_probability(h, 0.0) == 1.0);
  CHECK(positivity_probability(h, 0.25) == 0.5);
  CHECK(positivity_probability(h, 1.0) == 0.0);
  CHECK_THROWS_AS(positivity_probability(h, -1.0), DomainError);

  // Constant sigma, linear: the H-norm does not depend on the noise at all.
  std::vector<double> norms;
  for (std::uint64_t r = 0; r < 4; ++r) {
    const Fixture fx(16, 32, linear_constant(0.5), r);
    norms.push_back(point_profile(fx.path, fx.noise, fx.basis, 32, kPi / 2, 4).hnorm_sq);
  }
  for (double v : norms) CHECK(v == doctest::Approx(norms[0]).epsilon(1e-12));
  CHECK(positivity_probability(norms, norms[0] / 2) == 1.0);
}

TEST_CASE("log-log slope") {
  std::vector<double> eps, vals;
  for (int e = 3; e <= 9; ++e) {
    eps.push_back(std::ldexp(1.0, -e));
    vals.push_back(2.0 * std::pow(eps.back(), 0.75));
  }
  CHECK(loglog_slope(eps, vals) == doctest::Approx(0.75).epsilon(1e-12));
  vals[0] = 0.0;
  CHECK_THROWS_AS(loglog_slope(eps, vals), DomainError);
}
