#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chlab/errors.hpp"
#include "chlab/model.hpp"

#include <cmath>

using namespace chlab;

TEST_CASE("double-well derivative") {
  CHECK(f_eval(0.0) == 0.0);
  CHECK(f_eval(1.0) == 0.0);
  CHECK(f_eval(2.0) == 6.0);
}

TEST_CASE("cutoff") {
  CHECK(cutoff_eval(5, 0) == 1.0);
  CHECK(cutoff_eval(5, 6) == 0.0);
  CHECK(cutoff_eval(5, 5.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(cutoff_eval(5, -0.1), DomainError);
  for (int i = 0; i <= 1000; ++i) {
    const double r = 4.0 + 3.0 * i / 1000.0;
    CHECK(cutoff_eval(5, r) >= 0.0);
    CHECK(cutoff_eval(5, r) <= 1.0);
    CHECK(std::abs(cutoff_prime(5, r)) <= 1.5);
  }
  CHECK(cutoff_prime(5, 5.5) == doctest::Approx(-1.5));
}

TEST_CASE("localized nonlinearity") {
  const double n = 5.0;
  for (int i = -499; i < 500; ++i) {
    const double x = i * 0.01;
    CHECK(f_n_eval(n, x) == f_eval(x));
  }
  for (double x : {6.0, -6.0, 7.3, -100.0, 1e6}) CHECK(f_n_eval(n, x) == 0.0);
  CHECK(f_n_prime(n, 0.0) == -1.0);
  CHECK(f_n_eval(n, -5.4) == -f_n_eval(n, 5.4));

  SUBCASE("derivative matches central differences") {
    const double h = 1e-6;
    const double junctions[] = {-6.0, -5.0, 5.0, 6.0};
    for (int i = 0; i <= 2800; ++i) {
      const double x = -7.0 + i * 0.005;
      bool near_junction = false;
      for (double j : junctions) near_junction = near_junction || std::abs(x - j) < 2.0 * h;
      if (near_junction) continue;
      const double fd = (f_n_eval(n, x + h) - f_n_eval(n, x - h)) / (2.0 * h);
      CHECK(std::abs(fd - f_n_prime(n, x)) < 1e-6);
    }
  }
  SUBCASE("C1 across the junctions") {
    // f_n' is continuous at |x| = n, n+1; f_n'' jumps there, so a straddling central
    // difference is off by at most h |jump f_n''| / 4.
    for (double j : {-6.0, -5.0, 5.0, 6.0}) {
      const double d = 1e-9;
      CHECK(std::abs(f_n_prime(n, j + d) - f_n_prime(n, j - d)) < 1e-5);
      const double h = 1e-6;
      const double jump = 6.0 * std::abs(f_eval(j));
      const double fd = (f_n_eval(n, j + h) - f_n_eval(n, j - h)) / (2.0 * h);
      CHECK(std::abs(fd - f_n_prime(n, j)) <= h * jump / 4.0 + 1e-6);
    }
  }
  SUBCASE("bounded derivative") {
    ModelParams p;
    const double lip = p.drift_lipschitz();
    for (int i = 0; i <= 10000; ++i) CHECK(std::abs(f_n_prime(n, -8.0 + 16.0 * i / 10000)) <= lip + 1e-9);
    p.f_enabled = false;
    CHECK(p.drift_lipschitz() == 0.0);
    CHECK(p.drift(3.0) == 0.0);
  }
}

TEST_CASE("sigma families") {
  const SigmaSpec c = SigmaSpec::constant(0.7);
  CHECK(c.eval(-12.0) == 0.7);
  CHECK(c.prime(3.0) == 0.0);

  const SigmaSpec p = SigmaSpec::power(0.5, 0.5, 0.3);
  CHECK(p.eval(0.0) == 1.0);
  CHECK(p.prime(0.0) == 0.0);

  SUBCASE("assumption invariants over [-1e6, 1e6]") {
    for (int i = -2000; i <= 2000; ++i) {
      const double x = std::copysign(std::pow(10.0, 6.0 * std::abs(i) / 2000.0), i) - (i == 0 ? 1.0 : 0.0);
      const double s = p.eval(x);
      CHECK(s >= p.c0());
      CHECK(s <= (p.c0() + p.beta()) * (1.0 + std::pow(std::abs(x), p.q())));
      CHECK(std::abs(p.prime(x)) <= p.beta() * p.q());
    }
  }
  SUBCASE("derivative matches finite differences") {
    const double h = 1e-6;
    for (int i = 0; i <= 400; ++i) {
      const double x = -20.0 + 0.1 * i;
      CHECK(std::abs((p.eval(x + h) - p.eval(x - h)) / (2 * h) - p.prime(x)) < 1e-6);
    }
  }
  SUBCASE("invalid specs fail at construction") {
    CHECK_THROWS_AS(SigmaSpec::power(0.5, 0.5, 0.5), ConfigError);
    CHECK_THROWS_AS(SigmaSpec::power(0.5, 0.5, 0.0), ConfigError);
    CHECK_THROWS_AS(SigmaSpec::power(0.0, 0.5, 0.2), ConfigError);
    CHECK_THROWS_AS(SigmaSpec::power(0.5, -0.1, 0.2), ConfigError);
    CHECK_THROWS_AS(SigmaSpec::constant(-1.0), ConfigError);
    try {
      (void)SigmaSpec::power(0.5, 0.5, 0.5);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("q ∈ (0,1/3)") != std::string::npos);
    }
  }
  CHECK(SigmaSpec::zero().degenerate());
  CHECK(SigmaSpec::zero().eval(4.0) == 0.0);
  CHECK(parse_sigma_form("power") == SigmaForm::power);
  CHECK_THROWS_AS(parse_sigma_form("cubic"), ConfigError);
}

TEST_CASE("model parameter validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  p.rho = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.rho = 1.0;
  p.qtilde = -0.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.qtilde = 0.0;
  p.cutoff.level = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
