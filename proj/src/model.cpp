#include "chlab/model.hpp"

#include "chlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace chlab {

double f_eval(double x) { return x * x * x - x; }

double f_prime(double x) { return 3.0 * x * x - 1.0; }

double cutoff_eval(double n, double r) {
  if (!(r >= 0.0)) throw DomainError("cutoff argument must be non-negative");
  if (r < n) return 1.0;
  if (r >= n + 1.0) return 0.0;
  const double s = r - n;
  return 1.0 - 3.0 * s * s + 2.0 * s * s * s;
}

double cutoff_prime(double n, double r) {
  if (!(r >= 0.0)) throw DomainError("cutoff argument must be non-negative");
  if (r < n || r >= n + 1.0) return 0.0;
  const double s = r - n;
  return -6.0 * s * (1.0 - s);
}

double f_n_eval(double n, double x) {
  const double r = std::abs(x);
  if (r < n) return f_eval(x);
  return cutoff_eval(n, r) * f_eval(x);
}

double f_n_prime(double n, double x) {
  const double r = std::abs(x);
  if (r < n) return f_prime(x);
  const double sign = x < 0.0 ? -1.0 : 1.0;
  return cutoff_prime(n, r) * sign * f_eval(x) + cutoff_eval(n, r) * f_prime(x);
}

std::string to_string(SigmaForm form) {
  switch (form) {
    case SigmaForm::zero: return "zero";
    case SigmaForm::constant: return "constant";
    case SigmaForm::power: return "power";
  }
  return "unknown";
}

SigmaForm parse_sigma_form(const std::string& name) {
  if (name == "zero") return SigmaForm::zero;
  if (name == "constant") return SigmaForm::constant;
  if (name == "power") return SigmaForm::power;
  throw ConfigError("unknown sigma form '" + name + "' (expected zero, constant or power)");
}

SigmaSpec SigmaSpec::zero() { return SigmaSpec(SigmaForm::zero, 0.0, 0.0, 0.0); }

SigmaSpec SigmaSpec::constant(double c0) { return make(SigmaForm::constant, c0, 0.0, 0.0); }

SigmaSpec SigmaSpec::power(double c0, double beta, double q) { return make(SigmaForm::power, c0, beta, q); }

SigmaSpec SigmaSpec::make(SigmaForm form, double c0, double beta, double q) {
  switch (form) {
    case SigmaForm::zero:
      return zero();
    case SigmaForm::constant:
      if (!(c0 > 0.0) || !std::isfinite(c0)) throw ConfigError("sigma floor c0 must satisfy c0 > 0");
      return SigmaSpec(form, c0, 0.0, 0.0);
    case SigmaForm::power:
      if (!(c0 > 0.0) || !std::isfinite(c0)) throw ConfigError("sigma floor c0 must satisfy c0 > 0");
      if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("sigma amplitude beta must satisfy beta >= 0");
      if (!(q > 0.0 && q < 1.0 / 3.0)) throw ConfigError("sigma growth exponent must satisfy q ∈ (0,1/3)");
      return SigmaSpec(form, c0, beta, q);
  }
  throw ConfigError("unknown sigma form");
}

double SigmaSpec::eval(double x) const {
  switch (form_) {
    case SigmaForm::zero: return 0.0;
    case SigmaForm::constant: return c0_;
    case SigmaForm::power: return c0_ + beta_ * std::pow(1.0 + x * x, 0.5 * q_);
  }
  return 0.0;
}

double SigmaSpec::prime(double x) const {
  if (form_ != SigmaForm::power) return 0.0;
  return beta_ * q_ * x * std::pow(1.0 + x * x, 0.5 * q_ - 1.0);
}

void ModelParams::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("rho must satisfy rho > 0");
  if (!(qtilde >= 0.0) || !std::isfinite(qtilde)) throw ConfigError("qtilde must satisfy qtilde >= 0");
  if (!(cutoff.level > 0.0) || !std::isfinite(cutoff.level)) throw ConfigError("cutoff level n must satisfy n > 0");
}

double ModelParams::drift_lipschitz() const {
  if (!f_enabled) return 0.0;
  // f_n' vanishes beyond n+1; scan the support densely.
  const double n = cutoff.level;
  const int samples = 20000;
  double best = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double x = (n + 1.0) * i / samples;
    best = std::max(best, std::abs(f_n_prime(n, x)));
  }
  return best;
}

}  // namespace chlab
