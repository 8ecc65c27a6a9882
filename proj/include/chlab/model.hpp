#pragma once

#include <string>

namespace chlab {

/// f(u) = u^3 - u.
double f_eval(double x);
double f_prime(double x);

/// C^1 cutoff H_n(r): 1 below n, 0 from n+1 on, cubic smoothstep in between.
double cutoff_eval(double n, double r);
double cutoff_prime(double n, double r);

/// Localized nonlinearity f_n(x) = H_n(|x|) f(x) and its derivative.
double f_n_eval(double n, double x);
double f_n_prime(double n, double x);

struct CutoffSpec {
  double level = 5.0;
};

enum class SigmaForm { zero, constant, power };

std::string to_string(SigmaForm form);
SigmaForm parse_sigma_form(const std::string& name);

/// Noise diffusion sigma.
///
/// constant: sigma = c0.
/// power:    sigma = c0 + beta * (1 + x^2)^(q/2), q in (0, 1/3).
/// zero:     sigma = 0, the deterministic equation (degenerate, only for oracles).
///
/// The non-zero forms satisfy sigma >= c0 > 0, |sigma| <= (c0 + beta)(1 + |x|^q)
/// and |sigma'| <= beta * q.
class SigmaSpec {
 public:
  SigmaSpec() = default;

  static SigmaSpec zero();
  static SigmaSpec constant(double c0);
  static SigmaSpec power(double c0, double beta, double q);
  /// Validating factory used by configuration loading.
  static SigmaSpec make(SigmaForm form, double c0, double beta, double q);

  SigmaForm form() const { return form_; }
  double c0() const { return c0_; }
  double beta() const { return beta_; }
  double q() const { return q_; }
  bool degenerate() const { return form_ == SigmaForm::zero; }

  double eval(double x) const;
  double prime(double x) const;

 private:
  SigmaSpec(SigmaForm form, double c0, double beta, double q) : form_(form), c0_(c0), beta_(beta), q_(q) {}

  SigmaForm form_ = SigmaForm::zero;
  double c0_ = 0.0;
  double beta_ = 0.0;
  double q_ = 0.0;
};

inline double sigma_eval(const SigmaSpec& spec, double x) { return spec.eval(x); }
inline double sigma_prime(const SigmaSpec& spec, double x) { return spec.prime(x); }

struct ModelParams {
  double rho = 1.0;
  double qtilde = 1.0;
  CutoffSpec cutoff;
  SigmaSpec sigma = SigmaSpec::power(0.5, 0.5, 0.3);
  bool f_enabled = true;

  /// Throws ConfigError on rho <= 0, qtilde < 0 or a non-positive cutoff level.
  void validate() const;

  /// f_n(x), or 0 when the nonlinearity is disabled.
  double drift(double x) const { return f_enabled ? f_n_eval(cutoff.level, x) : 0.0; }
  double drift_prime(double x) const { return f_enabled ? f_n_prime(cutoff.level, x) : 0.0; }
  /// sup over the real line of |f_n'| (0 when disabled).
  double drift_lipschitz() const;
};

}  // namespace chlab
