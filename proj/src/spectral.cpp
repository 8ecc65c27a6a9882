#include "chlab/spectral.hpp"

#include "chlab/errors.hpp"

#include <cmath>
#include <string>

namespace chlab {

namespace {

const double kA0 = 1.0 / std::sqrt(kPi);
const double kAk = std::sqrt(2.0 / kPi);

void require_point(double x, const char* what) {
  if (!(x >= 0.0 && x <= kPi)) {
    throw DomainError(std::string(what) + " must lie in [0, pi], got " + std::to_string(x));
  }
}

}  // namespace

GridSpec::GridSpec(int nx, int nt, double horizon) : nx_(nx), nt_(nt), horizon_(horizon) {
  if (nx < 2 || nt < 2) throw ConfigError("grid needs Nx >= 2 and Nt >= 2");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("grid horizon T must be positive");
}

Eigen::VectorXd GridSpec::nodes() const {
  Eigen::VectorXd x(nx_);
  for (int j = 0; j < nx_; ++j) x[j] = node(j);
  return x;
}

SpectralBasis::SpectralBasis(int modes, double rho, double qtilde) : rho_(rho), qtilde_(qtilde) {
  if (modes < 1) throw ConfigError("spectral basis needs at least one mode");
  if (!(rho > 0.0)) throw ConfigError("rho must be positive");
  if (!(qtilde >= 0.0)) throw ConfigError("qtilde must be non-negative");
  mu_.resize(static_cast<std::size_t>(modes));
  for (int k = 0; k < modes; ++k) {
    const double lam = static_cast<double>(k) * k;
    mu_[k] = rho * lam * lam + qtilde * lam;
  }
}

double eigenfunction_eval(int k, double x) {
  if (k < 0) throw DomainError("mode index must be non-negative");
  require_point(x, "x");
  return k == 0 ? kA0 : kAk * std::cos(k * x);
}

double green_eval(double x, double y, double t, const SpectralBasis& basis) {
  if (!(t > 0.0)) throw DomainError("Green's function needs t > 0");
  require_point(x, "x");
  require_point(y, "y");
  double sum = 0.0;
  for (int k = 0; k < basis.modes(); ++k) {
    const double w = std::exp(-basis.mu(k) * t);
    if (w == 0.0) break;
    // The product a_k(x)*a_k(y) is commutative bit for bit, so the sum is exactly symmetric.
    sum += w * (eigenfunction_eval(k, x) * eigenfunction_eval(k, y));
  }
  return sum;
}

double forcing_factor(int k, double dt, const SpectralBasis& basis) {
  if (!(dt > 0.0)) throw DomainError("forcing factor needs dt > 0");
  if (k < 0 || k >= basis.modes()) throw DomainError("mode index out of range");
  const double weight = basis.rho() * basis.lambda(k) + basis.qtilde();
  const double mu = basis.mu(k);
  if (mu == 0.0) return -weight * dt;
  return weight * std::expm1(-mu * dt) / mu;
}

double kernel_energy(double x, double eps, const SpectralBasis& basis) {
  if (!(eps > 0.0)) throw DomainError("kernel energy needs eps > 0");
  require_point(x, "x");
  double sum = 0.0;
  for (int k = basis.modes() - 1; k >= 1; --k) {
    const double a = eigenfunction_eval(k, x);
    const double two_mu = 2.0 * basis.mu(k);
    sum += a * a * (-std::expm1(-two_mu * eps)) / two_mu;
  }
  return sum + eps / kPi;
}

Eigen::VectorXd semigroup_apply(const Eigen::VectorXd& coeffs, double tau, const SpectralBasis& basis) {
  if (!(tau >= 0.0)) throw DomainError("semigroup duration must be non-negative");
  if (coeffs.size() > basis.modes()) throw ContractError("more coefficients than basis modes");
  Eigen::VectorXd out = coeffs;
  for (Eigen::Index k = 1; k < out.size(); ++k) out[k] *= std::exp(-basis.mu(static_cast<int>(k)) * tau);
  return out;
}

CosineTransform::CosineTransform(int nx, int modes) {
  if (nx < 1 || modes < 1) throw ContractError("transform sizes must be positive");
  if (modes > nx) throw ContractError("mode count K must not exceed Nx");
  const double dx = kPi / nx;
  synthesis_.resize(nx, modes);
  for (int j = 0; j < nx; ++j) {
    const double x = (j + 0.5) * dx;
    for (int k = 0; k < modes; ++k) synthesis_(j, k) = eigenfunction_eval(k, x);
  }
  analysis_ = synthesis_.transpose() * dx;
}

Eigen::VectorXd CosineTransform::to_modes(const Eigen::VectorXd& field) const {
  if (field.size() != nx()) throw ContractError("field length does not match Nx");
  return analysis_ * field;
}

Eigen::VectorXd CosineTransform::from_modes(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != modes()) throw ContractError("coefficient length does not match K");
  return synthesis_ * coeffs;
}

double CosineTransform::evaluate(const Eigen::VectorXd& coeffs, double x) const {
  if (coeffs.size() > modes()) throw ContractError("coefficient length exceeds K");
  double sum = 0.0;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) sum += coeffs[k] * eigenfunction_eval(static_cast<int>(k), x);
  return sum;
}

Eigen::VectorXd to_modes(const Eigen::VectorXd& field, int modes) {
  return CosineTransform(static_cast<int>(field.size()), modes).to_modes(field);
}

Eigen::VectorXd from_modes(const Eigen::VectorXd& coeffs, int nx) {
  return CosineTransform(nx, static_cast<int>(coeffs.size())).from_modes(coeffs);
}

double interpolate(const Eigen::VectorXd& field, double x) {
  const int nx = static_cast<int>(field.size());
  const CosineTransform tr(nx, nx);
  return tr.evaluate(tr.to_modes(field), x);
}

}  // namespace chlab
