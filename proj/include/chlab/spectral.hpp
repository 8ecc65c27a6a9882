#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <vector>

namespace chlab {

inline constexpr double kPi = std::numbers::pi;

/// Uniform midpoint grid on (0, pi) x [0, T].
class GridSpec {
 public:
  GridSpec(int nx, int nt, double horizon);

  int nx() const { return nx_; }
  int nt() const { return nt_; }
  double horizon() const { return horizon_; }
  double dx() const { return kPi / nx_; }
  double dt() const { return horizon_ / nt_; }
  /// Collocation node x_j = (j + 1/2) pi / Nx.
  double node(int j) const { return (j + 0.5) * dx(); }
  double time(int m) const { return m * dt(); }
  Eigen::VectorXd nodes() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int nx_;
  int nt_;
  double horizon_;
};

/// Neumann cosine eigenpairs on (0, pi) for the operator -rho*Lap^2 + qtilde*Lap.
///
/// lambda_k = k^2 are the eigenvalues of the negative Neumann Laplacian, and
/// mu_k = rho*lambda_k^2 + qtilde*lambda_k are the decay rates of the linear part.
class SpectralBasis {
 public:
  SpectralBasis(int modes, double rho, double qtilde);

  int modes() const { return static_cast<int>(mu_.size()); }
  double rho() const { return rho_; }
  double qtilde() const { return qtilde_; }
  double lambda(int k) const { return static_cast<double>(k) * k; }
  double mu(int k) const { return mu_[k]; }

 private:
  double rho_;
  double qtilde_;
  std::vector<double> mu_;
};

/// a_0 = 1/sqrt(pi), a_k = sqrt(2/pi) cos(kx).
double eigenfunction_eval(int k, double x);

/// Truncated Green's function sum_{k<K} exp(-mu_k t) a_k(x) a_k(y), t > 0.
double green_eval(double x, double y, double t, const SpectralBasis& basis);

/// Exact value of int_0^dt -(rho*lambda_k + qtilde) exp(-mu_k tau) dtau.
double forcing_factor(int k, double dt, const SpectralBasis& basis);

/// int_0^eps int_D G(x, y, tau)^2 dy dtau, summed mode by mode.
double kernel_energy(double x, double eps, const SpectralBasis& basis);

/// Multiplies coefficient k by exp(-mu_k tau).
Eigen::VectorXd semigroup_apply(const Eigen::VectorXd& coeffs, double tau, const SpectralBasis& basis);

/// Discrete cosine analysis/synthesis at the midpoint nodes.
///
/// Analysis is midpoint quadrature of <v, a_k>; at K = Nx the pair is an exact
/// orthonormal transform (DCT-II/DCT-III up to scaling).
class CosineTransform {
 public:
  CosineTransform(int nx, int modes);

  int nx() const { return static_cast<int>(synthesis_.rows()); }
  int modes() const { return static_cast<int>(synthesis_.cols()); }

  Eigen::VectorXd to_modes(const Eigen::VectorXd& field) const;
  Eigen::VectorXd from_modes(const Eigen::VectorXd& coeffs) const;
  /// Point evaluation sum_k c_k a_k(x) for x in [0, pi].
  double evaluate(const Eigen::VectorXd& coeffs, double x) const;

  /// Nx x K table a_k(x_j).
  const Eigen::MatrixXd& synthesis() const { return synthesis_; }
  /// K x Nx matrix, synthesis^T * dx.
  const Eigen::MatrixXd& analysis() const { return analysis_; }

 private:
  Eigen::MatrixXd synthesis_;
  Eigen::MatrixXd analysis_;
};

Eigen::VectorXd to_modes(const Eigen::VectorXd& field, int modes);
Eigen::VectorXd from_modes(const Eigen::VectorXd& coeffs, int nx);

/// Interpolates a nodal field at an arbitrary x through its cosine expansion (K = Nx).
double interpolate(const Eigen::VectorXd& field, double x);

}  // namespace chlab
