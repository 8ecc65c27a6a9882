#pragma once

#include "chlab/model.hpp"
#include "chlab/noise.hpp"
#include "chlab/spectral.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace chlab {

/// Solution u_n on the full space-time grid for one noise realization.
struct FieldPath {
  GridSpec grid;
  ModelParams params;
  /// Row m holds u(t_m, x_j), m = 0..Nt.
  RowMatrix u;
  std::uint64_t noise_seed = 0;
  std::uint64_t replicate_id = 0;

  Eigen::VectorXd at(int m) const { return u.row(m).transpose(); }
  /// max over the grid of |u|.
  double sup_norm() const { return u.cwiseAbs().maxCoeff(); }
  /// Spectral interpolation of u(., t_m) at x.
  double value_at(int m, double x) const;
};

struct PicardResult {
  FieldPath path;
  /// diffs[k] = max over the grid of |u^(k+1) - u^(k)|.
  std::vector<double> diffs;
};

/// Exponential-Euler discretization of the mild equation.
///
/// In mode space one step reads
///   u_{m+1,k} = e^{-mu_k dt} (u_{m,k} + [sigma(u_m) dW_m / dx]_k) + F_k [f_n(u_m)]_k
/// with F_k = forcing_factor(k, dt). The linear part is exact per mode, the drift
/// and the diffusion are frozen at the left end point (Ito/Walsh).
class ExponentialEuler {
 public:
  ExponentialEuler(const GridSpec& grid, const SpectralBasis& basis, const ModelParams& params);

  const GridSpec& grid() const { return grid_; }
  const SpectralBasis& basis() const { return basis_; }
  const ModelParams& params() const { return params_; }
  const CosineTransform& transform() const { return transform_; }
  const Eigen::VectorXd& decay() const { return decay_; }
  const Eigen::VectorXd& forcing() const { return forcing_; }

  /// Nodal matrix of the one-step semigroup, B diag(e^{-mu dt}) A.
  Eigen::MatrixXd semigroup_matrix() const;
  /// Nodal matrix of the drift weight, B diag(F) A.
  Eigen::MatrixXd forcing_matrix() const;

  Eigen::VectorXd step(const Eigen::VectorXd& u_m, int m, const NoiseRealization& noise) const;

  /// One step of the linear evolution of `state` with the drift and diffusion
  /// coefficients evaluated on `frozen` instead of on `state`.
  Eigen::VectorXd advance(const Eigen::VectorXd& state, const Eigen::VectorXd& frozen, int m,
                          const NoiseRealization& noise) const;

  FieldPath solve(const Eigen::VectorXd& u0, const NoiseRealization& noise) const;

  /// Whole-path Picard iteration started from the free evolution G_t u0.
  PicardResult picard(const Eigen::VectorXd& u0, const NoiseRealization& noise, double tol, int max_iter) const;

  /// G_t u0 sampled on the grid.
  FieldPath free_evolution(const Eigen::VectorXd& u0) const;

 private:
  void check_inputs(const Eigen::VectorXd& u0, const NoiseRealization& noise) const;

  GridSpec grid_;
  SpectralBasis basis_;
  ModelParams params_;
  CosineTransform transform_;
  Eigen::VectorXd decay_;
  Eigen::VectorXd forcing_;
};

Eigen::VectorXd step(const Eigen::VectorXd& u_m, int m, const NoiseRealization& noise, const ModelParams& params,
                     const SpectralBasis& basis);
FieldPath solve_path(const Eigen::VectorXd& u0, const NoiseRealization& noise, const ModelParams& params,
                     const SpectralBasis& basis);
PicardResult picard_solve(const Eigen::VectorXd& u0, const NoiseRealization& noise, const ModelParams& params,
                          const SpectralBasis& basis, double tol, int max_iter);

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
  /// Time step at which the maximum is attained.
  int step = 0;
};

/// max over t_m of the ensemble mean of ||u(., t_m)||_inf^p.
MomentEstimate sup_moment(std::span<const FieldPath> ensemble, double p);

/// CSV `t,x,u`, one row per grid point.
void write_path_csv(std::ostream& os, const FieldPath& path);

}  // namespace chlab
