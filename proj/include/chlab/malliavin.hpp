#pragma once

#include "chlab/noise.hpp"
#include "chlab/solver.hpp"
#include "chlab/spectral.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <vector>

namespace chlab {

/// Noise cell (y_i, s_m) acting as a Malliavin source.
struct SourceIndex {
  int i = 0;
  int m = 0;
};

/// D_{y_i, s_m} u_n(x_j, t_obs) for every source with first_source_step <= m.
///
/// Sources with s_m >= t_obs are identically zero and not stored.
class MalliavinTensor {
 public:
  MalliavinTensor(const GridSpec& grid, int obs_step, int first_source_step, Eigen::MatrixXd values);

  const GridSpec& grid() const { return grid_; }
  int obs_step() const { return obs_step_; }
  double t_obs() const { return grid_.time(obs_step_); }
  int first_source_step() const { return first_source_step_; }
  /// Source column layout: (m - first_source_step) * Nx + i.
  const Eigen::MatrixXd& values() const { return values_; }

  double value(int i, int m, int j) const;
  Eigen::VectorXd source_field(int i, int m) const;

 private:
  int column(int i, int m) const;

  GridSpec grid_;
  int obs_step_;
  int first_source_step_;
  Eigen::MatrixXd values_;
};

/// Grid delta of mass sigma(u(y_i, s_m)) placed at node i.
Eigen::VectorXd seed_source(const FieldPath& path, int i, int m, int obs_step);

/// Forward tangent sweep for an explicit source list; column c of the result is
/// D_{sources[c]} u_n(., t_obs). Sources at or after t_obs give zero columns.
Eigen::MatrixXd propagate_sources(const FieldPath& path, const NoiseRealization& noise, const SpectralBasis& basis,
                                  int obs_step, std::span<const SourceIndex> sources);

/// Forward tangent sweep over all sources with first_source_step <= m < obs_step,
/// batched into one matrix update per time step.
MalliavinTensor propagate(const FieldPath& path, const NoiseRealization& noise, const SpectralBasis& basis,
                          int obs_step, int first_source_step = 0);

/// Same tensor by reverse (adjoint) accumulation: one backward sweep of an Nx x Nx
/// co-state instead of one forward column per source.
MalliavinTensor propagate_adjoint(const FieldPath& path, const NoiseRealization& noise, const SpectralBasis& basis,
                                  int obs_step);

/// D_{y_i, s_m} of the scalar w . u(., t_obs); row m, column i. Rows m >= obs_step are zero.
RowMatrix observation_derivative(const FieldPath& path, const NoiseRealization& noise, const SpectralBasis& basis,
                                 int obs_step, const Eigen::RowVectorXd& weights);

/// Weights w with w . v equal to the spectral interpolant of v at x.
Eigen::RowVectorXd point_functional(const GridSpec& grid, double x);

/// Quadrature of the squared H-norm, sum of V^2 dx dt over the stored sources.
double hnorm_sq(const MalliavinTensor& tensor, int x_index);
/// Restricted to sources with m_begin <= m < m_end.
double hnorm_sq(const MalliavinTensor& tensor, int x_index, int m_begin, int m_end);

/// G(x_j, y_i, lag*dt) for lag = 1..max_lag, evaluated with green_eval.
class GreenTable {
 public:
  GreenTable(const GridSpec& grid, const SpectralBasis& basis, int max_lag);

  int max_lag() const { return static_cast<int>(tables_.size()); }
  /// Entry (j, i) is G(x_j, y_i, lag*dt).
  const Eigen::MatrixXd& at_lag(int lag) const { return tables_.at(static_cast<std::size_t>(lag - 1)); }

 private:
  std::vector<Eigen::MatrixXd> tables_;
};

/// Per-lag sums feeding the window estimators for one replicate.
/// Lag l means source time s_m = t_obs - l*dt.
struct SlabProfile {
  double dt = 0.0;
  /// sum_i ||V_(i,m)||_inf^2 dx
  std::vector<double> window;
  /// sum_i ||V_(i,m) - G(., y_i, l dt) sigma(u(y_i, s_m))||_inf^2 dx
  std::vector<double> remainder;
};

/// Needs the tensor to hold every source with lag <= green.max_lag().
SlabProfile slab_profile(const MalliavinTensor& tensor, const FieldPath& path, const GreenTable& green);

struct EnsembleEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Number of source slabs inside a window of length eps.
int window_slabs(double eps, double dt);

/// Mean over replicates of sum over the window (t_obs - eps, t_obs] of the slab sums, times dt.
EnsembleEstimate window_estimate(std::span<const SlabProfile> ensemble, double t_obs, double eps);
EnsembleEstimate remainder_estimate(std::span<const SlabProfile> ensemble, double t_obs, double eps);

/// Pointwise counterpart at a fixed observation point x, built from observation_derivative.
struct PointProfile {
  double dt = 0.0;
  double hnorm_sq = 0.0;
  /// sum_i |D_{y_i, s_m} u(x, t)|^2 dx per lag
  std::vector<double> full;
  /// sum_i |D_{y_i, s_m} u(x, t) - G(x, y_i, l dt) sigma(u(y_i, s_m))|^2 dx per lag
  std::vector<double> remainder;
};

PointProfile point_profile(const FieldPath& path, const NoiseRealization& noise, const SpectralBasis& basis,
                           int obs_step, double x, int max_lag);

/// Fraction of replicates whose squared H-norm exceeds threshold.
double positivity_probability(std::span<const double> hnorms, double threshold);

struct LowerBoundPoint {
  double eps = 0.0;
  /// c0^2 * kernel_energy(x, eps): deterministic lower bound of the window A-term.
  double a_lower = 0.0;
  /// Monte Carlo mean of the window B-term.
  double b_mean = 0.0;
};

std::vector<LowerBoundPoint> lower_bound_curve(std::span<const PointProfile> ensemble, double x, double c0,
                                               const SpectralBasis& basis, std::span<const double> eps_list);

/// Least-squares slope of log(value) against log(eps).
double loglog_slope(std::span<const double> eps, std::span<const double> values);

void write_scan_csv(std::ostream& os, std::span<const double> eps, std::span<const EnsembleEstimate> estimates);
void write_hnorm_csv(std::ostream& os, std::span<const double> hnorms);

}  // namespace chlab
