#include "chlab/malliavin.hpp"

#include "chlab/errors.hpp"
#include "chlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace chlab {

namespace {

void check_observation(const FieldPath& path, const NoiseRealization& noise, int obs_step) {
  if (!(path.grid == noise.grid())) throw ContractError("path and noise live on different grids");
  if (path.noise_seed != noise.seed() || path.replicate_id != noise.replicate_id()) {
    throw ContractError("path was not produced by this noise realization");
  }
  if (obs_step < 1 || obs_step > path.grid.nt()) throw ContractError("observation step out of range");
}

// Tangent coefficients of step l: diffusion = sigma'(u_l) dW_l / dx, drift = f_n'(u_l).
struct TangentCoefficients {
  Eigen::VectorXd diffusion;
  Eigen::VectorXd drift;
};

TangentCoefficients coefficients_at(const FieldPath& path, const NoiseRealization& noise, int l) {
  const int nx = path.grid.nx();
  const double inv_dx = 1.0 / path.grid.dx();
  TangentCoefficients c{Eigen::VectorXd(nx), Eigen::VectorXd(nx)};
  for (int j = 0; j < nx; ++j) {
    const double u = path.u(l, j);
    c.diffusion[j] = path.params.sigma.prime(u) * noise(l, j) * inv_dx;
    c.drift[j] = path.params.drift_prime(u);
  }
  return c;
}

Eigen::VectorXd source_weights(const FieldPath& path, int m) {
  const int nx = path.grid.nx();
  const double inv_dx = 1.0 / path.grid.dx();
  Eigen::VectorXd w(nx);
  for (int i = 0; i < nx; ++i) w[i] = path.params.sigma.eval(path.u(m, i)) * inv_dx;
  return w;
}

// Backward sweep of the co-state Lambda (rows = observations). With
//   J_l = P_S (I + diag(diffusion_l)) + P_F diag(drift_l)
// it runs Lambda_l = Lambda_{l+1} J_l from Lambda_obs = observation. The sink gets
// (l, Lambda_{l+1} P_S); column i of that times sigma(u_l(i))/dx is d/d dW_l[i].
template <typename Sink>
void adjoint_sweep(const FieldPath& path, const NoiseRealization& noise, const SpectralBasis& basis, int obs_step,
                   Eigen::MatrixXd costate, Sink&& sink) {
  const ExponentialEuler scheme(path.grid, basis, path.params);
  const Eigen::MatrixXd ps = scheme.semigroup_matrix();
  const Eigen::MatrixXd pf = scheme.forcing_matrix();
  const bool with_drift = path.params.f_enabled;
  Eigen::MatrixXd through_semigroup;
  Eigen::MatrixXd through_forcing;
  for (int l = obs_step - 1; l >= 0; --l) {
    through_semigroup.noalias() = costate * ps;
    sink(l, through_semigroup);
    if (l == 0) break;
    const TangentCoefficients c = coefficients_at(path, noise, l);
    if (with_drift) through_forcing.noalias() = costate * pf;
    costate = through_semigroup * (c.diffusion.array() + 1.0).matrix().asDiagonal();
    if (with_drift) costate.noalias() += through_forcing * c.drift.asDiagonal();
  }
}

}  // namespace

MalliavinTensor::MalliavinTensor(const GridSpec& grid, int obs_step, int first_source_step, Eigen::MatrixXd values)
    : grid_(grid), obs_step_(obs_step), first_source_step_(first_source_step), values_(std::move(values)) {
  if (obs_step < 1 || obs_step > grid.nt()) throw ContractError("observation step out of range");
  if (first_source_step < 0 || first_source_step > obs_step) throw ContractError("first source step out of range");
  const Eigen::Index expected = static_cast<Eigen::Index>(obs_step - first_source_step) * grid.nx();
  if (values_.rows() != grid.nx() || values_.cols() != expected) throw ContractError("tensor shape mismatch");
}

int MalliavinTensor::column(int i, int m) const {
  if (i < 0 || i >= grid_.nx()) throw ContractError("source space index out of range");
  if (m < first_source_step_) throw ContractError("source time was not propagated into this tensor");
  return (m - first_source_step_) * grid_.nx() + i;
}

double MalliavinTensor::value(int i, int m, int j) const {
  if (j < 0 || j >= grid_.nx()) throw ContractError("observation index out of range");
  if (m >= obs_step_) return 0.0;
  return values_(j, column(i, m));
}

Eigen::VectorXd MalliavinTensor::source_field(int i, int m) const {
  if (m >= obs_step_) return Eigen::VectorXd::Zero(grid_.nx());
  return values_.col(column(i, m));
}

Eigen::VectorXd seed_source(const FieldPath& path, int i, int m, int obs_step) {
  if (m < 0 || m >= obs_step) throw ContractError("source must precede the observation time");
  if (obs_step > path.grid.nt()) throw ContractError("observation step out of range");
  if (i < 0 || i >= path.grid.nx()) throw ContractError("source space index out of range");
  Eigen::VectorXd field = Eigen::VectorXd::Zero(path.grid.nx());
  field[i] = path.params.sigma.eval(path.u(m, i)) / path.grid.dx();
  return field;
}

Eigen::MatrixXd propagate_sources(const FieldPath& path, const NoiseRealization& noise, const SpectralBasis& basis,
                                  int obs_step, std::span<const SourceIndex> sources) {
  check_observation(path, noise, obs_step);
  const int nx = path.grid.nx();
  const auto count = static_cast<Eigen::Index>(sources.size());
  Eigen::MatrixXd result = Eigen::MatrixXd::Zero(nx, count);

  // Live sources ordered by injection time; later ones join the batch as the sweep reaches them.
  std::vector<Eigen::Index> order;
  for (Eigen::Index c = 0; c < count; ++c) {
    const SourceIndex& s = sources[static_cast<std::size_t>(c)];
    if (s.i < 0 || s.i >= nx || s.m < 0) throw ContractError("source index out of range");
    if (s.m < obs_step) order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return sources[static_cast<std::size_t>(a)].m < sources[static_cast<std::size_t>(b)].m;
  });
  if (order.empty()) return result;

  const ExponentialEuler scheme(path.grid, basis, path.params);
  const auto& analysis = scheme.transform().analysis();
  const auto& synthesis = scheme.transform().synthesis();
  const Eigen::VectorXd& decay = scheme.decay();
  const Eigen::VectorXd& forcing = scheme.forcing();
  const bool with_drift = path.params.f_enabled;

  const auto live_total = static_cast<Eigen::Index>(order.size());
  Eigen::MatrixXd batch(nx, live_total);
  Eigen::MatrixXd modes;
  Eigen::Index live = 0;
  for (int l = sources[static_cast<std::size_t>(order.front())].m; l < obs_step; ++l) {
    if (live > 0) {
      const TangentCoefficients c = coefficients_at(path, noise, l);
      auto active = batch.leftCols(live);
      modes.noalias() = analysis * ((c.diffusion.array() + 1.0).matrix().asDiagonal() * active);
      modes = decay.asDiagonal() * modes;
      if (with_drift) modes.noalias() += forcing.asDiagonal() * (analysis * (c.drift.asDiagonal() * active));
      active.noalias() = synthesis * modes;
    }
    const Eigen::VectorXd weights = source_weights(path, l);
    while (live < live_total && sources[static_cast<std::size_t>(order[live])].m == l) {
      const int i = sources[static_cast<std::size_t>(order[live])].i;
      batch.col(live) = synthesis * decay.cwiseProduct(analysis.col(i) * weights[i]);
      ++live;
    }
  }
  if (!batch.allFinite()) throw BlowUpError(obs_step, batch.cwiseAbs().maxCoeff());
  for (Eigen::Index r = 0; r < live_total; ++r) result.col(order[r]) = batch.col(r);
  return result;
}

MalliavinTensor propagate(const FieldPath& path, const NoiseRealization& noise, const SpectralBasis& basis,
                          int obs_step, int first_source_step) {
  check_observation(path, noise, obs_step);
  if (first_source_step < 0 || first_source_step > obs_step) throw ContractError("first source step out of range");
  const int nx = path.grid.nx();
  std::vector<SourceIndex> sources;
  sources.reserve(static_cast<std::size_t>(obs_step - first_source_step) * nx);
  for (int m = first_source_step; m < obs_step; ++m)
    for (int i = 0; i < nx; ++i) sources.push_back({i, m});
  return MalliavinTensor(path.grid, obs_step, first_source_step,
                         propagate_sources(path, noise, basis, obs_step, sources));
}

MalliavinTensor propagate_adjoint(const FieldPath& path, const NoiseRealization& noise, const SpectralBasis& basis,
                                  int obs_step) {
  check_observation(path, noise, obs_step);
  const int nx = path.grid.nx();
  Eigen::MatrixXd values(nx, static_cast<Eigen::Index>(obs_step) * nx);
  adjoint_sweep(path, noise, basis, obs_step, Eigen::MatrixXd::Identity(nx, nx),
                [&](int l, const Eigen::MatrixXd& x) {
                  values.middleCols(static_cast<Eigen::Index>(l) * nx, nx) = x * source_weights(path, l).asDiagonal();
                });
  if (!values.allFinite()) throw BlowUpError(obs_step, values.cwiseAbs().maxCoeff());
  return MalliavinTensor(path.grid, obs_step, 0, std::move(values));
}

RowMatrix observation_derivative(const FieldPath& path, const NoiseRealization& noise, const SpectralBasis& basis,
                                 int obs_step, const Eigen::RowVectorXd& weights) {
  check_observation(path, noise, obs_step);
  const int nx = path.grid.nx();
  if (weights.size() != nx) throw ContractError("observation weights length does not match Nx");
  RowMatrix out = RowMatrix::Zero(path.grid.nt(), nx);
  adjoint_sweep(path, noise, basis, obs_step, Eigen::MatrixXd(weights),
                [&](int l, const Eigen::MatrixXd& x) { out.row(l) = x.row(0).cwiseProduct(source_weights(path, l).transpose()); });
  return out;
}

Eigen::RowVectorXd point_functional(const GridSpec& grid, double x) {
  const CosineTransform tr(grid.nx(), grid.nx());
  Eigen::RowVectorXd basis_at(grid.nx());
  for (int k = 0; k < grid.nx(); ++k) basis_at[k] = eigenfunction_eval(k, x);
  return basis_at * tr.analysis();
}

double hnorm_sq(const MalliavinTensor& tensor, int x_index) {
  return hnorm_sq(tensor, x_index, tensor.first_source_step(), tensor.obs_step());
}

double hnorm_sq(const MalliavinTensor& tensor, int x_index, int m_begin, int m_end) {
  const GridSpec& grid = tensor.grid();
  if (x_index < 0 || x_index >= grid.nx()) throw ContractError("observation index out of range");
  m_end = std::min(m_end, tensor.obs_step());
  if (m_begin < tensor.first_source_step()) throw ContractError("window starts before the stored sources");
  if (m_end <= m_begin) return 0.0;
  const int nx = grid.nx();
  const auto first = static_cast<Eigen::Index>(m_begin - tensor.first_source_step()) * nx;
  const auto width = static_cast<Eigen::Index>(m_end - m_begin) * nx;
  return tensor.values().row(x_index).segment(first, width).squaredNorm() * grid.dx() * grid.dt();
}

GreenTable::GreenTable(const GridSpec& grid, const SpectralBasis& basis, int max_lag) {
  if (max_lag < 1) throw ContractError("Green table needs max_lag >= 1");
  const int nx = grid.nx();
  tables_.reserve(static_cast<std::size_t>(max_lag));
  for (int lag = 1; lag <= max_lag; ++lag) {
    Eigen::MatrixXd g(nx, nx);
    const double tau = lag * grid.dt();
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j <= i; ++j) g(j, i) = g(i, j) = green_eval(grid.node(j), grid.node(i), tau, basis);
    tables_.push_back(std::move(g));
  }
}

SlabProfile slab_profile(const MalliavinTensor& tensor, const FieldPath& path, const GreenTable& green) {
  const GridSpec& grid = tensor.grid();
  const int max_lag = green.max_lag();
  if (tensor.obs_step() - max_lag < tensor.first_source_step()) {
    throw ContractError("tensor does not hold every source inside the requested lag range");
  }
  const int nx = grid.nx();
  SlabProfile profile{grid.dt(), std::vector<double>(max_lag), std::vector<double>(max_lag)};
  for (int lag = 1; lag <= max_lag; ++lag) {
    const int m = tensor.obs_step() - lag;
    const Eigen::MatrixXd& g = green.at_lag(lag);
    double window = 0.0;
    double remainder = 0.0;
    for (int i = 0; i < nx; ++i) {
      const Eigen::VectorXd v = tensor.source_field(i, m);
      const double sigma = path.params.sigma.eval(path.u(m, i));
      window += v.cwiseAbs2().maxCoeff();
      remainder += (v - g.col(i) * sigma).cwiseAbs2().maxCoeff();
    }
    profile.window[static_cast<std::size_t>(lag - 1)] = window * grid.dx();
    profile.remainder[static_cast<std::size_t>(lag - 1)] = remainder * grid.dx();
  }
  return profile;
}

int window_slabs(double eps, double dt) { return static_cast<int>(std::floor(eps / dt + 1e-9)); }

namespace {

template <typename Member>
EnsembleEstimate scan_estimate(std::span<const SlabProfile> ensemble, double t_obs, double eps, Member member) {
  if (ensemble.empty()) throw ContractError("window estimate needs a non-empty ensemble");
  if (!(eps > 0.0 && eps < std::min(1.0, t_obs))) throw DomainError("window length must satisfy 0 < eps < min(1, t_obs)");
  std::vector<double> values;
  values.reserve(ensemble.size());
  for (const SlabProfile& p : ensemble) {
    const std::vector<double>& slabs = p.*member;
    const int count = window_slabs(eps, p.dt);
    if (count > static_cast<int>(slabs.size())) throw ContractError("window exceeds the profiled lag range");
    values.push_back(std::accumulate(slabs.begin(), slabs.begin() + count, 0.0) * p.dt);
  }
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = n > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace

EnsembleEstimate window_estimate(std::span<const SlabProfile> ensemble, double t_obs, double eps) {
  return scan_estimate(ensemble, t_obs, eps, &SlabProfile::window);
}

EnsembleEstimate remainder_estimate(std::span<const SlabProfile> ensemble, double t_obs, double eps) {
  return scan_estimate(ensemble, t_obs, eps, &SlabProfile::remainder);
}

PointProfile point_profile(const FieldPath& path, const NoiseRealization& noise, const SpectralBasis& basis,
                           int obs_step, double x, int max_lag) {
  if (max_lag < 1 || max_lag > obs_step) throw ContractError("lag range must lie in [1, obs_step]");
  const GridSpec& grid = path.grid;
  const RowMatrix d = observation_derivative(path, noise, basis, obs_step, point_functional(grid, x));
  PointProfile p{grid.dt(), d.squaredNorm() * grid.dx() * grid.dt(), std::vector<double>(max_lag),
                 std::vector<double>(max_lag)};
  for (int lag = 1; lag <= max_lag; ++lag) {
    const int m = obs_step - lag;
    double full = 0.0;
    double rem = 0.0;
    for (int i = 0; i < grid.nx(); ++i) {
      const double v = d(m, i);
      const double lead = green_eval(x, grid.node(i), lag * grid.dt(), basis) * path.params.sigma.eval(path.u(m, i));
      full += v * v;
      rem += (v - lead) * (v - lead);
    }
    p.full[static_cast<std::size_t>(lag - 1)] = full * grid.dx();
    p.remainder[static_cast<std::size_t>(lag - 1)] = rem * grid.dx();
  }
  return p;
}

double positivity_probability(std::span<const double> hnorms, double threshold) {
  if (!(threshold >= 0.0)) throw DomainError("positivity threshold must be non-negative");
  if (hnorms.empty()) return 0.0;
  const auto above = std::count_if(hnorms.begin(), hnorms.end(), [&](double h) { return h > threshold; });
  return static_cast<double>(above) / static_cast<double>(hnorms.size());
}

std::vector<LowerBoundPoint> lower_bound_curve(std::span<const PointProfile> ensemble, double x, double c0,
                                               const SpectralBasis& basis, std::span<const double> eps_list) {
  std::vector<LowerBoundPoint> curve;
  for (double eps : eps_list) {
    double b_sum = 0.0;
    for (const PointProfile& p : ensemble) {
      const int count = window_slabs(eps, p.dt);
      if (count > static_cast<int>(p.remainder.size())) throw ContractError("window exceeds the profiled lag range");
      b_sum += std::accumulate(p.remainder.begin(), p.remainder.begin() + count, 0.0) * p.dt;
    }
    const double b_mean = ensemble.empty() ? 0.0 : b_sum / static_cast<double>(ensemble.size());
    curve.push_back({eps, c0 * c0 * kernel_energy(x, eps, basis), b_mean});
  }
  return curve;
}

double loglog_slope(std::span<const double> eps, std::span<const double> values) {
  if (eps.size() != values.size() || eps.size() < 2) throw ContractError("slope fit needs two or more matching points");
  const double n = static_cast<double>(eps.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && values[i] > 0.0)) throw DomainError("log-log fit needs positive data");
    const double lx = std::log(eps[i]);
    const double ly = std::log(values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_scan_csv(std::ostream& os, std::span<const double> eps, std::span<const EnsembleEstimate> estimates) {
  full_precision(os);
  os << "eps,estimate,stderr\n";
  for (std::size_t i = 0; i < eps.size() && i < estimates.size(); ++i) {
    os << eps[i] << ',' << estimates[i].mean << ',' << estimates[i].std_error << '\n';
  }
}

void write_hnorm_csv(std::ostream& os, std::span<const double> hnorms) {
  full_precision(os);
  os << "replicate,hnorm_sq\n";
  for (std::size_t r = 0; r < hnorms.size(); ++r) os << r << ',' << hnorms[r] << '\n';
}

}  // namespace chlab
