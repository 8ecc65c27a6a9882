#include "chlab/solver.hpp"

#include "chlab/errors.hpp"
#include "chlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace chlab {

double FieldPath::value_at(int m, double x) const { return interpolate(at(m), x); }

ExponentialEuler::ExponentialEuler(const GridSpec& grid, const SpectralBasis& basis, const ModelParams& params)
    : grid_(grid), basis_(basis), params_(params), transform_(grid.nx(), basis.modes()) {
  params_.validate();
  if (basis.rho() != params.rho || basis.qtilde() != params.qtilde) {
    throw ContractError("spectral basis and model disagree on rho/qtilde");
  }
  const int modes = basis.modes();
  decay_.resize(modes);
  forcing_.resize(modes);
  for (int k = 0; k < modes; ++k) {
    decay_[k] = std::exp(-basis.mu(k) * grid.dt());
    forcing_[k] = forcing_factor(k, grid.dt(), basis);
  }
}

Eigen::MatrixXd ExponentialEuler::semigroup_matrix() const {
  return transform_.synthesis() * decay_.asDiagonal() * transform_.analysis();
}

Eigen::MatrixXd ExponentialEuler::forcing_matrix() const {
  return transform_.synthesis() * forcing_.asDiagonal() * transform_.analysis();
}

Eigen::VectorXd ExponentialEuler::advance(const Eigen::VectorXd& state, const Eigen::VectorXd& frozen, int m,
                                          const NoiseRealization& noise) const {
  const int nx = grid_.nx();
  const double inv_dx = 1.0 / grid_.dx();
  Eigen::VectorXd kick(nx);
  Eigen::VectorXd drift(nx);
  for (int j = 0; j < nx; ++j) {
    kick[j] = params_.sigma.eval(frozen[j]) * noise(m, j) * inv_dx;
    drift[j] = params_.drift(frozen[j]);
  }
  const auto& a = transform_.analysis();
  Eigen::VectorXd modes = decay_.cwiseProduct(a * (state + kick));
  if (params_.f_enabled) modes += forcing_.cwiseProduct(a * drift);
  Eigen::VectorXd next = transform_.synthesis() * modes;
  if (!next.allFinite()) {
    double worst = 0.0;
    for (double v : next) worst = std::isfinite(v) ? std::max(worst, std::abs(v)) : v;
    throw BlowUpError(m + 1, worst);
  }
  return next;
}

Eigen::VectorXd ExponentialEuler::step(const Eigen::VectorXd& u_m, int m, const NoiseRealization& noise) const {
  if (u_m.size() != grid_.nx()) throw ContractError("field length does not match Nx");
  if (m < 0 || m >= grid_.nt()) throw ContractError("step index out of range");
  if (!u_m.allFinite()) throw ContractError("step input must be finite");
  return advance(u_m, u_m, m, noise);
}

void ExponentialEuler::check_inputs(const Eigen::VectorXd& u0, const NoiseRealization& noise) const {
  if (u0.size() != grid_.nx()) throw ContractError("initial condition length does not match Nx");
  if (!(noise.grid() == grid_)) throw ContractError("noise realization was generated on a different grid");
  if (!u0.allFinite()) throw ContractError("initial condition must be finite");
}

FieldPath ExponentialEuler::solve(const Eigen::VectorXd& u0, const NoiseRealization& noise) const {
  check_inputs(u0, noise);
  FieldPath path{grid_, params_, RowMatrix(grid_.nt() + 1, grid_.nx()), noise.seed(), noise.replicate_id()};
  path.u.row(0) = u0.transpose();
  Eigen::VectorXd current = u0;
  for (int m = 0; m < grid_.nt(); ++m) {
    current = advance(current, current, m, noise);
    path.u.row(m + 1) = current.transpose();
  }
  return path;
}

FieldPath ExponentialEuler::free_evolution(const Eigen::VectorXd& u0) const {
  if (u0.size() != grid_.nx()) throw ContractError("initial condition length does not match Nx");
  FieldPath path{grid_, params_, RowMatrix(grid_.nt() + 1, grid_.nx()), 0, 0};
  path.u.row(0) = u0.transpose();
  Eigen::VectorXd modes = transform_.to_modes(u0);
  for (int m = 1; m <= grid_.nt(); ++m) {
    modes = decay_.cwiseProduct(modes);
    path.u.row(m) = (transform_.synthesis() * modes).transpose();
  }
  return path;
}

PicardResult ExponentialEuler::picard(const Eigen::VectorXd& u0, const NoiseRealization& noise, double tol,
                                      int max_iter) const {
  if (!(tol > 0.0)) throw DomainError("Picard tolerance must be positive");
  if (max_iter < 1) throw DomainError("Picard needs max_iter >= 1");
  check_inputs(u0, noise);

  FieldPath previous = free_evolution(u0);
  previous.noise_seed = noise.seed();
  previous.replicate_id = noise.replicate_id();
  std::vector<double> diffs;
  for (int iter = 0; iter < max_iter; ++iter) {
    FieldPath next = previous;
    Eigen::VectorXd current = u0;
    for (int m = 0; m < grid_.nt(); ++m) {
      current = advance(current, previous.at(m), m, noise);
      next.u.row(m + 1) = current.transpose();
    }
    diffs.push_back((next.u - previous.u).cwiseAbs().maxCoeff());
    previous = std::move(next);
    if (diffs.back() < tol) return {std::move(previous), std::move(diffs)};
  }
  throw NonConvergenceError(std::move(diffs));
}

Eigen::VectorXd step(const Eigen::VectorXd& u_m, int m, const NoiseRealization& noise, const ModelParams& params,
                     const SpectralBasis& basis) {
  return ExponentialEuler(noise.grid(), basis, params).step(u_m, m, noise);
}

FieldPath solve_path(const Eigen::VectorXd& u0, const NoiseRealization& noise, const ModelParams& params,
                     const SpectralBasis& basis) {
  return ExponentialEuler(noise.grid(), basis, params).solve(u0, noise);
}

PicardResult picard_solve(const Eigen::VectorXd& u0, const NoiseRealization& noise, const ModelParams& params,
                          const SpectralBasis& basis, double tol, int max_iter) {
  return ExponentialEuler(noise.grid(), basis, params).picard(u0, noise, tol, max_iter);
}

MomentEstimate sup_moment(std::span<const FieldPath> ensemble, double p) {
  if (ensemble.empty()) throw ContractError("sup_moment needs a non-empty ensemble");
  if (!(p >= 2.0)) throw DomainError("sup_moment needs p >= 2");
  const int steps = ensemble.front().grid.nt() + 1;
  const double count = static_cast<double>(ensemble.size());
  MomentEstimate best;
  best.value = -1.0;
  for (int m = 0; m < steps; ++m) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const FieldPath& path : ensemble) {
      const double v = std::pow(path.u.row(m).cwiseAbs().maxCoeff(), p);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / count;
    if (mean > best.value) {
      const double var = ensemble.size() > 1 ? std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0)) : 0.0;
      best = {mean, std::sqrt(var / count), m};
    }
  }
  return best;
}

void write_path_csv(std::ostream& os, const FieldPath& path) {
  full_precision(os);
  os << "t,x,u\n";
  for (int m = 0; m <= path.grid.nt(); ++m) {
    const double t = path.grid.time(m);
    for (int j = 0; j < path.grid.nx(); ++j) os << t << ',' << path.grid.node(j) << ',' << path.u(m, j) << '\n';
  }
}

}  // namespace chlab
