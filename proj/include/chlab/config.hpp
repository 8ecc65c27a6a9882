#pragma once

#include "chlab/model.hpp"
#include "chlab/spectral.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace chlab {

enum class InitialKind { cosine, zero, file };
enum class Scheme { step, picard };

/// Everything an experiment needs. Loaded from a sectioned key-value file.
struct ExperimentConfig {
  // [grid]
  int nx = 64;
  int nt = 256;
  double horizon = 0.25;
  /// Spectral truncation K; 0 means K = Nx.
  int modes = 0;

  // [model], [sigma]
  ModelParams model;

  // [initial]
  InitialKind initial = InitialKind::cosine;
  std::string initial_path;
  /// Samples read from initial_path (filled by the loader).
  std::vector<double> initial_samples;

  // [seeds]
  std::uint64_t master_seed = 20261015;
  int replicates = 100;

  // [solver]
  Scheme scheme = Scheme::step;
  double tol = 1e-8;
  int max_iter = 20;

  // [observation]
  double x_star = kPi / 2.0;
  std::vector<double> t_obs;
  std::vector<double> eps;
  std::vector<double> thresholds{0.0};
  std::vector<double> levels{1.0, 2.0, 3.0, 5.0, 10.0};
  double moment_p = 2.0;

  GridSpec grid() const { return GridSpec(nx, nt, horizon); }
  SpectralBasis basis() const { return SpectralBasis(modes == 0 ? nx : modes, model.rho, model.qtilde); }
  Eigen::VectorXd initial_field() const;

  /// Observation times, defaulting to {T}.
  std::vector<double> observation_times() const;
  /// Window lengths, defaulting to T * {2^-7, ..., 2^-3}.
  std::vector<double> window_lengths() const;
  /// Grid step of an observation time; throws ConfigError if t is not on the grid.
  int obs_step(double t) const;

  /// Throws ConfigError naming the violated bound.
  void validate() const;

  /// Normalized text form; identical configs give identical text.
  std::string canonical() const;
  /// FNV-1a 64 hash of canonical(), as 16 hex digits.
  std::string digest() const;
};

ExperimentConfig parse_config(std::istream& in, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// The shipped desk-scale configuration (Nx=64, Nt=256, T=0.25, power sigma).
ExperimentConfig default_config();

}  // namespace chlab
