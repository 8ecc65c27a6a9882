#pragma once

#include "chlab/model.hpp"
#include "chlab/noise.hpp"
#include "chlab/solver.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace chlab {

/// Membership of one realization in the events Omega_n = {sup |u| < n}.
///
/// Uses the computed path, so membership is resolved on the grid only.
struct LocalizationRecord {
  std::uint64_t replicate_id = 0;
  double sup_norm = 0.0;
  std::vector<double> levels;
  std::vector<bool> member;
};

LocalizationRecord classify(const FieldPath& path, std::span<const double> levels);

struct ConsistencyResult {
  /// Some path left {|u| < n}: nothing to compare.
  bool vacuous = false;
  bool identical = false;
  double max_deviation = 0.0;

  bool pass() const { return vacuous || identical; }
};

/// Solves the same noise with cutoff levels n and n_prime (> n). If both paths stay
/// inside |u| < n the cutoff never acts and they must agree bit for bit.
ConsistencyResult consistency_check(const Eigen::VectorXd& u0, const NoiseRealization& noise,
                                    const ModelParams& params, const SpectralBasis& basis, double n, double n_prime);

/// Empirical P(Omega_n) for each level.
std::vector<double> coverage_estimate(std::span<const LocalizationRecord> ensemble, std::span<const double> levels);

/// CSV `replicate,sup_norm,in_n=<level>...`.
void write_localization_csv(std::ostream& os, std::span<const LocalizationRecord> records);

}  // namespace chlab
