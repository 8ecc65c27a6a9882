#include "chlab/localization.hpp"

#include "chlab/errors.hpp"
#include "chlab/io.hpp"

#include <ostream>

namespace chlab {

LocalizationRecord classify(const FieldPath& path, std::span<const double> levels) {
  if (!path.u.allFinite()) throw ContractError("cannot classify a non-finite path");
  LocalizationRecord rec{path.replicate_id, path.sup_norm(), {levels.begin(), levels.end()}, {}};
  rec.member.reserve(levels.size());
  for (double n : levels) rec.member.push_back(rec.sup_norm < n);
  return rec;
}

ConsistencyResult consistency_check(const Eigen::VectorXd& u0, const NoiseRealization& noise,
                                    const ModelParams& params, const SpectralBasis& basis, double n, double n_prime) {
  if (!(n_prime > n)) throw ContractError("consistency check needs n_prime > n");
  ModelParams low = params;
  low.cutoff.level = n;
  ModelParams high = params;
  high.cutoff.level = n_prime;
  const FieldPath a = solve_path(u0, noise, low, basis);
  const FieldPath b = solve_path(u0, noise, high, basis);
  ConsistencyResult result;
  result.max_deviation = (a.u - b.u).cwiseAbs().maxCoeff();
  result.vacuous = !(a.sup_norm() < n && b.sup_norm() < n);
  result.identical = a.u == b.u;
  return result;
}

std::vector<double> coverage_estimate(std::span<const LocalizationRecord> ensemble, std::span<const double> levels) {
  if (ensemble.empty()) throw ContractError("coverage needs a non-empty ensemble");
  std::vector<double> coverage;
  coverage.reserve(levels.size());
  for (double n : levels) {
    std::size_t inside = 0;
    for (const LocalizationRecord& r : ensemble) inside += r.sup_norm < n ? 1 : 0;
    coverage.push_back(static_cast<double>(inside) / static_cast<double>(ensemble.size()));
  }
  return coverage;
}

void write_localization_csv(std::ostream& os, std::span<const LocalizationRecord> records) {
  full_precision(os);
  os << "replicate,sup_norm";
  if (!records.empty())
    for (double n : records.front().levels) os << ",in_n=" << n;
  os << '\n';
  for (const LocalizationRecord& r : records) {
    os << r.replicate_id << ',' << r.sup_norm;
    for (bool in : r.member) os << ',' << (in ? 1 : 0);
    os << '\n';
  }
}

}  // namespace chlab
