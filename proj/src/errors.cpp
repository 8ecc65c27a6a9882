#include "chlab/errors.hpp"

#include <sstream>

namespace chlab {

namespace {

std::string blow_up_message(int step, double max_abs) {
  std::ostringstream os;
  os << "solver blow-up at step " << step << " (max |u| = " << max_abs << ")";
  return os.str();
}

std::string non_convergence_message(const std::vector<double>& diffs) {
  std::ostringstream os;
  os << "Picard iteration did not converge after " << diffs.size() << " iterations";
  if (!diffs.empty()) os << " (last diff " << diffs.back() << ")";
  return os.str();
}

}  // namespace

BlowUpError::BlowUpError(int step, double max_abs)
    : std::runtime_error(blow_up_message(step, max_abs)), step_(step), max_abs_(max_abs) {}

NonConvergenceError::NonConvergenceError(std::vector<double> diffs)
    : std::runtime_error(non_convergence_message(diffs)), diffs_(std::move(diffs)) {}

}  // namespace chlab
