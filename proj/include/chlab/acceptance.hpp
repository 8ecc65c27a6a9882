#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace chlab {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
};

struct AcceptanceOptions {
  std::uint64_t master_seed = 20261015;
  int threads = 1;
};

/// One acceptance criterion; pinned tolerances live inside each check.
struct Criterion {
  int id;
  std::string title;
  std::function<CriterionResult(const AcceptanceOptions&)> run;
};

const std::vector<Criterion>& acceptance_criteria();

/// Runs every criterion, printing one line per criterion as it completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, std::ostream& out);

void print_result(std::ostream& out, const CriterionResult& result);

}  // namespace chlab
