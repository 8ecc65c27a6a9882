// Acceptance suite: one pass/fail line per criterion, non-zero exit if any fails.

#include "chlab/acceptance.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  chlab::AcceptanceOptions opts;
  if (argc > 1) opts.master_seed = std::strtoull(argv[1], nullptr, 10);
  const auto start = std::chrono::steady_clock::now();
  const auto results = chlab::run_acceptance(opts, std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed in " << seconds << " s"
            << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
