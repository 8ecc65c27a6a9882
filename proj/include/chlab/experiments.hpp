#pragma once

#include "chlab/config.hpp"
#include "chlab/noise.hpp"
#include "chlab/solver.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace chlab {

/// Runs fn(r) for r = 0..count-1 on a worker pool. Results are returned in replicate
/// order whatever the schedule; the exception of the lowest failing replicate is rethrown.
template <typename Fn>
auto parallel_replicates(int count, int threads, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, int>> {
  using Result = std::invoke_result_t<Fn&, int>;
  std::vector<std::optional<Result>> slots(static_cast<std::size_t>(std::max(count, 0)));
  std::vector<std::exception_ptr> errors(slots.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < count; r = next++) {
      try {
        slots[static_cast<std::size_t>(r)].emplace(fn(r));
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(count, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<Result> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct Replicate {
  NoiseRealization noise;
  FieldPath path;
};

/// Noise from stream_for_replicate(master_seed, r) and the path produced by the configured scheme.
Replicate run_replicate(const ExperimentConfig& cfg, int r);

struct SampleSet {
  std::vector<double> samples;
  /// Replicates dropped after a solver blow-up.
  int excluded = 0;
};

/// u(x*, t*) for M independent replicates, t* = first observation time. Blown-up
/// replicates are excluded and counted; more than 1% excluded fails the run.
SampleSet sample_ensemble(const ExperimentConfig& cfg, int replicates, int threads);

struct RunOptions {
  std::string out_dir = ".";
  int threads = 1;
  std::ostream* log = nullptr;
};

/// Subcommand bodies. They write their artifacts under out_dir and return 0, or throw.
int run_simulate(const ExperimentConfig& cfg, const RunOptions& opts);
int run_picard(const ExperimentConfig& cfg, const RunOptions& opts);
int run_malliavin(const ExperimentConfig& cfg, const RunOptions& opts);
int run_density(const ExperimentConfig& cfg, const RunOptions& opts);
int run_localize(const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace chlab
