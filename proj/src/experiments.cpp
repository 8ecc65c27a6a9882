#include "chlab/experiments.hpp"

#include "chlab/density.hpp"
#include "chlab/errors.hpp"
#include "chlab/io.hpp"
#include "chlab/localization.hpp"
#include "chlab/malliavin.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace chlab {

namespace {

constexpr int kMaxPathFiles = 16;

std::ofstream open_artifact(const ExperimentConfig& cfg, const RunOptions& opts, const std::string& name) {
  std::filesystem::create_directories(opts.out_dir);
  const auto path = std::filesystem::path(opts.out_dir) / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write artifact " + path.string());
  write_preamble(os, cfg.digest(), cfg.master_seed);
  return os;
}

void note(const RunOptions& opts, const std::string& text) {
  if (opts.log) *opts.log << text << '\n';
}

}  // namespace

Replicate run_replicate(const ExperimentConfig& cfg, int r) {
  const GridSpec grid = cfg.grid();
  NoiseRealization noise =
      NoiseRealization::generate(grid, stream_for_replicate(cfg.master_seed, static_cast<std::uint64_t>(r)),
                                 static_cast<std::uint64_t>(r));
  const ExponentialEuler scheme(grid, cfg.basis(), cfg.model);
  FieldPath path = cfg.scheme == Scheme::step ? scheme.solve(cfg.initial_field(), noise)
                                              : scheme.picard(cfg.initial_field(), noise, cfg.tol, cfg.max_iter).path;
  return {std::move(noise), std::move(path)};
}

SampleSet sample_ensemble(const ExperimentConfig& cfg, int replicates, int threads) {
  if (replicates < 2) throw ContractError("sample_ensemble needs M >= 2");
  const double t_star = cfg.observation_times().front();
  const int obs = cfg.obs_step(t_star);
  const auto outcomes = parallel_replicates(replicates, threads, [&](int r) -> std::optional<double> {
    try {
      return run_replicate(cfg, r).path.value_at(obs, cfg.x_star);
    } catch (const BlowUpError&) {
      return std::nullopt;
    }
  });
  SampleSet set;
  for (const auto& o : outcomes) {
    if (o) {
      set.samples.push_back(*o);
    } else {
      ++set.excluded;
    }
  }
  if (set.excluded * 100 > replicates) {
    throw BlowUpError(cfg.nt, std::numeric_limits<double>::infinity());
  }
  return set;
}

int run_simulate(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto reps = parallel_replicates(cfg.replicates, opts.threads, [&](int r) { return run_replicate(cfg, r).path; });
  for (int r = 0; r < std::min<int>(cfg.replicates, kMaxPathFiles); ++r) {
    auto os = open_artifact(cfg, opts, "path_r" + std::to_string(r) + ".csv");
    write_path_csv(os, reps[static_cast<std::size_t>(r)]);
  }
  auto norms = open_artifact(cfg, opts, "sup_norms.csv");
  full_precision(norms);
  norms << "replicate,sup_norm\n";
  for (std::size_t r = 0; r < reps.size(); ++r) norms << r << ',' << reps[r].sup_norm() << '\n';

  const MomentEstimate moment = sup_moment(reps, cfg.moment_p);
  auto summary = open_artifact(cfg, opts, "sup_moment.txt");
  full_precision(summary);
  summary << "p = " << cfg.moment_p << "\nreplicates = " << reps.size() << "\nsup_moment = " << moment.value
          << "\nstd_error = " << moment.std_error << "\nattained_at_t = " << cfg.grid().time(moment.step) << '\n';
  note(opts, "simulate: sup_t E||u||^p = " + std::to_string(moment.value) + " (+/- " +
                 std::to_string(moment.std_error) + ")");
  return 0;
}

int run_picard(const ExperimentConfig& cfg, const RunOptions& opts) {
  struct Trace {
    std::vector<double> diffs;
    double gap;
  };
  const GridSpec grid = cfg.grid();
  const ExponentialEuler scheme(grid, cfg.basis(), cfg.model);
  const auto traces = parallel_replicates(cfg.replicates, opts.threads, [&](int r) {
    const NoiseRealization noise =
        NoiseRealization::generate(grid, stream_for_replicate(cfg.master_seed, static_cast<std::uint64_t>(r)),
                                   static_cast<std::uint64_t>(r));
    const PicardResult pr = scheme.picard(cfg.initial_field(), noise, cfg.tol, cfg.max_iter);
    const FieldPath direct = scheme.solve(cfg.initial_field(), noise);
    return Trace{pr.diffs, (pr.path.u - direct.u).cwiseAbs().maxCoeff()};
  });
  auto os = open_artifact(cfg, opts, "picard_diffs.csv");
  full_precision(os);
  os << "replicate,iteration,diff\n";
  for (std::size_t r = 0; r < traces.size(); ++r)
    for (std::size_t k = 0; k < traces[r].diffs.size(); ++k) os << r << ',' << k << ',' << traces[r].diffs[k] << '\n';
  auto gaps = open_artifact(cfg, opts, "picard_gap.csv");
  full_precision(gaps);
  gaps << "replicate,iterations,sup_gap_to_time_stepper\n";
  for (std::size_t r = 0; r < traces.size(); ++r) gaps << r << ',' << traces[r].diffs.size() << ',' << traces[r].gap << '\n';
  note(opts, "picard: " + std::to_string(traces.size()) + " replicates converged");
  return 0;
}

int run_malliavin(const ExperimentConfig& cfg, const RunOptions& opts) {
  const GridSpec grid = cfg.grid();
  const SpectralBasis basis = cfg.basis();
  const std::vector<double> eps_list = cfg.window_lengths();
  int max_lag = 1;
  for (double e : eps_list) max_lag = std::max(max_lag, window_slabs(e, grid.dt()));
  const GreenTable green(grid, basis, max_lag);

  for (std::size_t t_index = 0; t_index < cfg.observation_times().size(); ++t_index) {
    const double t_obs = cfg.observation_times()[t_index];
    const int obs = cfg.obs_step(t_obs);
    if (max_lag > obs) throw ConfigError("window lengths exceed the observation time");
    struct Result {
      SlabProfile slabs;
      PointProfile point;
    };
    const auto results = parallel_replicates(cfg.replicates, opts.threads, [&](int r) {
      const Replicate rep = run_replicate(cfg, r);
      const MalliavinTensor tensor = propagate(rep.path, rep.noise, basis, obs, obs - max_lag);
      return Result{slab_profile(tensor, rep.path, green),
                    point_profile(rep.path, rep.noise, basis, obs, cfg.x_star, max_lag)};
    });
    std::vector<SlabProfile> slabs;
    std::vector<PointProfile> points;
    std::vector<double> hnorms;
    for (const Result& res : results) {
      slabs.push_back(res.slabs);
      points.push_back(res.point);
      hnorms.push_back(res.point.hnorm_sq);
    }
    std::vector<EnsembleEstimate> window;
    std::vector<EnsembleEstimate> remainder;
    for (double e : eps_list) {
      window.push_back(window_estimate(slabs, t_obs, e));
      remainder.push_back(remainder_estimate(slabs, t_obs, e));
    }
    const std::string suffix = "_t" + std::to_string(t_index) + ".csv";
    {
      auto os = open_artifact(cfg, opts, "window" + suffix);
      write_scan_csv(os, eps_list, window);
    }
    {
      auto os = open_artifact(cfg, opts, "remainder" + suffix);
      write_scan_csv(os, eps_list, remainder);
    }
    {
      auto os = open_artifact(cfg, opts, "hnorm" + suffix);
      write_hnorm_csv(os, hnorms);
    }
    {
      auto os = open_artifact(cfg, opts, "positivity" + suffix);
      full_precision(os);
      os << "threshold,fraction\n";
      for (double th : cfg.thresholds) os << th << ',' << positivity_probability(hnorms, th) << '\n';
    }
    {
      auto os = open_artifact(cfg, opts, "lower_bound" + suffix);
      full_precision(os);
      os << "eps,a_lower,b_mean\n";
      for (const LowerBoundPoint& p : lower_bound_curve(points, cfg.x_star, cfg.model.sigma.c0(), basis, eps_list))
        os << p.eps << ',' << p.a_lower << ',' << p.b_mean << '\n';
    }
    {
      // The windowed tensor of replicate 0, for inspection.
      const Replicate rep = run_replicate(cfg, 0);
      const MalliavinTensor tensor = propagate(rep.path, rep.noise, basis, obs, obs - max_lag);
      auto os = open_artifact(cfg, opts, "tensor_r0" + suffix);
      full_precision(os);
      os << "y,s,x,value\n";
      for (int m = obs - max_lag; m < obs; ++m)
        for (int i = 0; i < grid.nx(); ++i)
          for (int j = 0; j < grid.nx(); ++j)
            os << grid.node(i) << ',' << grid.time(m) << ',' << grid.node(j) << ',' << tensor.value(i, m, j) << '\n';
    }
    std::vector<double> means;
    std::vector<double> rem_means;
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
      means.push_back(window[k].mean);
      rem_means.push_back(remainder[k].mean);
    }
    if (eps_list.size() >= 2) {
      auto os = open_artifact(cfg, opts, "exponents" + suffix);
      full_precision(os);
      os << "quantity,slope\n";
      os << "window," << loglog_slope(eps_list, means) << '\n';
      bool positive = true;
      for (double v : rem_means) positive = positive && v > 0.0;
      if (positive) os << "remainder," << loglog_slope(eps_list, rem_means) << '\n';
    }
    note(opts, "malliavin: t_obs = " + std::to_string(t_obs) + ", P(hnorm > 0) = " +
                   std::to_string(positivity_probability(hnorms, 0.0)));
  }
  return 0;
}

int run_density(const ExperimentConfig& cfg, const RunOptions& opts) {
  const SampleSet set = sample_ensemble(cfg, cfg.replicates, opts.threads);
  const DensityReport report = kde(set.samples);
  std::optional<OracleCheck> oracle;
  if (!cfg.model.f_enabled && cfg.model.sigma.form() == SigmaForm::constant) {
    oracle = gaussian_oracle_check(set.samples, cfg.x_star, cfg.observation_times().front(), cfg.initial_field(),
                                   cfg.model, cfg.basis());
  }
  {
    auto os = open_artifact(cfg, opts, "samples.csv");
    write_samples_csv(os, set.samples);
  }
  {
    auto os = open_artifact(cfg, opts, "kde.csv");
    write_kde_csv(os, report);
  }
  auto os = open_artifact(cfg, opts, "diagnostics.txt");
  os << "excluded = " << set.excluded << '\n';
  write_diagnostics(os, report, oracle);
  note(opts, "density: kde integral = " + std::to_string(report.diagnostics.kde_integral) +
                 ", max multiplicity = " + std::to_string(report.diagnostics.max_multiplicity));
  return 0;
}

int run_localize(const ExperimentConfig& cfg, const RunOptions& opts) {
  const GridSpec grid = cfg.grid();
  const SpectralBasis basis = cfg.basis();
  struct Outcome {
    LocalizationRecord record;
    ConsistencyResult consistency;
  };
  const double n = cfg.model.cutoff.level;
  const auto outcomes = parallel_replicates(cfg.replicates, opts.threads, [&](int r) {
    const Replicate rep = run_replicate(cfg, r);
    return Outcome{classify(rep.path, cfg.levels),
                   consistency_check(cfg.initial_field(), rep.noise, cfg.model, basis, n, 2.0 * n)};
  });
  std::vector<LocalizationRecord> records;
  int vacuous = 0;
  int failures = 0;
  for (const Outcome& o : outcomes) {
    records.push_back(o.record);
    vacuous += o.consistency.vacuous ? 1 : 0;
    failures += o.consistency.pass() ? 0 : 1;
  }
  {
    auto os = open_artifact(cfg, opts, "localization.csv");
    write_localization_csv(os, records);
  }
  {
    auto os = open_artifact(cfg, opts, "coverage.csv");
    full_precision(os);
    os << "level,coverage\n";
    const auto cov = coverage_estimate(records, cfg.levels);
    for (std::size_t k = 0; k < cov.size(); ++k) os << cfg.levels[k] << ',' << cov[k] << '\n';
  }
  auto os = open_artifact(cfg, opts, "consistency.txt");
  os << "n = " << n << "\nn_prime = " << 2.0 * n << "\nreplicates = " << outcomes.size() << "\nvacuous = " << vacuous
     << "\nfailures = " << failures << '\n';
  note(opts, "localize: " + std::to_string(failures) + " consistency failures, " + std::to_string(vacuous) +
                 " vacuous");
  return 0;
}

}  // namespace chlab
