#include "chlab/density.hpp"

#include "chlab/errors.hpp"
#include "chlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace chlab {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);

double sample_std(std::span<const double> samples) {
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  return std::sqrt(ss / (n - 1.0));
}

void require_samples(std::span<const double> samples) {
  if (samples.size() < 2) throw ContractError("density estimation needs at least two samples");
  for (double s : samples)
    if (!std::isfinite(s)) throw ContractError("samples must be finite");
}

}  // namespace

double silverman_bandwidth(std::span<const double> samples) {
  require_samples(samples);
  const double sd = sample_std(samples);
  // All-equal samples leave only rounding noise in the computed mean.
  const bool atom = std::all_of(samples.begin(), samples.end(), [&](double v) { return v == samples.front(); });
  if (atom || !(sd > 0.0)) throw DegenerateLawError("samples have zero variance: the empirical law is an atom");
  return 1.06 * sd * std::pow(static_cast<double>(samples.size()), -0.2);
}

double kde_value(std::span<const double> samples, double bandwidth, double x) {
  double sum = 0.0;
  for (double s : samples) {
    const double z = (x - s) / bandwidth;
    sum += std::exp(-0.5 * z * z);
  }
  return sum * kInvSqrt2Pi / (bandwidth * static_cast<double>(samples.size()));
}

DensityReport kde(std::span<const double> samples, std::optional<double> bandwidth) {
  require_samples(samples);
  DensityReport report;
  report.samples.assign(samples.begin(), samples.end());
  report.bandwidth = bandwidth ? *bandwidth : silverman_bandwidth(samples);
  if (!(report.bandwidth > 0.0)) throw DomainError("bandwidth must be positive");

  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it - 4.0 * report.bandwidth;
  const double hi = *hi_it + 4.0 * report.bandwidth;
  const double step = (hi - lo) / (kKdeGridPoints - 1);
  report.grid.resize(kKdeGridPoints);
  report.density.resize(kKdeGridPoints);
  for (int g = 0; g < kKdeGridPoints; ++g) {
    report.grid[g] = lo + g * step;
    report.density[g] = kde_value(samples, report.bandwidth, report.grid[g]);
  }
  double integral = 0.0;
  for (int g = 1; g < kKdeGridPoints; ++g) integral += 0.5 * (report.density[g - 1] + report.density[g]) * step;
  report.diagnostics.kde_integral = integral;
  report.diagnostics.max_multiplicity = max_multiplicity(samples);
  return report;
}

int max_multiplicity(std::span<const double> samples) {
  if (samples.empty()) return 0;
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  int best = 1;
  int run = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    run = sorted[i] == sorted[i - 1] ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_distance_normal(std::span<const double> samples, double mean, double sd) {
  if (samples.empty()) throw ContractError("KS distance needs samples");
  if (!(sd > 0.0)) throw DegenerateLawError("reference normal law needs positive variance");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf((sorted[i] - mean) / sd);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return d;
}

OracleCheck gaussian_oracle_check(std::span<const double> samples, double x_star, double t_star,
                                  const Eigen::VectorXd& u0, const ModelParams& params, const SpectralBasis& basis) {
  if (params.f_enabled || params.sigma.form() == SigmaForm::power) {
    throw ContractError("Gaussian oracle applies only to the linear equation with constant sigma");
  }
  if (params.sigma.degenerate()) throw DegenerateLawError("sigma = 0 gives a deterministic (atomic) law");
  require_samples(samples);
  const CosineTransform tr(static_cast<int>(u0.size()), basis.modes());
  OracleCheck check;
  check.mean = tr.evaluate(semigroup_apply(tr.to_modes(u0), t_star, basis), x_star);
  check.variance = params.sigma.c0() * params.sigma.c0() * kernel_energy(x_star, t_star, basis);
  check.ks_distance = ks_distance_normal(samples, check.mean, std::sqrt(check.variance));
  check.critical = 1.63 / std::sqrt(static_cast<double>(samples.size()));
  check.pass = check.ks_distance < check.critical;
  return check;
}

void write_samples_csv(std::ostream& os, std::span<const double> samples) {
  full_precision(os);
  os << "sample\n";
  for (double s : samples) os << s << '\n';
}

void write_kde_csv(std::ostream& os, const DensityReport& report) {
  full_precision(os);
  os << "x,density\n";
  for (std::size_t g = 0; g < report.grid.size(); ++g) os << report.grid[g] << ',' << report.density[g] << '\n';
}

void write_diagnostics(std::ostream& os, const DensityReport& report, const std::optional<OracleCheck>& oracle) {
  full_precision(os);
  os << "samples = " << report.samples.size() << '\n';
  os << "bandwidth = " << report.bandwidth << '\n';
  os << "kde_integral = " << report.diagnostics.kde_integral << '\n';
  os << "max_multiplicity = " << report.diagnostics.max_multiplicity << '\n';
  if (oracle) {
    os << "oracle_mean = " << oracle->mean << '\n';
    os << "oracle_variance = " << oracle->variance << '\n';
    os << "ks_distance = " << oracle->ks_distance << '\n';
    os << "ks_critical_1pct = " << oracle->critical << '\n';
    os << "oracle_pass = " << (oracle->pass ? "true" : "false") << '\n';
  }
}

}  // namespace chlab
