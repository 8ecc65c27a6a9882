#pragma once

#include "chlab/model.hpp"
#include "chlab/spectral.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace chlab {

struct DensityDiagnostics {
  /// Largest number of bit-identical samples.
  int max_multiplicity = 0;
  /// Trapezoidal integral of the estimate over its evaluation grid.
  double kde_integral = 0.0;
  std::optional<double> ks_distance;
};

/// Kernel density estimate of the law of u(x*, t*).
struct DensityReport {
  std::vector<double> samples;
  double bandwidth = 0.0;
  std::vector<double> grid;
  std::vector<double> density;
  DensityDiagnostics diagnostics;
};

inline constexpr int kKdeGridPoints = 512;

/// 1.06 * std * M^(-1/5). Throws DegenerateLawError on zero spread.
double silverman_bandwidth(std::span<const double> samples);

/// Gaussian-kernel estimate at a single point.
double kde_value(std::span<const double> samples, double bandwidth, double x);

/// Gaussian KDE on 512 points spanning [min - 4h, max + 4h]. Silverman bandwidth unless given.
DensityReport kde(std::span<const double> samples, std::optional<double> bandwidth = std::nullopt);

int max_multiplicity(std::span<const double> samples);

double normal_cdf(double z);

/// sup_x |F_M(x) - Phi((x - mean)/sd)|.
double ks_distance_normal(std::span<const double> samples, double mean, double sd);

struct OracleCheck {
  double mean = 0.0;
  double variance = 0.0;
  double ks_distance = 0.0;
  /// 1% critical value 1.63 / sqrt(M).
  double critical = 0.0;
  bool pass = false;
};

/// KS comparison with the exact normal law of the linear equation (f off, constant sigma):
/// mean (G_t u0)(x*), variance c0^2 kernel_energy(x*, t*).
OracleCheck gaussian_oracle_check(std::span<const double> samples, double x_star, double t_star,
                                  const Eigen::VectorXd& u0, const ModelParams& params, const SpectralBasis& basis);

void write_samples_csv(std::ostream& os, std::span<const double> samples);
void write_kde_csv(std::ostream& os, const DensityReport& report);
/// Key-value text block.
void write_diagnostics(std::ostream& os, const DensityReport& report, const std::optional<OracleCheck>& oracle);

}  // namespace chlab
