#pragma once

#include "chlab/spectral.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>

namespace chlab {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key);
};

/// Derives the seed of replicate r from the master seed; pure function of (master, r).
std::uint64_t stream_for_replicate(std::uint64_t master_seed, std::uint64_t r);

/// Discrete space-time white noise on a solver grid: dW[m][j] ~ N(0, dt*dx), independent.
///
/// Cell (m, j) is drawn from the Philox block addressed by (cell, replicate_id)
/// under key = seed, so regeneration is bit-exact and order-free.
class NoiseRealization {
 public:
  static NoiseRealization generate(const GridSpec& grid, std::uint64_t seed, std::uint64_t replicate_id);

  const GridSpec& grid() const { return grid_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t replicate_id() const { return replicate_id_; }

  double operator()(int m, int j) const { return dw_(m, j); }
  auto row(int m) const { return dw_.row(m); }
  const RowMatrix& increments() const { return dw_; }

  /// Copy with dW[m][j] shifted by delta (directional-derivative checks).
  NoiseRealization perturbed(int m, int j, double delta) const;

  /// Same shape with every increment set to zero.
  static NoiseRealization silent(const GridSpec& grid);

 private:
  NoiseRealization(const GridSpec& grid, std::uint64_t seed, std::uint64_t replicate_id, RowMatrix dw)
      : grid_(grid), seed_(seed), replicate_id_(replicate_id), dw_(std::move(dw)) {}

  GridSpec grid_;
  std::uint64_t seed_;
  std::uint64_t replicate_id_;
  RowMatrix dw_;
};

}  // namespace chlab
