#include "chlab/noise.hpp"

#include "chlab/errors.hpp"

#include <cmath>

namespace chlab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

// Domain-separation tag for seed derivation, distinct from any noise counter layout.
constexpr std::uint32_t kStreamTag = 0x53545245u;

Philox4x32::Key key_of(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

std::uint64_t join(std::uint32_t lo, std::uint32_t hi) {
  return static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32);
}

// Uniform on the open interval (0, 1) with 53 random bits.
double open_unit(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53; }

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t stream_for_replicate(std::uint64_t master_seed, std::uint64_t r) {
  const auto out = Philox4x32::block(
      {static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32), kStreamTag, 0u}, key_of(master_seed));
  return join(out[0], out[1]);
}

NoiseRealization NoiseRealization::generate(const GridSpec& grid, std::uint64_t seed, std::uint64_t replicate_id) {
  const int nt = grid.nt();
  const int nx = grid.nx();
  const double scale = std::sqrt(grid.dt() * grid.dx());
  const auto key = key_of(seed);
  const auto rep_lo = static_cast<std::uint32_t>(replicate_id);
  const auto rep_hi = static_cast<std::uint32_t>(replicate_id >> 32);

  RowMatrix dw(nt, nx);
  double* out = dw.data();
  const std::uint64_t cells = static_cast<std::uint64_t>(nt) * static_cast<std::uint64_t>(nx);
  // One Philox block -> two uniforms -> two normals (Box-Muller).
  for (std::uint64_t pair = 0; 2 * pair < cells; ++pair) {
    const auto bits = Philox4x32::block(
        {static_cast<std::uint32_t>(pair), static_cast<std::uint32_t>(pair >> 32), rep_lo, rep_hi}, key);
    const double u1 = open_unit(join(bits[0], bits[1]));
    const double u2 = open_unit(join(bits[2], bits[3]));
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    out[2 * pair] = scale * radius * std::cos(angle);
    if (2 * pair + 1 < cells) out[2 * pair + 1] = scale * radius * std::sin(angle);
  }
  return NoiseRealization(grid, seed, replicate_id, std::move(dw));
}

NoiseRealization NoiseRealization::perturbed(int m, int j, double delta) const {
  if (m < 0 || m >= grid_.nt() || j < 0 || j >= grid_.nx()) throw ContractError("noise cell out of range");
  NoiseRealization copy = *this;
  copy.dw_(m, j) += delta;
  return copy;
}

NoiseRealization NoiseRealization::silent(const GridSpec& grid) {
  return NoiseRealization(grid, 0, 0, RowMatrix::Zero(grid.nt(), grid.nx()));
}

}  // namespace chlab
