#pragma once

#include <cstdint>
#include <iomanip>
#include <ostream>
#include <string>

namespace chlab {

/// First line of every CSV artifact.
inline void write_preamble(std::ostream& os, const std::string& config_digest, std::uint64_t master_seed) {
  os << "# config_digest=" << config_digest << " master_seed=" << master_seed << '\n';
}

/// Sets the stream to round-trip doubles (17 significant digits).
inline std::ostream& full_precision(std::ostream& os) {
  os << std::setprecision(17);
  return os;
}

}  // namespace chlab
