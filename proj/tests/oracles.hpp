#pragma once

// Reference models used only by tests. Each one is written the slow, obvious
// way and must not call into the library code it is used to check.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

inline int bit_count(std::uint64_t w) {
  int n = 0;
  for (int i = 0; i < 64; ++i) n += static_cast<int>((w >> i) & 1u);
  return n;
}

/// Bit-by-bit layout: line byte j, bit k lands on chip j%8 at lane k of burst j/8.
inline std::array<std::uint64_t, 8> split(const std::array<std::uint8_t, 64>& line) {
  std::array<std::uint64_t, 8> w{};
  for (int j = 0; j < 64; ++j) {
    const int chip = j % 8;
    const int burst = j / 8;
    for (int lane = 0; lane < 8; ++lane) {
      if ((line[static_cast<std::size_t>(j)] >> lane) & 1u) {
        w[static_cast<std::size_t>(chip)] |= std::uint64_t{1} << (burst * 8 + lane);
      }
    }
  }
  return w;
}

struct Mse {
  int index;
  std::uint64_t entry;
  int weight;
};

/// Full scan, strictly-less comparison so the first minimum wins.
inline std::optional<Mse> mse_scan(const std::vector<std::uint64_t>& entries, std::uint64_t query,
                                   std::uint64_t trunc) {
  std::optional<Mse> best;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    int wt = 0;
    for (int b = 0; b < 64; ++b) {
      const bool masked = (trunc >> b) & 1u;
      const bool differ = ((entries[i] >> b) & 1u) != ((query >> b) & 1u);
      wt += (!masked && differ) ? 1 : 0;
    }
    if (!best || wt < best->weight) best = Mse{static_cast<int>(i), entries[i], wt};
  }
  return best;
}

/// Lays every driven bit of one line out as a time series and counts 1->0
/// adjacencies. `series[t]` is the line value at bit-time t, starting from an
/// implicit 0.
inline std::uint64_t falling_edges(const std::vector<int>& series) {
  std::uint64_t n = 0;
  int prev = 0;
  for (int v : series) {
    n += (prev == 1 && v == 0) ? 1 : 0;
    prev = v;
  }
  return n;
}

/// Exact expected DBI cost per uniformly random byte, by enumerating all 256
/// bytes: data ones after conditional inversion plus the flag bit.
/// Returned as a count over the 256 bytes (divide by 256 for the mean).
struct DbiEnumeration {
  int data_ones = 0;
  int flags = 0;
};

inline DbiEnumeration dbi_enumeration() {
  DbiEnumeration e;
  for (int v = 0; v < 256; ++v) {
    int k = 0;
    for (int b = 0; b < 8; ++b) k += (v >> b) & 1;
    if (k > 4) {
      e.data_ones += 8 - k;
      e.flags += 1;
    } else {
      e.data_ones += k;
    }
  }
  return e;
}

}  // namespace oracle
