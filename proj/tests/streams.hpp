#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace teststreams {

enum class Shape { kUniform, kRepeats, kNearDuplicates, kZeros, kMixed };

/// Chip-word stream with the requested kind of redundancy.
inline std::vector<std::uint64_t> make(Shape shape, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> out;
  out.reserve(n);
  std::vector<std::uint64_t> pool;
  for (int i = 0; i < 24; ++i) pool.push_back(rng() & rng());
  auto flip_few = [&](std::uint64_t w) {
    const int flips = static_cast<int>(rng() % 12);
    for (int i = 0; i < flips; ++i) w ^= std::uint64_t{1} << (rng() % 64);
    return w;
  };
  for (std::size_t i = 0; i < n; ++i) {
    Shape s = shape;
    if (s == Shape::kMixed) s = static_cast<Shape>(rng() % 4);
    switch (s) {
      case Shape::kUniform: out.push_back(rng()); break;
      case Shape::kRepeats: out.push_back(pool[rng() % pool.size()]); break;
      case Shape::kNearDuplicates: out.push_back(flip_few(pool[rng() % pool.size()])); break;
      case Shape::kZeros: out.push_back((rng() % 8) ? 0 : rng() & 0xFF); break;
      case Shape::kMixed: break;
    }
  }
  return out;
}

}  // namespace teststreams
