#pragma once

// Bit-level layout of one x8 DRAM rank: a 64-byte cache line is moved as
// 8 bursts of 64 bits, and each of the 8 chips carries one byte per burst.
// The 64 bits a single chip sees over the 8 bursts form a ChipWord, the unit
// every encoder works on.

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "dramenc/error.hpp"

namespace dramenc {

inline constexpr int kChips = 8;
inline constexpr int kBursts = 8;
inline constexpr int kLanes = 8;
inline constexpr std::size_t kLineBytes = 64;

/// Bit b*8+l is lane l during burst b. Burst 0 is the least-significant byte.
using ChipWord = std::uint64_t;

using CacheLine = std::array<std::uint8_t, kLineBytes>;
using ChipWords = std::array<ChipWord, kChips>;

constexpr int popcount(ChipWord w) noexcept { return std::popcount(w); }

constexpr std::uint8_t burst_byte(ChipWord w, int burst) noexcept {
  return static_cast<std::uint8_t>(w >> (8 * burst));
}

constexpr int chip_of_byte(std::size_t offset) noexcept { return static_cast<int>(offset % kChips); }
constexpr int burst_of_byte(std::size_t offset) noexcept { return static_cast<int>(offset / kChips); }

/// Byte j of the line goes to chip j%8, burst j/8.
constexpr ChipWords split_cache_line(const CacheLine& line) noexcept {
  ChipWords words{};
  for (std::size_t j = 0; j < kLineBytes; ++j) {
    words[chip_of_byte(j)] |= ChipWord{line[j]} << (8 * burst_of_byte(j));
  }
  return words;
}

constexpr CacheLine merge_chip_words(const ChipWords& words) noexcept {
  CacheLine line{};
  for (std::size_t j = 0; j < kLineBytes; ++j) {
    line[j] = burst_byte(words[chip_of_byte(j)], burst_of_byte(j));
  }
  return line;
}

enum class MaskKind : std::uint8_t { kTruncation, kTolerance };

struct BitMask {
  ChipWord bits = 0;
  MaskKind kind = MaskKind::kTruncation;

  friend bool operator==(const BitMask&, const BitMask&) = default;
};

/// Truncation sets the `bits_per_value` LSBs of every `value_width`-bit chunk,
/// tolerance sets the MSBs. Chunks tile the word from bit 0.
BitMask build_mask(MaskKind kind, int value_width, int bits_per_value);

/// Per-chip masks, since a value-aware mask depends on which bytes each chip
/// receives.
struct ChipMasks {
  std::array<ChipWord, kChips> truncation{};
  std::array<ChipWord, kChips> tolerance{};

  static ChipMasks uniform(ChipWord truncation, ChipWord tolerance) noexcept {
    ChipMasks m;
    m.truncation.fill(truncation);
    m.tolerance.fill(tolerance);
    return m;
  }
  friend bool operator==(const ChipMasks&, const ChipMasks&) = default;
};

/// Maps a per-value bit pattern through the byte->chip layout. `value_mask`
/// is applied to every little-endian `value_bytes`-byte value of the line.
std::array<ChipWord, kChips> layout_value_mask(std::uint64_t value_mask, int value_bytes);

/// Sign and exponent of every little-endian float32 in the line.
std::array<ChipWord, kChips> float32_tolerance_masks();

/// Low `bits` mantissa bits of every little-endian float32 in the line.
std::array<ChipWord, kChips> float32_truncation_masks(int bits);

enum class ToleranceMode : std::uint8_t { kNone, kEighth, kQuarter, kFloat32 };

std::string_view to_string(ToleranceMode mode);
ToleranceMode tolerance_mode_from_string(std::string_view s);

/// Knobs of the approximate encoder.
struct ApproxConfig {
  int similarity_limit_bits = 13;
  int value_width = 8;
  int trunc_bits_per_value = 0;
  ToleranceMode tol_mode = ToleranceMode::kNone;
  bool approx_allowed = true;

  /// Throws ConfigError on out-of-range knobs.
  void validate() const;

  /// Tolerance bits per value implied by tol_mode (0 for kNone and kFloat32).
  int tol_bits_per_value() const;

  /// Resolves the knobs into masks. Float32 mode uses the IEEE-754 layout and
  /// treats truncation as mantissa LSBs; other modes tile chunks per chip word.
  /// Streams with approximation disabled get empty masks.
  ChipMasks masks() const;

  friend bool operator==(const ApproxConfig&, const ApproxConfig&) = default;
};

/// Similarity presets: percent of matching bits -> maximum differing bits.
/// Only 90/80/75/70 are defined; anything else throws ConfigError.
int similarity_preset_bits(int percent);

}  // namespace dramenc
