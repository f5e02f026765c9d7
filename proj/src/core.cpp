#include "dramenc/core.hpp"

#include <string>

namespace dramenc {

namespace {

bool valid_width(int w) { return w == 8 || w == 16 || w == 32 || w == 64; }

std::uint64_t low_bits(int n) { return n >= 64 ? ~0ULL : (1ULL << n) - 1; }

}  // namespace

BitMask build_mask(MaskKind kind, int value_width, int bits_per_value) {
  if (!valid_width(value_width)) {
    throw ConfigError("value width must be 8, 16, 32 or 64, got " + std::to_string(value_width));
  }
  if (bits_per_value < 0 || bits_per_value >= value_width) {
    throw ConfigError("bits per value must be in [0, " + std::to_string(value_width) + "), got " +
                      std::to_string(bits_per_value));
  }
  const std::uint64_t chunk = kind == MaskKind::kTruncation
                                  ? low_bits(bits_per_value)
                                  : low_bits(bits_per_value) << (value_width - bits_per_value);
  ChipWord bits = 0;
  for (int shift = 0; shift < 64; shift += value_width) bits |= chunk << shift;
  return {bits, kind};
}

std::array<ChipWord, kChips> layout_value_mask(std::uint64_t value_mask, int value_bytes) {
  if (value_bytes <= 0 || value_bytes > 8 || kLineBytes % value_bytes != 0) {
    throw ConfigError("value size must divide the cache line");
  }
  std::array<ChipWord, kChips> out{};
  for (std::size_t j = 0; j < kLineBytes; ++j) {
    const auto byte_in_value = static_cast<int>(j % value_bytes);
    const auto m = static_cast<std::uint8_t>(value_mask >> (8 * byte_in_value));
    out[chip_of_byte(j)] |= ChipWord{m} << (8 * burst_of_byte(j));
  }
  return out;
}

std::array<ChipWord, kChips> float32_tolerance_masks() {
  // bit 31 sign, bits 30..23 exponent
  return layout_value_mask(0xFF800000u, 4);
}

std::array<ChipWord, kChips> float32_truncation_masks(int bits) {
  if (bits < 0 || bits > 23) throw ConfigError("float32 truncation must stay within the 23 mantissa bits");
  return layout_value_mask(low_bits(bits), 4);
}

std::string_view to_string(ToleranceMode mode) {
  switch (mode) {
    case ToleranceMode::kNone: return "none";
    case ToleranceMode::kEighth: return "eighth";
    case ToleranceMode::kQuarter: return "quarter";
    case ToleranceMode::kFloat32: return "float32";
  }
  return "none";
}

ToleranceMode tolerance_mode_from_string(std::string_view s) {
  if (s == "none" || s == "0") return ToleranceMode::kNone;
  if (s == "eighth" || s == "8") return ToleranceMode::kEighth;
  if (s == "quarter" || s == "16") return ToleranceMode::kQuarter;
  if (s == "float32") return ToleranceMode::kFloat32;
  throw ConfigError("unknown tolerance mode '" + std::string(s) + "'");
}

int ApproxConfig::tol_bits_per_value() const {
  switch (tol_mode) {
    case ToleranceMode::kEighth: return value_width / 8;
    case ToleranceMode::kQuarter: return value_width / 4;
    default: return 0;
  }
}

void ApproxConfig::validate() const {
  if (similarity_limit_bits < 0 || similarity_limit_bits > 64) {
    throw ConfigError("similarity limit must be in [0, 64] bits, got " + std::to_string(similarity_limit_bits));
  }
  if (!valid_width(value_width)) {
    throw ConfigError("value width must be 8, 16, 32 or 64, got " + std::to_string(value_width));
  }
  if (trunc_bits_per_value < 0 || trunc_bits_per_value >= value_width) {
    throw ConfigError("truncation bits per value must be in [0, value width)");
  }
  if (tol_mode == ToleranceMode::kFloat32) {
    if (value_width != 32) throw ConfigError("float32 tolerance requires 32-bit values");
    if (trunc_bits_per_value > 23) throw ConfigError("float32 truncation must stay within the mantissa");
  } else if (trunc_bits_per_value + tol_bits_per_value() > value_width) {
    throw ConfigError("truncation and tolerance overlap");
  }
}

ChipMasks ApproxConfig::masks() const {
  validate();
  if (!approx_allowed) return {};
  if (tol_mode == ToleranceMode::kFloat32) {
    return {float32_truncation_masks(trunc_bits_per_value), float32_tolerance_masks()};
  }
  return ChipMasks::uniform(build_mask(MaskKind::kTruncation, value_width, trunc_bits_per_value).bits,
                            build_mask(MaskKind::kTolerance, value_width, tol_bits_per_value()).bits);
}

int similarity_preset_bits(int percent) {
  switch (percent) {
    case 90: return 7;
    case 80: return 13;
    case 75: return 16;
    case 70: return 20;
    default: throw ConfigError("no similarity preset for " + std::to_string(percent) + "%");
  }
}

}  // namespace dramenc
