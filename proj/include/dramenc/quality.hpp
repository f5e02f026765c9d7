#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "dramenc/codec.hpp"
#include "dramenc/framelog.hpp"
#include "dramenc/trace.hpp"

namespace dramenc {

/// 10*log10(255^2 / MSE) over every sample; +inf for identical rasters.
/// Throws std::invalid_argument when dimensions or channel counts differ.
double psnr(const Image& ref, const Image& test);
double psnr(std::span<const std::uint8_t> ref, std::span<const std::uint8_t> test);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

/// Mean SSIM over all fully-inside Gaussian windows of the luma planes. If the
/// image is smaller than the window, one global window with uniform weights
/// is used instead.
double ssim(const Image& ref, const Image& test, const SsimParams& p = {});
double ssim(std::span<const double> ref, std::span<const double> test, std::uint32_t width, std::uint32_t height,
            const SsimParams& p = {});

/// Frame-type tallies, indexed by FrameType's value.
using FrameTally = std::array<std::uint64_t, 4>;

struct FrameMix {
  std::array<FrameTally, kChips> per_chip{};
  FrameTally total{};

  void add(int chip, FrameType t) noexcept {
    ++per_chip[static_cast<std::size_t>(chip)][static_cast<std::size_t>(t)];
    ++total[static_cast<std::size_t>(t)];
  }
  std::uint64_t frames() const noexcept { return total[0] + total[1] + total[2] + total[3]; }
  /// Throws std::domain_error when no frames were tallied.
  double fraction(FrameType t) const;
  double chip_fraction(int chip, FrameType t) const;

  FrameMix& operator+=(const FrameMix& o) noexcept;
};

/// Throws std::domain_error on an empty log.
FrameMix frame_stats(std::span<const FrameRecord> log);

}  // namespace dramenc
