#include "dramenc/quality.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace dramenc {

namespace {

void require_same_shape(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels || a.size() != b.size()) {
    throw std::invalid_argument("images differ in dimensions or channel count");
  }
}

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(static_cast<std::size_t>(size));
  const double c = (size - 1) / 2.0;
  double sum = 0;
  for (int i = 0; i < size; ++i) {
    k[static_cast<std::size_t>(i)] = std::exp(-(i - c) * (i - c) / (2 * sigma * sigma));
    sum += k[static_cast<std::size_t>(i)];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Valid-mode separable filter of a w x h plane.
std::vector<double> filter_valid(const std::vector<double>& img, std::size_t w, std::size_t h,
                                 const std::vector<double>& k) {
  const std::size_t n = k.size();
  const std::size_t ow = w - n + 1;
  const std::size_t oh = h - n + 1;
  std::vector<double> rows(ow * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * img[y * w + x + i];
      rows[y * ow + x] = acc;
    }
  }
  std::vector<double> out(ow * oh);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * rows[(y + i) * ow + x];
      out[y * ow + x] = acc;
    }
  }
  return out;
}

double ssim_from_moments(double mx, double my, double vx, double vy, double cxy, double c1, double c2) {
  return ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
}

}  // namespace

double psnr(std::span<const std::uint8_t> ref, std::span<const std::uint8_t> test) {
  if (ref.size() != test.size()) throw std::invalid_argument("sample counts differ");
  if (ref.empty()) throw std::invalid_argument("empty raster");
  double se = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = static_cast<double>(ref[i]) - static_cast<double>(test[i]);
    se += d * d;
  }
  if (se == 0) return std::numeric_limits<double>::infinity();
  const double mse = se / static_cast<double>(ref.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double psnr(const Image& ref, const Image& test) {
  require_same_shape(ref, test);
  return psnr(std::span<const std::uint8_t>(ref.pixels), std::span<const std::uint8_t>(test.pixels));
}

double ssim(std::span<const double> ref, std::span<const double> test, std::uint32_t width, std::uint32_t height,
            const SsimParams& p) {
  const std::size_t n = std::size_t{width} * height;
  if (ref.size() != n || test.size() != n) throw std::invalid_argument("planes differ from stated dimensions");
  if (n == 0) throw std::invalid_argument("empty plane");
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
  const auto win = static_cast<std::uint32_t>(p.window);

  if (width < win || height < win) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += ref[i];
      my += test[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double vx = 0, vy = 0, cxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      vx += (ref[i] - mx) * (ref[i] - mx);
      vy += (test[i] - my) * (test[i] - my);
      cxy += (ref[i] - mx) * (test[i] - my);
    }
    const auto nd = static_cast<double>(n);
    return ssim_from_moments(mx, my, vx / nd, vy / nd, cxy / nd, c1, c2);
  }

  const auto k = gaussian_kernel(p.window, p.sigma);
  std::vector<double> x(ref.begin(), ref.end());
  std::vector<double> y(test.begin(), test.end());
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = filter_valid(x, width, height, k);
  const auto my = filter_valid(y, width, height, k);
  const auto sxx = filter_valid(xx, width, height, k);
  const auto syy = filter_valid(yy, width, height, k);
  const auto sxy = filter_valid(xy, width, height, k);
  double total = 0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    total += ssim_from_moments(mx[i], my[i], sxx[i] - mx[i] * mx[i], syy[i] - my[i] * my[i],
                               sxy[i] - mx[i] * my[i], c1, c2);
  }
  return total / static_cast<double>(mx.size());
}

double ssim(const Image& ref, const Image& test, const SsimParams& p) {
  require_same_shape(ref, test);
  const auto a = luminance(ref);
  const auto b = luminance(test);
  return ssim(a, b, ref.width, ref.height, p);
}

double FrameMix::fraction(FrameType t) const {
  const auto n = frames();
  if (n == 0) throw std::domain_error("no frames tallied");
  return static_cast<double>(total[static_cast<std::size_t>(t)]) / static_cast<double>(n);
}

double FrameMix::chip_fraction(int chip, FrameType t) const {
  const auto& c = per_chip.at(static_cast<std::size_t>(chip));
  const auto n = c[0] + c[1] + c[2] + c[3];
  if (n == 0) throw std::domain_error("no frames tallied for chip");
  return static_cast<double>(c[static_cast<std::size_t>(t)]) / static_cast<double>(n);
}

FrameMix& FrameMix::operator+=(const FrameMix& o) noexcept {
  for (std::size_t c = 0; c < kChips; ++c) {
    for (std::size_t t = 0; t < 4; ++t) per_chip[c][t] += o.per_chip[c][t];
  }
  for (std::size_t t = 0; t < 4; ++t) total[t] += o.total[t];
  return *this;
}

FrameMix frame_stats(std::span<const FrameRecord> log) {
  if (log.empty()) throw std::domain_error("empty frame log");
  FrameMix mix;
  for (const auto& r : log) {
    if (r.chip >= kChips) throw std::invalid_argument("frame record chip out of range");
    mix.add(r.chip, r.frame.type);
  }
  return mix;
}

}  // namespace dramenc
