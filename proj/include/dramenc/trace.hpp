#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "dramenc/core.hpp"

namespace dramenc {

enum class TraceKind : std::uint8_t { kRaw = 0, kImage = 1, kTensorF32 = 2 };

std::string_view to_string(TraceKind k);
TraceKind trace_kind_from_string(std::string_view s);

struct TraceMeta {
  TraceKind kind = TraceKind::kRaw;
  std::uint32_t width = 0;     // pixels, or element count for tensors/raw bytes
  std::uint32_t height = 1;
  std::uint32_t channels = 1;  // 1 gray, 3 RGB
  std::uint32_t element_bits = 8;
  bool approx_allowed = true;
  std::uint32_t pad_bytes = 0;

  std::uint64_t payload_bytes() const noexcept {
    return std::uint64_t{width} * height * channels * (element_bits / 8);
  }
  friend bool operator==(const TraceMeta&, const TraceMeta&) = default;
};

/// A stream of cache lines plus what is needed to turn it back into data.
struct TraceStream {
  TraceMeta meta;
  std::vector<CacheLine> lines;

  friend bool operator==(const TraceStream&, const TraceStream&) = default;
};

/// 8-bit raster, row-major, channels interleaved R,G,B.
struct Image {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t channels = 1;
  std::vector<std::uint8_t> pixels;

  std::size_t size() const noexcept { return pixels.size(); }
  friend bool operator==(const Image&, const Image&) = default;
};

/// Chunks bytes into 64-byte lines, zero-padding the tail.
std::vector<CacheLine> chunk_lines(std::span<const std::uint8_t> bytes);
/// Concatenated line bytes with the recorded padding removed.
std::vector<std::uint8_t> stream_bytes(const TraceStream& s);

TraceStream image_to_cache_lines(const Image& img, bool approx_allowed = true);
Image cache_lines_to_image(const TraceStream& s);

/// Little-endian float32 serialization.
TraceStream tensor_f32_to_cache_lines(std::span<const float> values, bool approx_allowed = true);
std::vector<float> cache_lines_to_tensor_f32(const TraceStream& s);

TraceStream bytes_to_cache_lines(std::span<const std::uint8_t> bytes, bool approx_allowed = true);
TraceStream raw_to_cache_lines(const std::filesystem::path& path, bool approx_allowed = true);

/// PGM (P5), PPM (P6) or PNG; 8-bit channels only.
Image read_image(const std::filesystem::path& path);
/// PGM for 1 channel, PPM for 3.
void write_pnm(const std::filesystem::path& path, const Image& img);

/// BT.601 luma, unrounded.
std::vector<double> luminance(const Image& img);

// Trace files. Binary layout, all little-endian:
//   "DTRC" u16 version u8 kind u8 approx_allowed
//   u32 width u32 height u32 channels u32 element_bits u32 pad_bytes u64 line_count
//   line_count x 64 raw bytes
// The hex layout starts with "# dramenc-trace v1 key=value ..." and then holds
// one line of 128 hex digits per cache line, bytes in memory order.
enum class TraceFormat : std::uint8_t { kBinary, kHex };

inline constexpr std::uint16_t kTraceVersion = 1;

void write_trace(const std::filesystem::path& path, const TraceStream& s, TraceFormat fmt = TraceFormat::kBinary);
/// Detects the format from the first bytes. Throws InputError with the byte
/// offset or line number of the first problem.
TraceStream read_trace(const std::filesystem::path& path);

}  // namespace dramenc
