#include "dramenc/trace.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <png.h>

#include "dramenc/error.hpp"

namespace dramenc {

namespace fs = std::filesystem;

std::string_view to_string(TraceKind k) {
  switch (k) {
    case TraceKind::kRaw: return "raw";
    case TraceKind::kImage: return "image";
    case TraceKind::kTensorF32: return "tensor_f32";
  }
  return "raw";
}

TraceKind trace_kind_from_string(std::string_view s) {
  if (s == "raw") return TraceKind::kRaw;
  if (s == "image") return TraceKind::kImage;
  if (s == "tensor_f32") return TraceKind::kTensorF32;
  throw InputError("unknown trace kind '" + std::string(s) + "'");
}

std::vector<CacheLine> chunk_lines(std::span<const std::uint8_t> bytes) {
  std::vector<CacheLine> lines((bytes.size() + kLineBytes - 1) / kLineBytes, CacheLine{});
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t n = std::min(kLineBytes, bytes.size() - i * kLineBytes);
    std::memcpy(lines[i].data(), bytes.data() + i * kLineBytes, n);
  }
  return lines;
}

namespace {

std::uint32_t pad_for(std::size_t n) {
  return static_cast<std::uint32_t>((kLineBytes - n % kLineBytes) % kLineBytes);
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw InputError("read failure on '" + path.string() + "'");
  return data;
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failure on '" + path.string() + "'");
}

// ---- PNM ----

struct PnmCursor {
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;

  void skip_space_and_comments() {
    while (pos < buf.size()) {
      if (buf[pos] == '#') {
        while (pos < buf.size() && buf[pos] != '\n') ++pos;
      } else if (std::isspace(buf[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  }

  std::uint32_t number(const char* what) {
    skip_space_and_comments();
    std::uint64_t v = 0;
    const std::size_t start = pos;
    while (pos < buf.size() && std::isdigit(buf[pos])) {
      v = v * 10 + (buf[pos++] - '0');
      if (v > 0xFFFFFFFFu) break;
    }
    if (pos == start || v > 0xFFFFFFFFu) throw InputError(fmt::format("bad PNM {} at byte {}", what, start));
    return static_cast<std::uint32_t>(v);
  }
};

Image read_pnm(const std::vector<std::uint8_t>& buf, const fs::path& path) {
  Image img;
  img.channels = buf[1] == '5' ? 1 : 3;
  PnmCursor cur{buf, 2};
  img.width = cur.number("width");
  img.height = cur.number("height");
  const std::uint32_t maxval = cur.number("maxval");
  if (maxval == 0 || maxval > 255) {
    throw InputError(fmt::format("'{}': unsupported bit depth (maxval {}), only 8-bit channels are handled",
                                 path.string(), maxval));
  }
  if (cur.pos >= buf.size() || !std::isspace(buf[cur.pos])) {
    throw InputError(fmt::format("'{}': missing separator after PNM header at byte {}", path.string(), cur.pos));
  }
  ++cur.pos;
  const std::size_t n = std::size_t{img.width} * img.height * img.channels;
  if (buf.size() - cur.pos < n) {
    throw InputError(fmt::format("'{}': truncated raster, expected {} bytes after offset {}", path.string(), n,
                                 cur.pos));
  }
  img.pixels.assign(buf.begin() + static_cast<std::ptrdiff_t>(cur.pos),
                    buf.begin() + static_cast<std::ptrdiff_t>(cur.pos + n));
  return img;
}

// ---- PNG ----

Image read_png(const fs::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw InputError(fmt::format("'{}': {}", path.string(), png.message));
  }
  // 16-bit data is not an 8-bit raster; refuse rather than silently requantize
  if (png.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&png);
    throw InputError(fmt::format("'{}': unsupported bit depth (16-bit PNG)", path.string()));
  }
  const bool color = png.format & PNG_FORMAT_FLAG_COLOR;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  Image img;
  img.width = png.width;
  img.height = png.height;
  img.channels = color ? 3 : 1;
  img.pixels.resize(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, img.pixels.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw InputError(fmt::format("'{}': {}", path.string(), msg));
  }
  return img;
}

// ---- little-endian helpers ----

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(std::uint64_t{v} >> (8 * i)));
}

template <typename T>
T get_le(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (in.size() - pos < sizeof(T)) throw InputError(fmt::format("trace header truncated at byte {}", pos));
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t{in[pos + i]} << (8 * i);
  pos += sizeof(T);
  return static_cast<T>(v);
}

constexpr char kMagic[4] = {'D', 'T', 'R', 'C'};
constexpr std::string_view kHexTag = "# dramenc-trace";

void check_meta(const TraceMeta& m, std::size_t lines) {
  if (m.element_bits == 0 || m.element_bits % 8 != 0) throw InputError("element width must be whole bytes");
  if (m.pad_bytes >= kLineBytes && !(lines == 0 && m.pad_bytes == 0)) {
    throw InputError(fmt::format("pad length {} is not below one cache line", m.pad_bytes));
  }
  if (lines * kLineBytes < m.pad_bytes || lines * kLineBytes - m.pad_bytes != m.payload_bytes()) {
    throw InputError(fmt::format("trace holds {} lines ({} pad bytes) but metadata describes {} bytes", lines,
                                 m.pad_bytes, m.payload_bytes()));
  }
}

TraceStream read_binary_trace(const std::vector<std::uint8_t>& buf) {
  std::size_t pos = 4;
  TraceStream s;
  const auto version = get_le<std::uint16_t>(buf, pos);
  if (version != kTraceVersion) throw InputError(fmt::format("unsupported trace version {} at byte 4", version));
  const auto kind = get_le<std::uint8_t>(buf, pos);
  if (kind > 2) throw InputError(fmt::format("bad trace kind {} at byte 6", kind));
  s.meta.kind = static_cast<TraceKind>(kind);
  s.meta.approx_allowed = get_le<std::uint8_t>(buf, pos) != 0;
  s.meta.width = get_le<std::uint32_t>(buf, pos);
  s.meta.height = get_le<std::uint32_t>(buf, pos);
  s.meta.channels = get_le<std::uint32_t>(buf, pos);
  s.meta.element_bits = get_le<std::uint32_t>(buf, pos);
  s.meta.pad_bytes = get_le<std::uint32_t>(buf, pos);
  const auto count = get_le<std::uint64_t>(buf, pos);
  if ((buf.size() - pos) / kLineBytes < count || (buf.size() - pos) != count * kLineBytes) {
    throw InputError(fmt::format("trace body at byte {} holds {} bytes, header promises {} lines", pos,
                                 buf.size() - pos, count));
  }
  check_meta(s.meta, count);
  s.lines.resize(count);
  for (auto& line : s.lines) {
    std::memcpy(line.data(), buf.data() + pos, kLineBytes);
    pos += kLineBytes;
  }
  return s;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

TraceStream read_hex_trace(const std::vector<std::uint8_t>& buf) {
  std::istringstream in(std::string(buf.begin(), buf.end()));
  std::string line;
  std::getline(in, line);
  TraceStream s;
  std::istringstream header(line.substr(kHexTag.size()));
  std::string tok;
  header >> tok;
  if (tok != "v1") throw InputError("line 1: unsupported hex trace version '" + tok + "'");
  std::uint64_t declared = 0;
  while (header >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw InputError("line 1: expected key=value, got '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    try {
      if (key == "kind") s.meta.kind = trace_kind_from_string(val);
      else if (key == "width") s.meta.width = static_cast<std::uint32_t>(std::stoul(val));
      else if (key == "height") s.meta.height = static_cast<std::uint32_t>(std::stoul(val));
      else if (key == "channels") s.meta.channels = static_cast<std::uint32_t>(std::stoul(val));
      else if (key == "element_bits") s.meta.element_bits = static_cast<std::uint32_t>(std::stoul(val));
      else if (key == "approx_allowed") s.meta.approx_allowed = val == "1";
      else if (key == "pad_bytes") s.meta.pad_bytes = static_cast<std::uint32_t>(std::stoul(val));
      else if (key == "lines") declared = std::stoull(val);
      else throw InputError("line 1: unknown header key '" + key + "'");
    } catch (const std::logic_error&) {
      throw InputError("line 1: bad value for '" + key + "'");
    }
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (line.size() != 2 * kLineBytes) {
      throw InputError(fmt::format("line {}: expected {} hex digits, got {}", lineno, 2 * kLineBytes, line.size()));
    }
    CacheLine cl{};
    for (std::size_t i = 0; i < kLineBytes; ++i) {
      const int hi = hex_digit(line[2 * i]);
      const int lo = hex_digit(line[2 * i + 1]);
      if (hi < 0 || lo < 0) throw InputError(fmt::format("line {}: bad hex digit at column {}", lineno, 2 * i + 1));
      cl[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    s.lines.push_back(cl);
  }
  if (declared != s.lines.size()) {
    throw InputError(fmt::format("header declares {} lines, file holds {}", declared, s.lines.size()));
  }
  check_meta(s.meta, s.lines.size());
  return s;
}

}  // namespace

std::vector<std::uint8_t> stream_bytes(const TraceStream& s) {
  std::vector<std::uint8_t> out;
  out.reserve(s.lines.size() * kLineBytes);
  for (const auto& l : s.lines) out.insert(out.end(), l.begin(), l.end());
  if (s.meta.pad_bytes > out.size()) throw InputError("pad length exceeds stream size");
  out.resize(out.size() - s.meta.pad_bytes);
  return out;
}

TraceStream image_to_cache_lines(const Image& img, bool approx_allowed) {
  if (img.channels != 1 && img.channels != 3) throw InputError("only grayscale and RGB images are supported");
  if (img.pixels.size() != std::size_t{img.width} * img.height * img.channels) {
    throw InputError("image raster size does not match its dimensions");
  }
  TraceStream s;
  s.meta = {TraceKind::kImage, img.width, img.height, img.channels, 8, approx_allowed, pad_for(img.pixels.size())};
  s.lines = chunk_lines(img.pixels);
  return s;
}

Image cache_lines_to_image(const TraceStream& s) {
  if (s.meta.kind != TraceKind::kImage) throw InputError("stream is not an image trace");
  if (s.meta.element_bits != 8) throw InputError("image traces must carry 8-bit channels");
  check_meta(s.meta, s.lines.size());
  return {s.meta.width, s.meta.height, s.meta.channels, stream_bytes(s)};
}

TraceStream tensor_f32_to_cache_lines(std::span<const float> values, bool approx_allowed) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(values.size() * 4);
  for (float f : values) put_le(bytes, std::bit_cast<std::uint32_t>(f));
  TraceStream s;
  s.meta = {TraceKind::kTensorF32, static_cast<std::uint32_t>(values.size()), 1, 1, 32, approx_allowed,
            pad_for(bytes.size())};
  s.lines = chunk_lines(bytes);
  return s;
}

std::vector<float> cache_lines_to_tensor_f32(const TraceStream& s) {
  if (s.meta.kind != TraceKind::kTensorF32) throw InputError("stream is not a float32 tensor trace");
  check_meta(s.meta, s.lines.size());
  const auto bytes = stream_bytes(s);
  std::vector<float> out(bytes.size() / 4);
  std::size_t pos = 0;
  for (auto& f : out) f = std::bit_cast<float>(get_le<std::uint32_t>(bytes, pos));
  return out;
}

TraceStream bytes_to_cache_lines(std::span<const std::uint8_t> bytes, bool approx_allowed) {
  TraceStream s;
  s.meta = {TraceKind::kRaw, static_cast<std::uint32_t>(bytes.size()), 1, 1, 8, approx_allowed,
            pad_for(bytes.size())};
  s.lines = chunk_lines(bytes);
  return s;
}

TraceStream raw_to_cache_lines(const fs::path& path, bool approx_allowed) {
  const auto bytes = read_file(path);
  if (bytes.size() > 0xFFFFFFFFu) throw InputError("'" + path.string() + "' is too large for one trace");
  return bytes_to_cache_lines(bytes, approx_allowed);
}

Image read_image(const fs::path& path) {
  const auto buf = read_file(path);
  if (buf.size() >= 2 && buf[0] == 'P' && (buf[1] == '5' || buf[1] == '6')) return read_pnm(buf, path);
  if (buf.size() >= 8 && png_sig_cmp(buf.data(), 0, 8) == 0) return read_png(path);
  throw InputError("'" + path.string() + "' is not a binary PGM/PPM or PNG image");
}

void write_pnm(const fs::path& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3) throw InputError("PNM output needs 1 or 3 channels");
  const std::string header = fmt::format("P{}\n{} {}\n255\n", img.channels == 1 ? 5 : 6, img.width, img.height);
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  write_file(path, out);
}

std::vector<double> luminance(const Image& img) {
  if (img.channels == 1) return {img.pixels.begin(), img.pixels.end()};
  std::vector<double> y(std::size_t{img.width} * img.height);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto* p = &img.pixels[i * 3];
    y[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  }
  return y;
}

void write_trace(const fs::path& path, const TraceStream& s, TraceFormat format) {
  check_meta(s.meta, s.lines.size());
  if (format == TraceFormat::kBinary) {
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put_le(out, kTraceVersion);
    put_le(out, static_cast<std::uint8_t>(s.meta.kind));
    put_le(out, static_cast<std::uint8_t>(s.meta.approx_allowed ? 1 : 0));
    put_le(out, s.meta.width);
    put_le(out, s.meta.height);
    put_le(out, s.meta.channels);
    put_le(out, s.meta.element_bits);
    put_le(out, s.meta.pad_bytes);
    put_le(out, static_cast<std::uint64_t>(s.lines.size()));
    for (const auto& l : s.lines) out.insert(out.end(), l.begin(), l.end());
    write_file(path, out);
    return;
  }
  std::string text = fmt::format(
      "{} v1 kind={} width={} height={} channels={} element_bits={} approx_allowed={} pad_bytes={} lines={}\n",
      kHexTag, to_string(s.meta.kind), s.meta.width, s.meta.height, s.meta.channels, s.meta.element_bits,
      s.meta.approx_allowed ? 1 : 0, s.meta.pad_bytes, s.lines.size());
  text.reserve(text.size() + s.lines.size() * (2 * kLineBytes + 1));
  for (const auto& l : s.lines) {
    for (auto b : l) fmt::format_to(std::back_inserter(text), "{:02x}", b);
    text.push_back('\n');
  }
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

TraceStream read_trace(const fs::path& path) {
  const auto buf = read_file(path);
  if (buf.size() >= 4 && std::equal(std::begin(kMagic), std::end(kMagic), buf.begin())) {
    return read_binary_trace(buf);
  }
  if (buf.size() >= kHexTag.size() && std::equal(kHexTag.begin(), kHexTag.end(), buf.begin())) {
    return read_hex_trace(buf);
  }
  throw InputError("'" + path.string() + "': bad magic at byte 0, not a dramenc trace");
}

}  // namespace dramenc
