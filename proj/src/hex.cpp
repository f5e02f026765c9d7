#include "dramenc/hex.hpp"

#include <charconv>

#include <fmt/format.h>

#include "dramenc/error.hpp"

namespace dramenc {

std::string hex64(std::uint64_t v) { return fmt::format("0x{:016x}", v); }

std::string hex8(std::uint8_t v) { return fmt::format("0x{:02x}", v); }

std::uint64_t parse_hex64(std::string_view s) {
  if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InputError("bad hex value '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace dramenc
