#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dramenc {

/// "0x" followed by 16 lowercase hex digits.
std::string hex64(std::uint64_t v);
std::string hex8(std::uint8_t v);

/// Accepts an optional 0x prefix. Throws InputError on bad digits or overflow.
std::uint64_t parse_hex64(std::string_view s);

}  // namespace dramenc
