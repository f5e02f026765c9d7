#pragma once

// Per-chip frame records, for audits and encoding-frequency statistics.
//
// Binary layout, little-endian: "DFLG" u16 version u16 reserved, then
// 20-byte records
//   u8 frame_type u8 chip u8 dbi_flags u8 index (0xFF = none) u8 sideband
//   u8[3] reserved u32 config_id u64 payload
// JSON-lines layout: one object per record with the same fields, words as
// 0x-prefixed hex.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dramenc/codec.hpp"

namespace dramenc {

struct FrameRecord {
  std::uint8_t chip = 0;
  std::uint32_t config_id = 0;
  Frame frame;

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

inline constexpr std::size_t kFrameRecordBytes = 20;
inline constexpr std::uint16_t kFrameLogVersion = 1;

void append_record(std::vector<std::uint8_t>& out, const FrameRecord& r);
std::vector<std::uint8_t> encode_frame_log(std::span<const FrameRecord> records);
std::vector<FrameRecord> decode_frame_log(std::span<const std::uint8_t> bytes);

std::string to_jsonl(const FrameRecord& r);
FrameRecord from_jsonl(const std::string& line);

void write_frame_log(const std::filesystem::path& path, std::span<const FrameRecord> records);
std::vector<FrameRecord> read_frame_log(const std::filesystem::path& path);
void write_frame_log_jsonl(const std::filesystem::path& path, std::span<const FrameRecord> records);
std::vector<FrameRecord> read_frame_log_jsonl(const std::filesystem::path& path);

}  // namespace dramenc
