#include "dramenc/framelog.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dramenc/hex.hpp"

namespace dramenc {

namespace {

constexpr char kMagic[4] = {'D', 'F', 'L', 'G'};
constexpr std::uint8_t kNoIndex = 0xFF;

void put(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get(std::span<const std::uint8_t> in, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t{in[pos + static_cast<std::size_t>(i)]} << (8 * i);
  return v;
}

}  // namespace

void append_record(std::vector<std::uint8_t>& out, const FrameRecord& r) {
  put(out, static_cast<std::uint8_t>(r.frame.type), 1);
  put(out, r.chip, 1);
  put(out, r.frame.dbi_flags, 1);
  put(out, r.frame.index.value_or(kNoIndex), 1);
  put(out, r.frame.sideband, 1);
  put(out, 0, 3);
  put(out, r.config_id, 4);
  put(out, r.frame.payload, 8);
}

std::vector<std::uint8_t> encode_frame_log(std::span<const FrameRecord> records) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put(out, kFrameLogVersion, 2);
  put(out, 0, 2);
  out.reserve(out.size() + records.size() * kFrameRecordBytes);
  for (const auto& r : records) append_record(out, r);
  return out;
}

std::vector<FrameRecord> decode_frame_log(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw InputError("frame log: bad magic at byte 0");
  }
  if (get(bytes, 4, 2) != kFrameLogVersion) throw InputError("frame log: unsupported version at byte 4");
  if ((bytes.size() - 8) % kFrameRecordBytes != 0) {
    throw InputError(fmt::format("frame log: {} trailing bytes", (bytes.size() - 8) % kFrameRecordBytes));
  }
  std::vector<FrameRecord> out;
  out.reserve((bytes.size() - 8) / kFrameRecordBytes);
  for (std::size_t pos = 8; pos < bytes.size(); pos += kFrameRecordBytes) {
    const auto type = get(bytes, pos, 1);
    if (type > 3) throw InputError(fmt::format("frame log: bad frame type {} at byte {}", type, pos));
    FrameRecord r;
    r.frame.type = static_cast<FrameType>(type);
    r.chip = static_cast<std::uint8_t>(get(bytes, pos + 1, 1));
    r.frame.dbi_flags = static_cast<std::uint8_t>(get(bytes, pos + 2, 1));
    const auto idx = static_cast<std::uint8_t>(get(bytes, pos + 3, 1));
    if (idx != kNoIndex) r.frame.index = idx;
    r.frame.sideband = static_cast<std::uint8_t>(get(bytes, pos + 4, 1));
    r.config_id = static_cast<std::uint32_t>(get(bytes, pos + 8, 4));
    r.frame.payload = get(bytes, pos + 12, 8);
    out.push_back(r);
  }
  return out;
}

std::string to_jsonl(const FrameRecord& r) {
  nlohmann::json j = {{"chip", r.chip},
                      {"frame_type", to_string(r.frame.type)},
                      {"payload", hex64(r.frame.payload)},
                      {"dbi_flags", hex8(r.frame.dbi_flags)},
                      {"index", nullptr},
                      {"sideband", r.frame.sideband},
                      {"config_id", r.config_id}};
  if (r.frame.index) j["index"] = *r.frame.index;
  return j.dump();
}

FrameRecord from_jsonl(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    FrameRecord r;
    r.chip = j.at("chip").get<std::uint8_t>();
    r.frame.type = frame_type_from_string(j.at("frame_type").get<std::string>());
    r.frame.payload = parse_hex64(j.at("payload").get<std::string>());
    r.frame.dbi_flags = static_cast<std::uint8_t>(parse_hex64(j.at("dbi_flags").get<std::string>()));
    if (!j.at("index").is_null()) r.frame.index = j.at("index").get<std::uint8_t>();
    r.frame.sideband = j.at("sideband").get<std::uint8_t>();
    r.config_id = j.at("config_id").get<std::uint32_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("frame log record: ") + e.what());
  }
}

void write_frame_log(const std::filesystem::path& path, std::span<const FrameRecord> records) {
  const auto bytes = encode_frame_log(records);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("cannot write '" + path.string() + "'");
}

std::vector<FrameRecord> read_frame_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_frame_log(bytes);
}

void write_frame_log_jsonl(const std::filesystem::path& path, std::span<const FrameRecord> records) {
  std::ofstream out(path, std::ios::trunc);
  for (const auto& r : records) out << to_jsonl(r) << '\n';
  if (!out) throw InputError("cannot write '" + path.string() + "'");
}

std::vector<FrameRecord> read_frame_log_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::vector<FrameRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(from_jsonl(line));
    } catch (const InputError& e) {
      throw InputError(fmt::format("line {}: {}", lineno, e.what()));
    }
  }
  return out;
}

}  // namespace dramenc
