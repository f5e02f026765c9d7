#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "dramenc/core.hpp"
#include "dramenc/table.hpp"

namespace dramenc {

enum class Scheme : std::uint8_t { kOrg, kDbi, kBdeOrg, kMbdc, kZacDest };

inline constexpr std::array<Scheme, 5> kAllSchemes{Scheme::kOrg, Scheme::kDbi, Scheme::kBdeOrg, Scheme::kMbdc,
                                                   Scheme::kZacDest};

std::string_view to_string(Scheme s);
/// Accepts ORG, DBI, BDE_ORG, MBDC, ZAC_DEST (case-insensitive, '-' or '_').
Scheme scheme_from_string(std::string_view s);

/// Schemes that keep a data table and drive an index line and sideband.
constexpr bool uses_table(Scheme s) noexcept { return s == Scheme::kBdeOrg || s == Scheme::kMbdc || s == Scheme::kZacDest; }
constexpr bool uses_dbi(Scheme s) noexcept { return s == Scheme::kDbi || s == Scheme::kMbdc || s == Scheme::kZacDest; }

enum class FrameType : std::uint8_t { kZero = 0, kOheSkip = 1, kXorEncoded = 2, kRaw = 3 };

std::string_view to_string(FrameType t);
FrameType frame_type_from_string(std::string_view s);

/// 2-bit code on the frame-type sideband. The common cases get the cheap codes:
/// ZERO 00, XOR_ENCODED 01, OHE_SKIP 10, RAW 11.
constexpr std::uint8_t sideband_code(FrameType t) noexcept {
  switch (t) {
    case FrameType::kZero: return 0b00;
    case FrameType::kXorEncoded: return 0b01;
    case FrameType::kOheSkip: return 0b10;
    case FrameType::kRaw: return 0b11;
  }
  return 0;
}

/// Everything one chip drives for one ChipWord.
struct Frame {
  FrameType type = FrameType::kRaw;
  ChipWord payload = 0;
  std::uint8_t dbi_flags = 0;          // bit b covers burst b
  std::optional<std::uint8_t> index;   // 6-bit slot on the index line
  std::uint8_t sideband = 0;           // 0 for schemes without sideband lines

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct DbiResult {
  ChipWord payload = 0;
  std::uint8_t flags = 0;
};

/// Inverts every burst byte holding more than four 1s.
DbiResult dbi_encode(ChipWord w) noexcept;
ChipWord dbi_decode(ChipWord payload, std::uint8_t flags) noexcept;

/// Word with only bit `slot` set. Throws ConfigError for slot outside [0, 63].
ChipWord ohe_encode(int slot);
/// Throws MalformedFrame unless exactly one bit is set.
int ohe_decode(ChipWord w);

/// When a table-based encoder inserts into its table. kAlgorithm is the
/// reference behaviour (BDE_ORG: raw branch only; MBDC/ZAC-DEST: every
/// non-skipped, non-zero transfer). kEveryAccess also inserts after BDE_ORG
/// XOR transfers.
enum class UpdatePolicy : std::uint8_t { kAlgorithm, kEveryAccess };

std::string_view to_string(UpdatePolicy p);
UpdatePolicy update_policy_from_string(std::string_view s);

struct CodecParams {
  ChipWord trunc_mask = 0;
  ChipWord tol_mask = 0;
  int similarity_limit_bits = 0;
  UpdatePolicy update = UpdatePolicy::kAlgorithm;
};

/// One side (sender or receiver) of one chip's encoder. Both ends are built
/// the same way and must stay bit-identical.
struct CodecState {
  explicit CodecState(Scheme scheme = Scheme::kOrg, int table_capacity = kMaxTableEntries, CodecParams params = {});

  Scheme scheme;
  DataTable table;
  CodecParams params;
};

using EncoderState = CodecState;
using DecoderState = CodecState;

Frame org_step(EncoderState& s, ChipWord w);
Frame dbi_step(EncoderState& s, ChipWord w);
Frame bde_org_step(EncoderState& s, ChipWord w);
Frame mbdc_step(EncoderState& s, ChipWord w);
Frame zacdest_step(EncoderState& s, ChipWord w);

ChipWord org_decode(DecoderState& s, const Frame& f);
ChipWord dbi_decode_frame(DecoderState& s, const Frame& f);
ChipWord bde_org_decode(DecoderState& s, const Frame& f);
ChipWord mbdc_decode(DecoderState& s, const Frame& f);
ChipWord zacdest_decode(DecoderState& s, const Frame& f);

/// Dispatch on s.scheme.
Frame encode_step(EncoderState& s, ChipWord w);
ChipWord decode_step(DecoderState& s, const Frame& f);

using LineFrames = std::array<Frame, kChips>;

/// Eight independent chip encoders fed one cache line at a time.
class RankEncoder {
 public:
  RankEncoder(Scheme scheme, int table_capacity, const ChipMasks& masks, int similarity_limit_bits,
              UpdatePolicy update = UpdatePolicy::kAlgorithm);

  LineFrames encode(const CacheLine& line);
  const CodecState& chip(int c) const { return chips_[static_cast<std::size_t>(c)]; }

 private:
  std::array<CodecState, kChips> chips_;
};

class RankDecoder {
 public:
  RankDecoder(Scheme scheme, int table_capacity, const ChipMasks& masks, int similarity_limit_bits,
              UpdatePolicy update = UpdatePolicy::kAlgorithm);

  CacheLine decode(const LineFrames& frames);
  const CodecState& chip(int c) const { return chips_[static_cast<std::size_t>(c)]; }

 private:
  std::array<CodecState, kChips> chips_;
};

}  // namespace dramenc
