#include "dramenc/codec.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace dramenc {

namespace {

std::string canonical(std::string_view s) {
  std::string out;
  for (char c : s) out.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

Frame make_frame(FrameType type, ChipWord payload, std::uint8_t flags = 0, std::optional<std::uint8_t> index = {}) {
  return {type, payload, flags, index, sideband_code(type)};
}

void check_sideband(const Frame& f) {
  if (f.sideband != sideband_code(f.type)) {
    throw MalformedFrame("sideband code " + std::to_string(f.sideband) + " does not match frame type " +
                         std::string(to_string(f.type)));
  }
}

int index_weight(int slot) { return std::popcount(static_cast<unsigned>(slot)); }

// Shared tail of MBDC and ZAC-DEST once the word is known to be nonzero and
// not skipped. `w` is already truncated.
Frame mbdc_encode_nonzero(EncoderState& s, ChipWord w, const std::optional<MseResult>& mse) {
  Frame f;
  if (mse && popcount(w) > mse->xor_weight + index_weight(mse->index)) {
    const DbiResult d = dbi_encode(w ^ mse->entry);
    f = make_frame(FrameType::kXorEncoded, d.payload, d.flags, static_cast<std::uint8_t>(mse->index));
  } else {
    const DbiResult d = dbi_encode(w);
    f = make_frame(FrameType::kRaw, d.payload, d.flags);
  }
  s.table.insert(w);
  return f;
}

}  // namespace

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::kOrg: return "ORG";
    case Scheme::kDbi: return "DBI";
    case Scheme::kBdeOrg: return "BDE_ORG";
    case Scheme::kMbdc: return "MBDC";
    case Scheme::kZacDest: return "ZAC_DEST";
  }
  return "?";
}

Scheme scheme_from_string(std::string_view s) {
  const std::string c = canonical(s);
  for (Scheme sc : kAllSchemes) {
    if (c == to_string(sc)) return sc;
  }
  if (c == "ZACDEST") return Scheme::kZacDest;
  throw ConfigError("unknown scheme '" + std::string(s) + "'");
}

std::string_view to_string(FrameType t) {
  switch (t) {
    case FrameType::kZero: return "ZERO";
    case FrameType::kOheSkip: return "OHE_SKIP";
    case FrameType::kXorEncoded: return "XOR_ENCODED";
    case FrameType::kRaw: return "RAW";
  }
  return "?";
}

FrameType frame_type_from_string(std::string_view s) {
  for (auto t : {FrameType::kZero, FrameType::kOheSkip, FrameType::kXorEncoded, FrameType::kRaw}) {
    if (s == to_string(t)) return t;
  }
  throw InputError("unknown frame type '" + std::string(s) + "'");
}

std::string_view to_string(UpdatePolicy p) {
  return p == UpdatePolicy::kAlgorithm ? "algorithm" : "every-access";
}

UpdatePolicy update_policy_from_string(std::string_view s) {
  if (s == "algorithm" || s == "raw-only") return UpdatePolicy::kAlgorithm;
  if (s == "every-access") return UpdatePolicy::kEveryAccess;
  throw ConfigError("unknown update policy '" + std::string(s) + "'");
}

DbiResult dbi_encode(ChipWord w) noexcept {
  DbiResult r{w, 0};
  for (int b = 0; b < kBursts; ++b) {
    if (std::popcount(burst_byte(w, b)) > 4) {
      r.payload ^= ChipWord{0xFF} << (8 * b);
      r.flags |= static_cast<std::uint8_t>(1u << b);
    }
  }
  return r;
}

ChipWord dbi_decode(ChipWord payload, std::uint8_t flags) noexcept {
  for (int b = 0; b < kBursts; ++b) {
    if (flags & (1u << b)) payload ^= ChipWord{0xFF} << (8 * b);
  }
  return payload;
}

ChipWord ohe_encode(int slot) {
  if (slot < 0 || slot > 63) throw ConfigError("one-hot slot out of range: " + std::to_string(slot));
  return ChipWord{1} << slot;
}

int ohe_decode(ChipWord w) {
  if (popcount(w) != 1) {
    throw MalformedFrame("one-hot payload has " + std::to_string(popcount(w)) + " set bits");
  }
  return std::countr_zero(w);
}

CodecState::CodecState(Scheme scheme, int table_capacity, CodecParams params)
    : scheme(scheme), table(table_capacity, scheme != Scheme::kBdeOrg), params(params) {
  if (params.similarity_limit_bits < 0 || params.similarity_limit_bits > 64) {
    throw ConfigError("similarity limit must be in [0, 64] bits");
  }
  if (params.trunc_mask & params.tol_mask) throw ConfigError("truncation and tolerance masks overlap");
}

Frame org_step(EncoderState&, ChipWord w) { return {FrameType::kRaw, w, 0, std::nullopt, 0}; }

Frame dbi_step(EncoderState&, ChipWord w) {
  const DbiResult d = dbi_encode(w);
  return {FrameType::kRaw, d.payload, d.flags, std::nullopt, 0};
}

Frame bde_org_step(EncoderState& s, ChipWord w) {
  const auto mse = s.table.mse_search(w, 0);
  if (mse && popcount(w) > mse->xor_weight) {
    if (s.params.update == UpdatePolicy::kEveryAccess) s.table.insert(w);
    return make_frame(FrameType::kXorEncoded, w ^ mse->entry, 0, static_cast<std::uint8_t>(mse->index));
  }
  s.table.insert(w);
  return make_frame(FrameType::kRaw, w);
}

Frame mbdc_step(EncoderState& s, ChipWord w) {
  const ChipWord wt = w & ~s.params.trunc_mask;
  if (wt == 0) return make_frame(FrameType::kZero, 0);
  return mbdc_encode_nonzero(s, wt, s.table.mse_search(wt, s.params.trunc_mask));
}

Frame zacdest_step(EncoderState& s, ChipWord w) {
  const ChipWord trunc = s.params.trunc_mask;
  const ChipWord wt = w & ~trunc;
  if (wt == 0) return make_frame(FrameType::kZero, 0);
  const auto mse = s.table.mse_search(wt, trunc);
  if (mse && mse->xor_weight <= s.params.similarity_limit_bits && ((wt ^ mse->entry) & s.params.tol_mask) == 0) {
    return make_frame(FrameType::kOheSkip, ohe_encode(mse->index));
  }
  return mbdc_encode_nonzero(s, wt, mse);
}

ChipWord org_decode(DecoderState&, const Frame& f) { return f.payload; }

ChipWord dbi_decode_frame(DecoderState&, const Frame& f) { return dbi_decode(f.payload, f.dbi_flags); }

ChipWord bde_org_decode(DecoderState& s, const Frame& f) {
  check_sideband(f);
  switch (f.type) {
    case FrameType::kXorEncoded: {
      if (!f.index) throw MalformedFrame("XOR_ENCODED frame without index");
      const ChipWord w = f.payload ^ s.table.at(*f.index);
      if (s.params.update == UpdatePolicy::kEveryAccess) s.table.insert(w);
      return w;
    }
    case FrameType::kRaw:
      s.table.insert(f.payload);
      return f.payload;
    default:
      throw MalformedFrame("BDE_ORG never sends " + std::string(to_string(f.type)));
  }
}

ChipWord mbdc_decode(DecoderState& s, const Frame& f) {
  check_sideband(f);
  ChipWord w = 0;
  switch (f.type) {
    case FrameType::kZero:
      return 0;
    case FrameType::kXorEncoded:
      if (!f.index) throw MalformedFrame("XOR_ENCODED frame without index");
      w = dbi_decode(f.payload, f.dbi_flags) ^ s.table.at(*f.index);
      break;
    case FrameType::kRaw:
      w = dbi_decode(f.payload, f.dbi_flags);
      break;
    case FrameType::kOheSkip:
      throw MalformedFrame("MBDC never sends OHE_SKIP");
  }
  s.table.insert(w);
  return w;
}

ChipWord zacdest_decode(DecoderState& s, const Frame& f) {
  if (f.type == FrameType::kOheSkip) {
    check_sideband(f);
    return s.table.at(ohe_decode(f.payload)) & ~s.params.trunc_mask;
  }
  return mbdc_decode(s, f);
}

Frame encode_step(EncoderState& s, ChipWord w) {
  switch (s.scheme) {
    case Scheme::kOrg: return org_step(s, w);
    case Scheme::kDbi: return dbi_step(s, w);
    case Scheme::kBdeOrg: return bde_org_step(s, w);
    case Scheme::kMbdc: return mbdc_step(s, w);
    case Scheme::kZacDest: return zacdest_step(s, w);
  }
  return org_step(s, w);
}

ChipWord decode_step(DecoderState& s, const Frame& f) {
  switch (s.scheme) {
    case Scheme::kOrg: return org_decode(s, f);
    case Scheme::kDbi: return dbi_decode_frame(s, f);
    case Scheme::kBdeOrg: return bde_org_decode(s, f);
    case Scheme::kMbdc: return mbdc_decode(s, f);
    case Scheme::kZacDest: return zacdest_decode(s, f);
  }
  return org_decode(s, f);
}

namespace {

std::array<CodecState, kChips> make_chips(Scheme scheme, int capacity, const ChipMasks& masks, int limit,
                                          UpdatePolicy update) {
  // Only MBDC and ZAC-DEST truncate; only ZAC-DEST skips.
  const bool truncates = scheme == Scheme::kMbdc || scheme == Scheme::kZacDest;
  std::array<CodecState, kChips> chips;
  for (int c = 0; c < kChips; ++c) {
    CodecParams p;
    p.trunc_mask = truncates ? masks.truncation[static_cast<std::size_t>(c)] : 0;
    p.tol_mask = scheme == Scheme::kZacDest ? masks.tolerance[static_cast<std::size_t>(c)] : 0;
    p.similarity_limit_bits = scheme == Scheme::kZacDest ? limit : 0;
    p.update = update;
    chips[static_cast<std::size_t>(c)] = CodecState(scheme, capacity, p);
  }
  return chips;
}

}  // namespace

RankEncoder::RankEncoder(Scheme scheme, int table_capacity, const ChipMasks& masks, int similarity_limit_bits,
                         UpdatePolicy update)
    : chips_(make_chips(scheme, table_capacity, masks, similarity_limit_bits, update)) {}

LineFrames RankEncoder::encode(const CacheLine& line) {
  const ChipWords words = split_cache_line(line);
  LineFrames frames;
  for (std::size_t c = 0; c < kChips; ++c) frames[c] = encode_step(chips_[c], words[c]);
  return frames;
}

RankDecoder::RankDecoder(Scheme scheme, int table_capacity, const ChipMasks& masks, int similarity_limit_bits,
                         UpdatePolicy update)
    : chips_(make_chips(scheme, table_capacity, masks, similarity_limit_bits, update)) {}

CacheLine RankDecoder::decode(const LineFrames& frames) {
  ChipWords words;
  for (std::size_t c = 0; c < kChips; ++c) words[c] = decode_step(chips_[c], frames[c]);
  return merge_chip_words(words);
}

}  // namespace dramenc
