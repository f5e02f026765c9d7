#pragma once

#include <cstdint>
#include <vector>

#include "dramenc/codec.hpp"
#include "dramenc/energy.hpp"
#include "dramenc/framelog.hpp"
#include "dramenc/quality.hpp"
#include "dramenc/trace.hpp"

namespace dramenc {

struct SimConfig {
  Scheme scheme = Scheme::kOrg;
  int table_capacity = kMaxTableEntries;
  ApproxConfig approx;
  UpdatePolicy update = UpdatePolicy::kAlgorithm;
  SidebandCost sideband = SidebandCost::kCounted;
  bool record_frames = false;
  bool check_sync = false;
  std::uint32_t config_id = 0;
};

/// Knobs actually applied to a stream: float32 tensors always get the
/// sign/exponent tolerance masks, and a stream marked exact disables
/// approximation whatever the config says.
ApproxConfig effective_approx(const TraceMeta& meta, const ApproxConfig& requested);

/// Sender, channel and receiver for one stream: eight chip encoders, their
/// mirrored decoders, and per-chip lane history for switching counts.
class ChannelSimulator {
 public:
  ChannelSimulator(const SimConfig& cfg, const ApproxConfig& approx);

  /// Encodes, accounts and decodes one line; returns the receiver's view.
  CacheLine transfer(const CacheLine& line);

  const LineFrames& last_frames() const noexcept { return frames_; }
  const EnergyCounters& counters() const noexcept { return counters_; }
  const FrameMix& mix() const noexcept { return mix_; }
  const ChipMasks& masks() const noexcept { return masks_; }
  const RankEncoder& encoder() const noexcept { return encoder_; }
  const RankDecoder& decoder() const noexcept { return decoder_; }
  /// Chips whose sender and receiver tables currently differ.
  int table_divergences() const;

 private:
  SimConfig cfg_;
  ChipMasks masks_;
  RankEncoder encoder_;
  RankDecoder decoder_;
  std::array<LaneState, kChips> lanes_{};
  EnergyCounters counters_;
  FrameMix mix_;
  LineFrames frames_{};
};

struct SimResult {
  EnergyCounters counters;
  FrameMix mix;
  TraceStream decoded;
  std::vector<FrameRecord> frames;
  std::uint64_t sync_divergences = 0;
  ApproxConfig approx;
};

SimResult simulate(const TraceStream& stream, const SimConfig& cfg);

}  // namespace dramenc
