#include "dramenc/simulate.hpp"

namespace dramenc {

ApproxConfig effective_approx(const TraceMeta& meta, const ApproxConfig& requested) {
  ApproxConfig a = requested;
  a.approx_allowed = requested.approx_allowed && meta.approx_allowed;
  if (meta.kind == TraceKind::kTensorF32) {
    a.value_width = 32;
    a.tol_mode = ToleranceMode::kFloat32;
  } else if (a.tol_mode == ToleranceMode::kFloat32) {
    throw ConfigError("float32 tolerance only applies to float32 tensor streams");
  }
  a.validate();
  return a;
}

namespace {

// Similarity skipping is an approximation, so a stream marked exact runs the
// exact table coder instead.
Scheme applied_scheme(Scheme s, const ApproxConfig& approx) {
  return s == Scheme::kZacDest && !approx.approx_allowed ? Scheme::kMbdc : s;
}

}  // namespace

ChannelSimulator::ChannelSimulator(const SimConfig& cfg, const ApproxConfig& approx)
    : cfg_(cfg),
      masks_(approx.masks()),
      encoder_(applied_scheme(cfg.scheme, approx), cfg.table_capacity, masks_, approx.similarity_limit_bits, cfg.update),
      decoder_(applied_scheme(cfg.scheme, approx), cfg.table_capacity, masks_, approx.similarity_limit_bits,
               cfg.update) {}

CacheLine ChannelSimulator::transfer(const CacheLine& line) {
  frames_ = encoder_.encode(line);
  for (int c = 0; c < kChips; ++c) {
    const Frame& f = frames_[static_cast<std::size_t>(c)];
    counters_.termination += count_termination(f, cfg_.sideband);
    counters_.switching += count_switching(lanes_[static_cast<std::size_t>(c)], f, cfg_.sideband);
    mix_.add(c, f.type);
  }
  return decoder_.decode(frames_);
}

int ChannelSimulator::table_divergences() const {
  int n = 0;
  for (int c = 0; c < kChips; ++c) n += encoder_.chip(c).table == decoder_.chip(c).table ? 0 : 1;
  return n;
}

SimResult simulate(const TraceStream& stream, const SimConfig& cfg) {
  SimResult r;
  r.approx = effective_approx(stream.meta, cfg.approx);
  ChannelSimulator sim(cfg, r.approx);
  r.decoded.meta = stream.meta;
  r.decoded.lines.reserve(stream.lines.size());
  if (cfg.record_frames) r.frames.reserve(stream.lines.size() * kChips);
  for (const auto& line : stream.lines) {
    r.decoded.lines.push_back(sim.transfer(line));
    if (cfg.record_frames) {
      for (int c = 0; c < kChips; ++c) {
        r.frames.push_back({static_cast<std::uint8_t>(c), cfg.config_id, sim.last_frames()[static_cast<std::size_t>(c)]});
      }
    }
    if (cfg.check_sync) r.sync_divergences += static_cast<std::uint64_t>(sim.table_divergences());
  }
  r.counters = sim.counters();
  r.mix = sim.mix();
  return r;
}

}  // namespace dramenc
