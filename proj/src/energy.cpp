#include "dramenc/energy.hpp"

#include <bit>
#include <string>

#include <nlohmann/json.hpp>

namespace dramenc {

std::string_view to_string(SidebandCost c) { return c == SidebandCost::kCounted ? "counted" : "free"; }

SidebandCost sideband_cost_from_string(std::string_view s) {
  if (s == "counted") return SidebandCost::kCounted;
  if (s == "free") return SidebandCost::kFree;
  throw ConfigError("sideband cost must be 'counted' or 'free', got '" + std::string(s) + "'");
}

LineGroupCounts count_termination(const Frame& f, SidebandCost sideband) noexcept {
  LineGroupCounts c;
  c.data = static_cast<std::uint64_t>(popcount(f.payload));
  c.index = f.index ? static_cast<std::uint64_t>(std::popcount(static_cast<unsigned>(*f.index & 0x3F))) : 0;
  c.flags = static_cast<std::uint64_t>(std::popcount(f.dbi_flags));
  if (sideband == SidebandCost::kCounted) c.flags += static_cast<std::uint64_t>(std::popcount(f.sideband));
  return c;
}

LineGroupCounts count_switching(LaneState& state, const Frame& f, SidebandCost sideband) noexcept {
  LineGroupCounts c;
  for (int b = 0; b < kBursts; ++b) {
    const std::uint8_t data = burst_byte(f.payload, b);
    c.data += static_cast<std::uint64_t>(std::popcount(static_cast<std::uint8_t>(state.data & ~data)));
    state.data = data;

    const bool idx = index_line_bit(f, b);
    c.index += (state.index && !idx) ? 1 : 0;
    state.index = idx;

    const bool dbi = (f.dbi_flags >> b) & 1u;
    c.flags += (state.dbi && !dbi) ? 1 : 0;
    state.dbi = dbi;
  }
  const auto sb = static_cast<std::uint8_t>(f.sideband & 0b11);
  if (sideband == SidebandCost::kCounted) {
    c.flags += static_cast<std::uint64_t>(std::popcount(static_cast<std::uint8_t>(state.sideband & ~sb & 0b11)));
  }
  state.sideband = sb;
  return c;
}

void EnergyParams::validate() const {
  if (!(i_term > 0 && v_dd > 0 && t_bit > 0 && c_line > 0)) {
    throw ConfigError("energy parameters must all be strictly positive");
  }
}

EnergyReport to_joules(const EnergyCounters& c, const EnergyParams& p) {
  p.validate();
  const double per_one = p.i_term * p.v_dd * p.t_bit;
  const double per_transition = p.c_line * p.v_dd * p.v_dd;
  auto scale = [](const LineGroupCounts& g, double k) {
    return GroupJoules{static_cast<double>(g.data) * k, static_cast<double>(g.index) * k,
                       static_cast<double>(g.flags) * k};
  };
  return {c, scale(c.termination, per_one), scale(c.switching, per_transition)};
}

nlohmann::json to_json(const EnergyParams& p) {
  return {{"i_term", p.i_term}, {"v_dd", p.v_dd}, {"t_bit", p.t_bit}, {"c_line", p.c_line}};
}

EnergyParams energy_params_from_json(const nlohmann::json& j) {
  EnergyParams p;
  p.i_term = j.value("i_term", p.i_term);
  p.v_dd = j.value("v_dd", p.v_dd);
  p.t_bit = j.value("t_bit", p.t_bit);
  p.c_line = j.value("c_line", p.c_line);
  p.validate();
  return p;
}

}  // namespace dramenc
