#pragma once

// POD channel energy. Termination charges every bit-time driven as 1;
// switching charges every 1->0 transition (0->1 draws no supply current).
// Lines are grouped as data (8 DQ lanes), index (one serial line carrying the
// 6-bit slot over bursts 0..5) and flags (the DBI line plus the 2-bit
// frame-type sideband).

#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "dramenc/codec.hpp"

namespace dramenc {

/// Whether the frame-type sideband costs energy. kFree models reusing idle
/// address lines.
enum class SidebandCost : std::uint8_t { kCounted, kFree };

std::string_view to_string(SidebandCost c);
SidebandCost sideband_cost_from_string(std::string_view s);

struct LineGroupCounts {
  std::uint64_t data = 0;
  std::uint64_t index = 0;
  std::uint64_t flags = 0;

  std::uint64_t total() const noexcept { return data + index + flags; }
  LineGroupCounts& operator+=(const LineGroupCounts& o) noexcept {
    data += o.data;
    index += o.index;
    flags += o.flags;
    return *this;
  }
  friend bool operator==(const LineGroupCounts&, const LineGroupCounts&) = default;
};

/// Index-line bit driven during `burst` (slot LSB first, idle after bit 5).
constexpr bool index_line_bit(const Frame& f, int burst) noexcept {
  return f.index && burst < 6 && ((*f.index >> burst) & 1u);
}

LineGroupCounts count_termination(const Frame& f, SidebandCost sideband = SidebandCost::kCounted) noexcept;

/// Last driven value of every line of one chip. All zero at stream start.
struct LaneState {
  std::uint8_t data = 0;      // bit l = DQ lane l
  bool index = false;
  bool dbi = false;
  std::uint8_t sideband = 0;  // 2 lines

  friend bool operator==(const LaneState&, const LaneState&) = default;
};

/// Charging transitions caused by `f`; advances `state` through all bursts.
LineGroupCounts count_switching(LaneState& state, const Frame& f,
                                SidebandCost sideband = SidebandCost::kCounted) noexcept;

struct EnergyCounters {
  LineGroupCounts termination;
  LineGroupCounts switching;

  EnergyCounters& operator+=(const EnergyCounters& o) noexcept {
    termination += o.termination;
    switching += o.switching;
    return *this;
  }
  friend EnergyCounters operator+(EnergyCounters a, const EnergyCounters& b) noexcept { return a += b; }
  friend bool operator==(const EnergyCounters&, const EnergyCounters&) = default;
};

struct EnergyParams {
  double i_term = 13.75e-3;     // A, extra current per driven 1
  double v_dd = 1.2;            // V
  double t_bit = 1.0 / 2.4e9;   // s, one bit-time at 2400 MT/s
  double c_line = 15e-12;       // F

  void validate() const;
  friend bool operator==(const EnergyParams&, const EnergyParams&) = default;
};

struct GroupJoules {
  double data = 0;
  double index = 0;
  double flags = 0;
  double total() const noexcept { return data + index + flags; }
};

struct EnergyReport {
  EnergyCounters counts;
  GroupJoules termination_j;
  GroupJoules switching_j;

  double total_j() const noexcept { return termination_j.total() + switching_j.total(); }
};

EnergyReport to_joules(const EnergyCounters& c, const EnergyParams& p);

nlohmann::json to_json(const EnergyParams& p);
EnergyParams energy_params_from_json(const nlohmann::json& j);

}  // namespace dramenc
