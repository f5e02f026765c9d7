#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dramenc/core.hpp"

namespace dramenc {

inline constexpr int kMaxTableEntries = 64;

struct MseResult {
  int index = 0;
  ChipWord entry = 0;
  int xor_weight = 0;

  friend bool operator==(const MseResult&, const MseResult&) = default;
};

/// Recent-transfer table held by one chip, mirrored at the controller.
///
/// Slots are numbered oldest-first; inserting into a full table evicts slot 0
/// and shifts every other entry down by one, like a hardware shift register.
/// Storage is a ring, so the shift is only a head bump.
class DataTable {
 public:
  explicit DataTable(int capacity = kMaxTableEntries, bool dedupe = true);

  int capacity() const noexcept { return capacity_; }
  int size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  bool dedupe() const noexcept { return dedupe_; }

  /// Entry at slot `index` (0 = oldest). Throws DesyncError when unoccupied.
  ChipWord at(int index) const;
  bool contains(ChipWord w) const noexcept;

  /// Entry minimizing popcount((entry ^ query) & ~trunc_mask); lowest slot
  /// wins ties. Empty table gives nullopt.
  std::optional<MseResult> mse_search(ChipWord query, ChipWord trunc_mask) const noexcept;

  /// FIFO insert. Returns false when dedupe suppressed the insert.
  bool insert(ChipWord w);

  std::vector<ChipWord> entries() const;

  friend bool operator==(const DataTable& a, const DataTable& b);

 private:
  int physical(int index) const noexcept { return (head_ + index) % capacity_; }

  std::array<ChipWord, kMaxTableEntries> slots_{};
  int capacity_;
  int head_ = 0;
  int size_ = 0;
  bool dedupe_;
};

/// Debug dump: {"capacity", "dedupe", "entries": ["0x...", ...]} in slot order.
nlohmann::json table_to_json(const DataTable& t);
DataTable table_from_json(const nlohmann::json& j);

}  // namespace dramenc
