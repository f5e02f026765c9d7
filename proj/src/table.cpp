#include "dramenc/table.hpp"

#include <nlohmann/json.hpp>

#include "dramenc/hex.hpp"

namespace dramenc {

DataTable::DataTable(int capacity, bool dedupe) : capacity_(capacity), dedupe_(dedupe) {
  if (capacity < 1 || capacity > kMaxTableEntries) {
    throw ConfigError("table capacity must be in [1, 64], got " + std::to_string(capacity));
  }
}

ChipWord DataTable::at(int index) const {
  if (index < 0 || index >= size_) {
    throw DesyncError("table slot " + std::to_string(index) + " is not occupied (size " +
                      std::to_string(size_) + ")");
  }
  return slots_[physical(index)];
}

bool DataTable::contains(ChipWord w) const noexcept {
  for (int i = 0; i < size_; ++i) {
    if (slots_[physical(i)] == w) return true;
  }
  return false;
}

std::optional<MseResult> DataTable::mse_search(ChipWord query, ChipWord trunc_mask) const noexcept {
  if (size_ == 0) return std::nullopt;
  const ChipWord keep = ~trunc_mask;
  MseResult best{0, slots_[physical(0)], popcount((slots_[physical(0)] ^ query) & keep)};
  for (int i = 1; i < size_ && best.xor_weight > 0; ++i) {
    const ChipWord e = slots_[physical(i)];
    const int wt = popcount((e ^ query) & keep);
    if (wt < best.xor_weight) best = {i, e, wt};
  }
  return best;
}

bool DataTable::insert(ChipWord w) {
  if (dedupe_ && contains(w)) return false;
  if (size_ < capacity_) {
    slots_[physical(size_)] = w;
    ++size_;
  } else {
    slots_[head_] = w;
    head_ = (head_ + 1) % capacity_;
  }
  return true;
}

std::vector<ChipWord> DataTable::entries() const {
  std::vector<ChipWord> out;
  out.reserve(static_cast<std::size_t>(size_));
  for (int i = 0; i < size_; ++i) out.push_back(slots_[physical(i)]);
  return out;
}

bool operator==(const DataTable& a, const DataTable& b) {
  if (a.capacity_ != b.capacity_ || a.size_ != b.size_ || a.dedupe_ != b.dedupe_) return false;
  for (int i = 0; i < a.size_; ++i) {
    if (a.slots_[a.physical(i)] != b.slots_[b.physical(i)]) return false;
  }
  return true;
}

nlohmann::json table_to_json(const DataTable& t) {
  nlohmann::json entries = nlohmann::json::array();
  for (ChipWord w : t.entries()) entries.push_back(hex64(w));
  return {{"capacity", t.capacity()}, {"dedupe", t.dedupe()}, {"entries", std::move(entries)}};
}

DataTable table_from_json(const nlohmann::json& j) {
  DataTable t(j.at("capacity").get<int>(), j.at("dedupe").get<bool>());
  for (const auto& e : j.at("entries")) {
    if (t.size() == t.capacity()) throw InputError("table dump holds more entries than its capacity");
    if (!t.insert(parse_hex64(e.get<std::string>()))) {
      throw InputError("duplicate entry in a deduplicating table dump");
    }
  }
  return t;
}

}  // namespace dramenc
