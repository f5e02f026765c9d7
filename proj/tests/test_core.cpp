#include <doctest.h>

#include <random>

#include "dramenc/core.hpp"
#include "oracles.hpp"

using namespace dramenc;

TEST_CASE("popcount") {
  CHECK(popcount(0x0000000000000000ULL) == 0);
  CHECK(popcount(0xFFFFFFFFFFFFFFFFULL) == 64);
  CHECK(popcount(0x8000000000000001ULL) == 2);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const ChipWord a = rng(), b = rng();
    CHECK(popcount(a ^ b) == popcount(b ^ a));
    CHECK(popcount(a ^ a) == 0);
    CHECK(popcount(a) == oracle::bit_count(a));
  }
}

TEST_CASE("split_cache_line layout") {
  SUBCASE("single byte lands on chip 1, burst 1") {
    CacheLine line{};
    line[9] = 0xAB;
    const auto w = split_cache_line(line);
    CHECK(w[1] == 0x000000000000AB00ULL);
    for (int c = 0; c < kChips; ++c) {
      if (c != 1) CHECK(w[static_cast<std::size_t>(c)] == 0);
    }
  }
  SUBCASE("zero line") {
    for (ChipWord w : split_cache_line(CacheLine{})) CHECK(w == 0);
  }
  SUBCASE("ascending bytes") {
    CacheLine line{};
    for (std::size_t j = 0; j < kLineBytes; ++j) line[j] = static_cast<std::uint8_t>(j);
    const auto w = split_cache_line(line);
    // chip 0 receives bytes 0, 8, ..., 56 in burst order
    CHECK(w[0] == 0x3830282018100800ULL);
    CHECK(w == oracle::split(line));
  }
}

TEST_CASE("merge_chip_words") {
  CHECK(merge_chip_words(ChipWords{}) == CacheLine{});
  ChipWords w{};
  w[1] = 0x000000000000AB00ULL;
  const CacheLine line = merge_chip_words(w);
  for (std::size_t j = 0; j < kLineBytes; ++j) CHECK(line[j] == (j == 9 ? 0xAB : 0));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    CacheLine l;
    for (auto& b : l) b = static_cast<std::uint8_t>(rng());
    const auto words = split_cache_line(l);
    CHECK(words == oracle::split(l));
    CHECK(merge_chip_words(words) == l);
  }
}

TEST_CASE("build_mask") {
  CHECK(build_mask(MaskKind::kTruncation, 8, 2).bits == 0x0303030303030303ULL);
  CHECK(build_mask(MaskKind::kTolerance, 16, 4).bits == 0xF000F000F000F000ULL);
  CHECK(build_mask(MaskKind::kTruncation, 8, 0).bits == 0);
  CHECK(build_mask(MaskKind::kTolerance, 8, 0).bits == 0);
  CHECK(build_mask(MaskKind::kTruncation, 64, 16).bits == 0xFFFFULL);
  CHECK(build_mask(MaskKind::kTolerance, 64, 16).bits == 0xFFFF000000000000ULL);
  CHECK(build_mask(MaskKind::kTruncation, 32, 4).bits == 0x0000000F0000000FULL);

  SUBCASE("set bit count is 64*k/w") {
    for (int w : {8, 16, 32, 64}) {
      for (int k = 0; k < w; ++k) {
        for (auto kind : {MaskKind::kTruncation, MaskKind::kTolerance}) {
          CHECK(popcount(build_mask(kind, w, k).bits) == 64 * k / w);
        }
      }
    }
  }
  SUBCASE("presets keep truncation and tolerance disjoint") {
    for (int w : {8, 16, 32, 64}) {
      for (int t : {0, w / 8, w / 4}) {
        for (int tol : {0, w / 8, w / 4}) {
          CHECK((build_mask(MaskKind::kTruncation, w, t).bits & build_mask(MaskKind::kTolerance, w, tol).bits) == 0);
        }
      }
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(build_mask(MaskKind::kTruncation, 12, 2), ConfigError);
    CHECK_THROWS_AS(build_mask(MaskKind::kTruncation, 8, 8), ConfigError);
    CHECK_THROWS_AS(build_mask(MaskKind::kTolerance, 16, -1), ConfigError);
  }
}

TEST_CASE("float32 tolerance masks") {
  const auto m = float32_tolerance_masks();
  // the value at offsets 0..3: MSB byte 3 -> chip 3 burst 0, byte 2 -> chip 2 burst 0
  CHECK((m[3] & 0xFF) == 0xFF);
  CHECK((m[2] & 0xFF) == 0x80);
  CHECK((m[0] & 0xFF) == 0);
  CHECK((m[1] & 0xFF) == 0);
  CHECK(m[3] == 0xFFFFFFFFFFFFFFFFULL);
  CHECK(m[7] == 0xFFFFFFFFFFFFFFFFULL);
  CHECK(m[2] == 0x8080808080808080ULL);
  CHECK(m[6] == 0x8080808080808080ULL);

  int total = 0;
  for (ChipWord w : m) total += popcount(w);
  CHECK(total == 16 * 9);

  const auto t = float32_truncation_masks(23);
  for (int c = 0; c < kChips; ++c) CHECK((t[static_cast<std::size_t>(c)] & m[static_cast<std::size_t>(c)]) == 0);
  CHECK_THROWS_AS(float32_truncation_masks(24), ConfigError);
}

TEST_CASE("similarity presets") {
  CHECK(similarity_preset_bits(90) == 7);
  CHECK(similarity_preset_bits(80) == 13);
  CHECK(similarity_preset_bits(75) == 16);
  CHECK(similarity_preset_bits(70) == 20);
  CHECK_THROWS_AS(similarity_preset_bits(85), ConfigError);
}

TEST_CASE("ApproxConfig validation and masks") {
  ApproxConfig cfg;
  cfg.trunc_bits_per_value = 2;
  cfg.tol_mode = ToleranceMode::kQuarter;
  const auto m = cfg.masks();
  CHECK(m.truncation[0] == 0x0303030303030303ULL);
  CHECK(m.tolerance[5] == 0xC0C0C0C0C0C0C0C0ULL);

  cfg.approx_allowed = false;
  CHECK(cfg.masks() == ChipMasks{});

  ApproxConfig bad;
  bad.similarity_limit_bits = 65;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.trunc_bits_per_value = 8;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.trunc_bits_per_value = 7;
  bad.tol_mode = ToleranceMode::kQuarter;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.tol_mode = ToleranceMode::kFloat32;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.value_width = 32;
  CHECK_NOTHROW(bad.validate());

  CHECK(tolerance_mode_from_string("16") == ToleranceMode::kQuarter);
  CHECK(tolerance_mode_from_string(to_string(ToleranceMode::kFloat32)) == ToleranceMode::kFloat32);
  CHECK_THROWS_AS(tolerance_mode_from_string("half"), ConfigError);
}
