#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dramenc/error.hpp"
#include "dramenc/runner.hpp"

using namespace dramenc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("dramenc_runner_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("run config round trips through json") {
  RunConfig c;
  CHECK(run_config_from_json(to_json(c)) == c);

  c.schemes = {Scheme::kMbdc, Scheme::kZacDest};
  c.baseline = Scheme::kMbdc;
  c.table_capacity = 16;
  c.similarity_preset.reset();
  c.similarity_limit_bits = 9;
  c.truncation_bits = 16;
  c.tolerance = ToleranceMode::kQuarter;
  c.update = UpdatePolicy::kEveryAccess;
  c.sideband = SidebandCost::kFree;
  c.energy.v_dd = 1.1;
  c.energy.t_bit = 1.0 / 3.2e9;
  c.inputs = {"a.pgm", "random:10"};
  c.output_dir = "elsewhere";
  c.seed = 0xFFFFFFFFFFFFFFFFULL;
  c.jobs = 3;
  c.write_reconstructions = false;
  c.frame_log = FrameLogFormat::kJsonl;
  c.sweep.limit_percents = {90};
  c.sweep.limit_bits = {3, 30};
  c.sweep.tolerances = {ToleranceMode::kNone, ToleranceMode::kFloat32};
  const auto j = to_json(c);
  CHECK(run_config_from_json(j) == c);
  CHECK(run_config_from_json(nlohmann::json::parse(j.dump())) == c);
  CHECK(j["similarity_preset"].is_null());
}

TEST_CASE("presets resolve to limit bits") {
  for (auto [pct, bits] : {std::pair{90, 7}, {80, 13}, {75, 16}, {70, 20}}) {
    const auto c = run_config_from_json({{"similarity_preset", pct}});
    CHECK(c.similarity_limit_bits == bits);
    CHECK(to_json(c)["similarity_limit_bits"] == bits);
  }
}

TEST_CASE("invalid configs are rejected") {
  using J = nlohmann::json;
  CHECK_THROWS_AS(run_config_from_json(J{{"schemes", {"MBDC"}}, {"baseline", "ORG"}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J{{"schemes", J::array()}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J{{"schemes", {"ORG", "ORG"}}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J{{"schemes", {"HUFFMAN"}}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J{{"table_capacity", 0}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J{{"table_capacity", 65}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J{{"similarity_preset", 85}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J{{"similarity_preset", 90}, {"similarity_limit_bits", 8}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J{{"similarity_limit_bits", 65}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J{{"truncation_bits", 12}}), ConfigError);  // 1.5 bits per byte
  CHECK_THROWS_AS(run_config_from_json(J{{"truncation_bits", 64}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J{{"truncation_bits", 56}, {"tolerance", "quarter"}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J{{"jobs", 0}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J{{"energy", {{"v_dd", -1.0}}}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J{{"seed", "abc"}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J{{"limit", 80}}), ConfigError);  // unknown key
  CHECK_THROWS_AS(run_config_from_json(J{{"sweep", {{"truncation_bits", J::array()}}}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J{{"sweep", {{"limit_percents", {91}}}}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(J::array()), ConfigError);
}

TEST_CASE("approx_for splits the per-word truncation across values") {
  const TraceMeta img{TraceKind::kImage, 8, 8, 1, 8, true, 0};
  auto a = approx_for(img, 8, 13, 16, ToleranceMode::kNone);
  CHECK(a.trunc_bits_per_value == 2);
  CHECK(a.masks().truncation[0] == 0x0303030303030303ULL);
  a = approx_for(img, 16, 13, 16, ToleranceMode::kEighth);
  CHECK(a.trunc_bits_per_value == 4);
  CHECK(a.masks().tolerance[0] == 0xC000C000C000C000ULL);
  CHECK_THROWS_AS(approx_for(img, 8, 13, 4, ToleranceMode::kNone), ConfigError);
  CHECK_THROWS_AS(approx_for(img, 8, 13, 0, ToleranceMode::kFloat32), ConfigError);

  const TraceMeta ten{TraceKind::kTensorF32, 16, 1, 1, 32, true, 0};
  a = approx_for(ten, 8, 13, 16, ToleranceMode::kNone);
  CHECK(a.value_width == 32);
  CHECK(a.trunc_bits_per_value == 8);
  CHECK(a.tol_mode == ToleranceMode::kFloat32);

  TraceMeta exact = img;
  exact.approx_allowed = false;
  CHECK(approx_for(exact, 8, 13, 32, ToleranceMode::kQuarter).masks() == ChipMasks{});
}

TEST_CASE("reduction_pct") {
  CHECK(reduction_pct(200, 150) == 25.0);
  CHECK(reduction_pct(100, 120) == -20.0);
  CHECK(reduction_pct(7, 7) == 0.0);
  CHECK(std::isnan(reduction_pct(0, 5)));
}

TEST_CASE("input discovery") {
  TempDir tmp;
  const auto data = fs::path(DRAMENC_TEST_DATA);
  fs::create_directories(tmp.path / "d");
  fs::copy_file(data / "natural" / "coins.pgm", tmp.path / "d" / "b.pgm");
  fs::copy_file(data / "astronaut_small.png", tmp.path / "d" / "a.png");
  std::ofstream(tmp.path / "d" / "c.f32", std::ios::binary).write("\0\0\x80\x3f\0\0\0\xc0", 8);
  std::ofstream(tmp.path / "d" / "z.bin", std::ios::binary) << "hello";
  std::ofstream(tmp.path / "d" / ".hidden") << "x";

  const auto in = load_inputs({(tmp.path / "d").string(), "random:3", (tmp.path / "d" / "z.bin").string()}, 9);
  REQUIRE(in.size() == 6);
  CHECK(in[0].name == "a.png");
  CHECK(in[0].image->channels == 3);
  CHECK(in[1].name == "b.pgm");
  CHECK(in[2].stream.meta.kind == TraceKind::kTensorF32);
  CHECK(in[2].stream.meta.width == 2);
  CHECK(in[3].stream.meta.kind == TraceKind::kRaw);
  CHECK(in[4].name == "random-3");
  CHECK(in[4].stream.lines.size() == 3);
  CHECK(in[5].name == "z.bin#1");
  CHECK(load_inputs({"random:3"}, 9)[0].stream == in[4].stream);
  CHECK(load_inputs({"random:3"}, 10)[0].stream != in[4].stream);

  fs::create_directories(tmp.path / "empty");
  CHECK_THROWS_AS(load_inputs({(tmp.path / "empty").string()}, 1), InputError);
  CHECK_THROWS_AS(load_inputs({(tmp.path / "missing.pgm").string()}, 1), InputError);
  CHECK_THROWS_AS(load_inputs({}, 1), ConfigError);
  CHECK_THROWS_AS(load_inputs({"random:x"}, 1), ConfigError);
  std::ofstream(tmp.path / "odd.f32", std::ios::binary) << "abc";
  CHECK_THROWS_AS(load_inputs({(tmp.path / "odd.f32").string()}, 1), InputError);
}

TEST_CASE("cmd_run rows follow input then scheme order") {
  TempDir tmp;
  RunConfig c;
  c.inputs = {(fs::path(DRAMENC_TEST_DATA) / "natural" / "coins.pgm").string(), "random:50"};
  c.schemes = {Scheme::kZacDest, Scheme::kOrg, Scheme::kMbdc};
  c.output_dir = tmp.path.string();
  c.jobs = 4;
  const auto out = cmd_run(c);
  REQUIRE(out.rows.size() == 6);
  CHECK(out.rows[0].stream == "coins.pgm");
  CHECK(out.rows[0].scheme == Scheme::kZacDest);
  CHECK(out.rows[1].scheme == Scheme::kOrg);
  CHECK(out.rows[3].stream == "random-50");
  CHECK(out.rows[1].psnr_db == INFINITY);
  CHECK(out.rows[2].ssim == 1.0);
  CHECK(out.rows[4].psnr_db == INFINITY);  // raw bytes, exact scheme
  CHECK(std::isnan(out.rows[4].ssim));
  CHECK(fs::exists(tmp.path / "recon" / "coins.pgm.ZAC_DEST.pgm"));
  CHECK(fs::exists(tmp.path / "recon" / "random-50.MBDC.bin"));
  for (const char* f : {"config.json", "energy.csv", "energy.json", "quality.csv", "framemix.csv"}) {
    CHECK(fs::exists(tmp.path / f));
  }
}

TEST_CASE("cmd_sweep grid size") {
  TempDir tmp;
  RunConfig c;
  c.inputs = {(fs::path(DRAMENC_TEST_DATA) / "natural" / "coins.pgm").string(), "random_f32:40"};
  c.schemes = {Scheme::kZacDest};
  c.baseline = Scheme::kZacDest;
  c.output_dir = tmp.path.string();
  c.sweep.tolerances = {ToleranceMode::kFloat32, ToleranceMode::kNone};
  const auto out = cmd_sweep(c);
  // 4 limits x 2 truncations for each input: the tensor runs float32 only and
  // the image skips float32
  REQUIRE(out.rows.size() == 16);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(out.rows[k].stream == "coins.pgm");
    CHECK(out.rows[k].tolerance == ToleranceMode::kNone);
    CHECK(out.rows[k + 8].tolerance == ToleranceMode::kFloat32);
    CHECK(out.rows[k + 8].sign_exp_audit == "pass");
  }
  CHECK(out.rows[0].limit_bits == 7);
  CHECK(out.rows[3].limit_bits == 20);
  CHECK(out.rows[4].truncation_bits == 16);

  c.inputs = {"random:4"};
  c.sweep.tolerances = {ToleranceMode::kFloat32};
  CHECK_THROWS_AS(cmd_sweep(c), ConfigError);
}

TEST_CASE("selftest passes") {
  std::ostringstream os;
  CHECK(run_selftest(os, 5));
  CHECK(os.str().find("FAIL") == std::string::npos);
}
