// Drives the built dramenc executable end to end.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dramenc/runner.hpp"

using namespace dramenc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("dramenc_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const fs::path kData = DRAMENC_TEST_DATA;

int cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = fmt::format("{} '{}' {} >/dev/null 2>&1", env, DRAMENC_CLI, args);
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  REQUIRE(it != header.end());
  return static_cast<std::size_t>(it - header.begin());
}

std::string coins() { return (kData / "natural" / "coins.pgm").string(); }

}  // namespace

TEST_CASE("run: ORG vs MBDC on one image") {
  TempDir tmp;
  REQUIRE(cli(fmt::format("run -i {} -s ORG -s MBDC -o {}", coins(), tmp.path.string())) == 0);
  const auto rows = csv_rows(tmp.path / "energy.csv");
  REQUIRE(rows.size() == 3);
  const auto& h = rows[0];
  CHECK(rows[1][column(h, "scheme")] == "ORG");
  CHECK(rows[2][column(h, "scheme")] == "MBDC");

  // the percentage column recomputes exactly from the raw counts
  for (const auto& [count, pct] : {std::pair{"term_total", "term_reduction_pct"}, {"term_data", "term_data_reduction_pct"},
                                   {"sw_total", "sw_reduction_pct"}}) {
    const auto base = std::stoull(rows[1][column(h, count)]);
    const auto mbdc = std::stoull(rows[2][column(h, count)]);
    CHECK(rows[2][column(h, pct)] == fmt::format("{}", reduction_pct(base, mbdc)));
    CHECK(rows[1][column(h, pct)] == "0");
  }
  CHECK(std::stod(rows[2][column(h, "term_reduction_pct")]) > 0);

  const auto q = csv_rows(tmp.path / "quality.csv");
  REQUIRE(q.size() == 3);
  CHECK(q[2][column(q[0], "psnr_db")] == "inf");
  CHECK(q[2][column(q[0], "ssim")] == "1");
  CHECK(csv_rows(tmp.path / "framemix.csv").size() == 1 + 2 * 9);
  CHECK(read_image(tmp.path / "recon" / "coins.pgm.MBDC.pgm") == read_image(coins()));
}

TEST_CASE("run: preset 90 is echoed as 7 bits") {
  TempDir tmp;
  REQUIRE(cli(fmt::format("run -i {} -s ZAC_DEST --limit 90 -o {} --no-recon", coins(), tmp.path.string())) == 0);
  const auto echo = nlohmann::json::parse(slurp(tmp.path / "config.json"));
  CHECK(echo["similarity_limit_bits"] == 7);
  CHECK(echo["similarity_preset"] == 90);
  CHECK(echo["baseline"] == "ZAC_DEST");
  CHECK(!fs::exists(tmp.path / "recon"));
  // the echo is itself a valid config
  CHECK(run_config_from_json(echo).similarity_limit_bits == 7);
}

TEST_CASE("run: config file plus flag overrides") {
  TempDir tmp;
  const auto cfg = tmp.path / "cfg.json";
  std::ofstream(cfg) << nlohmann::json{{"schemes", {"ORG", "ZAC_DEST"}},
                                       {"similarity_preset", 70},
                                       {"truncation_bits", 32},
                                       {"inputs", {coins()}},
                                       {"frame_log", "binary"},
                                       {"output_dir", (tmp.path / "from_file").string()}}
                            .dump();
  REQUIRE(cli(fmt::format("run -c {} --limit 80", cfg.string())) == 0);
  const auto echo = nlohmann::json::parse(slurp(tmp.path / "from_file" / "config.json"));
  CHECK(echo["similarity_limit_bits"] == 13);
  CHECK(echo["truncation_bits"] == 32);
  const auto frames = read_frame_log(tmp.path / "from_file" / "frames" / "coins.pgm.ZAC_DEST.dflg");
  CHECK(frames.size() == 1818 * 8);
  const Image out = read_image(tmp.path / "from_file" / "recon" / "coins.pgm.ZAC_DEST.pgm");
  for (auto p : out.pixels) REQUIRE((p & 0x0F) == 0);

  SUBCASE("env var redirects output, flag beats env") {
    const auto env = fmt::format("DRAMENC_OUT_DIR='{}'", (tmp.path / "from_env").string());
    REQUIRE(cli(fmt::format("run -c {} --no-recon", cfg.string()), env) == 0);
    CHECK(fs::exists(tmp.path / "from_env" / "energy.csv"));
    REQUIRE(cli(fmt::format("run -c {} --no-recon -o {}", cfg.string(), (tmp.path / "from_flag").string()), env) == 0);
    CHECK(fs::exists(tmp.path / "from_flag" / "energy.csv"));
  }
}

TEST_CASE("identical config and seed give byte-identical reports") {
  TempDir tmp;
  const auto a = tmp.path / "a";
  const auto b = tmp.path / "b";
  const std::string common =
      fmt::format("-i {} -i random:300 -i random_f32:100 --seed 11", (kData / "natural").string());
  REQUIRE(cli(fmt::format("run {} --no-recon -j 1 -o {}", common, a.string())) == 0);
  REQUIRE(cli(fmt::format("run {} --no-recon -j 6 -o {}", common, b.string())) == 0);
  for (const char* f : {"energy.csv", "energy.json", "quality.csv", "framemix.csv"}) {
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
  }
  REQUIRE(cli(fmt::format("sweep {} -s MBDC -s ZAC_DEST --baseline MBDC -j 1 -o {}", common, a.string())) == 0);
  REQUIRE(cli(fmt::format("sweep {} -s MBDC -s ZAC_DEST --baseline MBDC -j 5 -o {}", common, b.string())) == 0);
  CHECK(slurp(a / "sweep.csv") == slurp(b / "sweep.csv"));
  CHECK(slurp(a / "sweep_summary.csv") == slurp(b / "sweep_summary.csv"));
}

TEST_CASE("sweep: 4 limits x 2 truncations is 8 rows per input") {
  TempDir tmp;
  REQUIRE(cli(fmt::format("sweep -i {} -i random_f32:64 -s ZAC_DEST --grid-tol none,float32 -o {}", coins(),
                          tmp.path.string())) == 0);
  const auto rows = csv_rows(tmp.path / "sweep.csv");
  REQUIRE(rows.size() == 1 + 16);
  const auto& h = rows[0];
  int coins_rows = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r][0] == "coins.pgm") {
      ++coins_rows;
      CHECK(rows[r][column(h, "sign_exp_audit")] == "n/a");
    } else {
      CHECK(rows[r][column(h, "tolerance")] == "float32");
      CHECK(rows[r][column(h, "sign_exp_audit")] == "pass");
    }
  }
  CHECK(coins_rows == 8);
  CHECK(rows[1][column(h, "limit_pct")] == "90");
  CHECK(rows[1][column(h, "limit_bits")] == "7");
  const auto summary = csv_rows(tmp.path / "sweep_summary.csv");
  REQUIRE(summary.size() == 1 + 4);
  for (std::size_t r = 1; r < summary.size(); ++r) {
    CHECK(summary[r][column(summary[0], "points")] == "4");
    const auto flag = summary[r][column(summary[0], "termination_monotone")];
    CHECK((flag == "yes" || flag == "no"));
  }
}

TEST_CASE("img2trace and reconstruct") {
  TempDir tmp;
  for (const char* fmt : {"binary", "hex"}) {
    const auto trace = tmp.path / (std::string("t.") + fmt);
    REQUIRE(cli(fmt::format("img2trace {} {} --format {}", (kData / "astronaut_small.png").string(), trace.string(), fmt)) == 0);
    REQUIRE(cli(fmt::format("reconstruct {} {}", trace.string(), (tmp.path / "back.ppm").string())) == 0);
    CHECK(read_image(tmp.path / "back.ppm") == read_image(kData / "astronaut_small.ppm"));
  }

  SUBCASE("a truncated decode reconstructs with zero low nibbles") {
    SimConfig c;
    c.scheme = Scheme::kMbdc;
    c.approx.trunc_bits_per_value = 4;
    const auto decoded = simulate(image_to_cache_lines(read_image(coins())), c).decoded;
    write_trace(tmp.path / "dec.trace", decoded);
    REQUIRE(cli(fmt::format("reconstruct {} {}", (tmp.path / "dec.trace").string(), (tmp.path / "dec.pgm").string())) == 0);
    const Image img = read_image(tmp.path / "dec.pgm");
    CHECK(img.width == 384);
    for (auto p : img.pixels) REQUIRE((p & 0x0F) == 0);
  }
  SUBCASE("an exact trace runs ZAC_DEST losslessly") {
    REQUIRE(cli(fmt::format("img2trace {} {} --exact", coins(), (tmp.path / "exact.trace").string())) == 0);
    REQUIRE(cli(fmt::format("run -i {} -s ZAC_DEST --limit 70 -o {}", (tmp.path / "exact.trace").string(),
                            (tmp.path / "out").string())) == 0);
    CHECK(read_image(tmp.path / "out" / "recon" / "exact.trace.ZAC_DEST.pgm") == read_image(coins()));
  }
}

TEST_CASE("exit codes") {
  TempDir tmp;
  fs::create_directories(tmp.path / "empty");
  std::ofstream(tmp.path / "bad.trace") << "NOPE not a trace";
  std::ofstream(tmp.path / "bad.json") << "{\"schemes\": [\"ORG\"], \"baseline\": \"MBDC\"}";
  std::ofstream(tmp.path / "broken.json") << "{";
  const auto out = tmp.path / "o";

  CHECK(cli("") == 1);
  CHECK(cli("frobnicate") == 1);
  CHECK(cli("run --no-such-flag") == 1);
  CHECK(cli("--help") == 0);
  CHECK(cli("selftest") == 0);
  CHECK(cli(fmt::format("run -o {}", out.string())) == 1);  // no inputs
  CHECK(cli(fmt::format("run -i {} --limit 85 -o {}", coins(), out.string())) == 1);
  CHECK(cli(fmt::format("run -i {} --limit 90 --limit-bits 3 -o {}", coins(), out.string())) == 1);
  CHECK(cli(fmt::format("run -i {} -s ORG --baseline MBDC -o {}", coins(), out.string())) == 1);
  CHECK(cli(fmt::format("run -c {} -i {} -o {}", (tmp.path / "bad.json").string(), coins(), out.string())) == 1);
  CHECK(cli(fmt::format("run -c {} -i {} -o {}", (tmp.path / "broken.json").string(), coins(), out.string())) == 1);
  CHECK(cli(fmt::format("run -i {} -o {}", (tmp.path / "empty").string(), out.string())) == 2);
  CHECK(cli(fmt::format("run -i {} -o {}", (tmp.path / "missing.pgm").string(), out.string())) == 2);
  CHECK(cli(fmt::format("reconstruct {} {}", (tmp.path / "bad.trace").string(), (tmp.path / "x.pgm").string())) == 2);
  CHECK(cli(fmt::format("img2trace {} {}", (tmp.path / "missing.png").string(), (tmp.path / "x.trace").string())) == 2);
}
