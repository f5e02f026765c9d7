// dramenc: command-line front end for the data-bus encoding simulator.
//
// Exit codes: 0 ok, 1 usage or configuration error, 2 input error,
// 3 internal invariant violation.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dramenc/error.hpp"
#include "dramenc/runner.hpp"

namespace {

using namespace dramenc;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

constexpr const char* kOutDirEnv = "DRAMENC_OUT_DIR";

/// Flag overrides shared by `run` and `sweep`; unset fields keep the value
/// from the config file (or the built-in default).
struct Overrides {
  std::string config_path;
  std::vector<std::string> inputs;
  std::vector<std::string> schemes;
  std::optional<std::string> baseline;
  std::optional<int> capacity;
  std::optional<int> limit_preset;
  std::optional<int> limit_bits;
  std::optional<int> value_width;
  std::optional<int> truncation;
  std::optional<std::string> tolerance;
  std::optional<std::string> update;
  std::optional<std::string> sideband;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> frame_log;
  bool no_recon = false;
  std::vector<int> grid_limits;
  std::vector<int> grid_limit_bits;
  std::vector<int> grid_trunc;
  std::vector<std::string> grid_tol;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("-i,--input", o.inputs, "image, .f32 tensor, trace, raw file, directory, or random:N");
  cmd->add_option("-s,--scheme", o.schemes, "scheme to evaluate (repeatable): ORG DBI BDE_ORG MBDC ZAC_DEST");
  cmd->add_option("--baseline", o.baseline, "scheme percentage deltas are measured against");
  cmd->add_option("--capacity", o.capacity, "data table entries per chip (1-64)");
  cmd->add_option("--limit", o.limit_preset, "similarity preset in percent: 90, 80, 75 or 70");
  cmd->add_option("--limit-bits", o.limit_bits, "raw similarity limit in differing bits (0-64)");
  cmd->add_option("--value-width", o.value_width, "value width in bits: 8, 16, 32 or 64");
  cmd->add_option("--trunc", o.truncation, "truncated bits per 64-bit chip word");
  cmd->add_option("--tol", o.tolerance, "tolerance mode: none, eighth, quarter, float32");
  cmd->add_option("--update", o.update, "table update policy: algorithm or every_access");
  cmd->add_option("--sideband", o.sideband, "frame-type sideband energy: counted or free");
  cmd->add_option("-o,--out", o.out_dir, fmt::format("output directory (overrides {})", kOutDirEnv));
  cmd->add_option("--seed", o.seed, "seed for synthetic inputs");
  cmd->add_option("-j,--jobs", o.jobs, "worker threads");
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
  if (!o.inputs.empty()) c.inputs = o.inputs;
  if (!o.schemes.empty()) {
    c.schemes.clear();
    for (const auto& s : o.schemes) c.schemes.push_back(scheme_from_string(s));
    if (!o.baseline && std::find(c.schemes.begin(), c.schemes.end(), c.baseline) == c.schemes.end()) {
      c.baseline = c.schemes.front();
    }
  }
  if (o.baseline) c.baseline = scheme_from_string(*o.baseline);
  if (o.capacity) c.table_capacity = *o.capacity;
  if (o.limit_preset && o.limit_bits) throw ConfigError("give either --limit or --limit-bits, not both");
  if (o.limit_preset) c.set_similarity_preset(*o.limit_preset);
  if (o.limit_bits) {
    c.similarity_preset.reset();
    c.similarity_limit_bits = *o.limit_bits;
  }
  if (o.value_width) c.value_width = *o.value_width;
  if (o.truncation) c.truncation_bits = *o.truncation;
  if (o.tolerance) c.tolerance = tolerance_mode_from_string(*o.tolerance);
  if (o.update) c.update = update_policy_from_string(*o.update);
  if (o.sideband) c.sideband = sideband_cost_from_string(*o.sideband);
  if (const char* env = std::getenv(kOutDirEnv); env && *env) c.output_dir = env;
  if (o.out_dir) c.output_dir = *o.out_dir;
  if (o.seed) c.seed = *o.seed;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.no_recon) c.write_reconstructions = false;
  if (o.frame_log) {
    if (*o.frame_log == "none") c.frame_log = FrameLogFormat::kNone;
    else if (*o.frame_log == "binary") c.frame_log = FrameLogFormat::kBinary;
    else if (*o.frame_log == "jsonl") c.frame_log = FrameLogFormat::kJsonl;
    else throw ConfigError("unknown frame log format '" + *o.frame_log + "'");
  }
  if (!o.grid_limits.empty() || !o.grid_limit_bits.empty()) {
    c.sweep.limit_percents = o.grid_limits;
    c.sweep.limit_bits = o.grid_limit_bits;
  }
  if (!o.grid_trunc.empty()) c.sweep.truncation_bits = o.grid_trunc;
  if (!o.grid_tol.empty()) {
    c.sweep.tolerances.clear();
    for (const auto& t : o.grid_tol) c.sweep.tolerances.push_back(tolerance_mode_from_string(t));
  }
  c.validate();
  return c;
}

void print_files(const RunOutputs& out) {
  for (const auto& f : out.files) std::cout << "wrote " << f.string() << '\n';
}

int dispatch(int argc, char** argv) {
  CLI::App app{"DRAM data-bus encoding simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dramenc 1.0.0");

  Overrides run_o;
  auto* run = app.add_subcommand("run", "encode each input with each scheme and write reports");
  add_common_options(run, run_o);
  run->add_option("--frames", run_o.frame_log, "write frame logs: none, binary or jsonl");
  run->add_flag("--no-recon", run_o.no_recon, "skip writing reconstructed outputs");

  Overrides sweep_o;
  auto* sweep = app.add_subcommand("sweep", "sweep similarity limit x truncation x tolerance");
  add_common_options(sweep, sweep_o);
  sweep->add_option("--grid-limits", sweep_o.grid_limits, "similarity presets in percent")->delimiter(',');
  sweep->add_option("--grid-limit-bits", sweep_o.grid_limit_bits, "raw similarity limits in bits")->delimiter(',');
  sweep->add_option("--grid-trunc", sweep_o.grid_trunc, "truncated bits per chip word")->delimiter(',');
  sweep->add_option("--grid-tol", sweep_o.grid_tol, "tolerance modes")->delimiter(',');

  std::string i2t_in, i2t_out, i2t_format = "binary";
  bool i2t_exact = false;
  auto* img2trace = app.add_subcommand("img2trace", "convert an image, tensor or raw file to a trace file");
  img2trace->add_option("input", i2t_in, "input file")->required();
  img2trace->add_option("output", i2t_out, "trace file to write")->required();
  img2trace->add_option("-f,--format", i2t_format, "binary or hex")->check(CLI::IsMember({"binary", "hex"}));
  img2trace->add_flag("--exact", i2t_exact, "mark the stream as not approximable");

  std::string rec_in, rec_out;
  auto* reconstruct = app.add_subcommand("reconstruct", "turn a trace file back into an image (or raw bytes)");
  reconstruct->add_option("trace", rec_in, "trace file")->required();
  reconstruct->add_option("output", rec_out, "PGM/PPM (or raw) file to write")->required();

  std::uint64_t selftest_seed = 1;
  auto* selftest = app.add_subcommand("selftest", "run the built-in consistency checks");
  selftest->add_option("--seed", selftest_seed, "seed for the random streams");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (run->parsed()) {
    print_files(cmd_run(resolve(run_o)));
  } else if (sweep->parsed()) {
    print_files(cmd_sweep(resolve(sweep_o)));
  } else if (img2trace->parsed()) {
    cmd_img2trace(i2t_in, i2t_out, i2t_format == "hex" ? TraceFormat::kHex : TraceFormat::kBinary, !i2t_exact);
  } else if (reconstruct->parsed()) {
    cmd_reconstruct(rec_in, rec_out);
  } else if (selftest->parsed()) {
    return run_selftest(std::cout, selftest_seed) ? kExitOk : kExitInternal;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "dramenc: configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "dramenc: input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "dramenc: input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "dramenc: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
