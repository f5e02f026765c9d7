#pragma once

// Orchestration behind the command-line tool: run configuration, input
// discovery, the (input x scheme x grid point) job fan-out, and report files.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dramenc/simulate.hpp"

namespace dramenc {

struct SweepGrid {
  std::vector<int> limit_percents{90, 80, 75, 70};
  std::vector<int> limit_bits;  // raw limits, swept after the presets
  std::vector<int> truncation_bits{0, 16};
  std::vector<ToleranceMode> tolerances{ToleranceMode::kNone};

  friend bool operator==(const SweepGrid&, const SweepGrid&) = default;
};

enum class FrameLogFormat : std::uint8_t { kNone, kBinary, kJsonl };

struct RunConfig {
  std::vector<Scheme> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  Scheme baseline = Scheme::kOrg;
  int table_capacity = kMaxTableEntries;
  std::optional<int> similarity_preset = 80;
  int similarity_limit_bits = 13;  // derived from the preset when one is set
  int value_width = 8;
  int truncation_bits = 0;         // per 64-bit chip word
  ToleranceMode tolerance = ToleranceMode::kNone;
  UpdatePolicy update = UpdatePolicy::kAlgorithm;
  SidebandCost sideband = SidebandCost::kCounted;
  EnergyParams energy;
  std::vector<std::string> inputs;
  std::string output_dir = "dramenc-out";
  std::uint64_t seed = 1;
  int jobs = 1;
  bool write_reconstructions = true;
  FrameLogFormat frame_log = FrameLogFormat::kNone;
  SweepGrid sweep;

  /// Throws ConfigError.
  void validate() const;
  /// Sets a preset and the limit it maps to.
  void set_similarity_preset(int percent);

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json to_json(const RunConfig& c);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// A named, loaded input stream.
struct InputStream {
  std::string name;
  TraceStream stream;
  std::optional<Image> image;  // original raster, for quality scoring
};

/// Files are classified by extension: .pgm/.ppm/.png images, .f32 raw
/// little-endian float32 tensors, .trace/.dtrc trace files, anything else raw
/// bytes. Directories expand to their regular files in name order.
/// "random:N" and "random_f32:N" synthesize N cache lines from the seed.
std::vector<InputStream> load_inputs(const std::vector<std::string>& args, std::uint64_t seed);

/// Knobs one job applies to a stream: the truncation total is split evenly
/// across the values of the stream's element width.
ApproxConfig approx_for(const TraceMeta& meta, int value_width, int limit_bits, int truncation_bits,
                        ToleranceMode tol);

struct JobResult {
  std::string stream;
  Scheme scheme = Scheme::kOrg;
  std::optional<int> limit_percent;
  int limit_bits = 0;
  int truncation_bits = 0;
  ToleranceMode tolerance = ToleranceMode::kNone;
  std::uint64_t lines = 0;
  EnergyCounters counters;
  FrameMix mix;
  double psnr_db = 0;             // NaN when not applicable
  double ssim = 0;                // NaN when not applicable
  std::string sign_exp_audit = "n/a";
  std::uint64_t sync_divergences = 0;
};

/// Reduction of `value` relative to `baseline`, in percent.
double reduction_pct(std::uint64_t baseline, std::uint64_t value);

struct RunOutputs {
  std::vector<JobResult> rows;
  std::vector<std::filesystem::path> files;
};

/// One job per (input, scheme); writes energy.csv, energy.json, quality.csv,
/// framemix.csv and the reconstructions under cfg.output_dir.
RunOutputs cmd_run(const RunConfig& cfg);

/// One job per (input, grid point, scheme); writes sweep.csv and
/// sweep_summary.csv under cfg.output_dir.
RunOutputs cmd_sweep(const RunConfig& cfg);

/// Converts an image (or any supported input) into a trace file.
void cmd_img2trace(const std::filesystem::path& in, const std::filesystem::path& out, TraceFormat fmt,
                   bool approx_allowed);

/// Writes the image held by a trace as PGM/PPM (tensor and raw traces are
/// written back as bytes).
void cmd_reconstruct(const std::filesystem::path& trace, const std::filesystem::path& out);

/// Short built-in consistency battery. Prints one line per check.
bool run_selftest(std::ostream& os, std::uint64_t seed);

}  // namespace dramenc
