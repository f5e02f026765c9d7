#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "dramenc/error.hpp"
#include "dramenc/runner.hpp"

namespace dramenc {

namespace {

std::string_view to_string(FrameLogFormat f) {
  switch (f) {
    case FrameLogFormat::kBinary: return "binary";
    case FrameLogFormat::kJsonl: return "jsonl";
    case FrameLogFormat::kNone: break;
  }
  return "none";
}

FrameLogFormat frame_log_from_string(std::string_view s) {
  if (s == "none") return FrameLogFormat::kNone;
  if (s == "binary") return FrameLogFormat::kBinary;
  if (s == "jsonl") return FrameLogFormat::kJsonl;
  throw ConfigError("unknown frame log format '" + std::string(s) + "'");
}

nlohmann::json tolerances_json(const std::vector<ToleranceMode>& v) {
  auto j = nlohmann::json::array();
  for (auto t : v) j.push_back(std::string(to_string(t)));
  return j;
}

void check_keys(const nlohmann::json& j, std::initializer_list<std::string_view> known, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <class T>
T get(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

SweepGrid sweep_from_json(const nlohmann::json& j) {
  check_keys(j, {"limit_percents", "limit_bits", "truncation_bits", "tolerances"}, "sweep");
  SweepGrid g;
  if (j.contains("limit_percents")) g.limit_percents = get<std::vector<int>>(j, "limit_percents");
  if (j.contains("limit_bits")) g.limit_bits = get<std::vector<int>>(j, "limit_bits");
  if (j.contains("truncation_bits")) g.truncation_bits = get<std::vector<int>>(j, "truncation_bits");
  if (j.contains("tolerances")) {
    g.tolerances.clear();
    for (const auto& s : get<std::vector<std::string>>(j, "tolerances")) g.tolerances.push_back(tolerance_mode_from_string(s));
  }
  return g;
}

}  // namespace

void RunConfig::set_similarity_preset(int percent) {
  similarity_limit_bits = similarity_preset_bits(percent);
  similarity_preset = percent;
}

void RunConfig::validate() const {
  if (schemes.empty()) throw ConfigError("scheme list is empty");
  if (std::set<Scheme>(schemes.begin(), schemes.end()).size() != schemes.size()) {
    throw ConfigError("scheme list has duplicates");
  }
  if (std::find(schemes.begin(), schemes.end(), baseline) == schemes.end()) {
    throw ConfigError("baseline " + std::string(to_string(baseline)) + " is not in the scheme list");
  }
  if (table_capacity < 1 || table_capacity > kMaxTableEntries) {
    throw ConfigError("table capacity must be in [1, 64], got " + std::to_string(table_capacity));
  }
  if (similarity_preset && similarity_preset_bits(*similarity_preset) != similarity_limit_bits) {
    throw ConfigError("similarity preset and limit bits disagree");
  }
  if (truncation_bits < 0 || truncation_bits >= 64 || truncation_bits * value_width % 64 != 0) {
    throw ConfigError("truncation bits per word must be in [0, 64) and split evenly across values, got " +
                      std::to_string(truncation_bits));
  }
  if (tolerance != ToleranceMode::kFloat32) {
    ApproxConfig{similarity_limit_bits, value_width, truncation_bits * value_width / 64, tolerance, true}.validate();
  }
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  energy.validate();
  if (sweep.limit_percents.empty() && sweep.limit_bits.empty()) throw ConfigError("sweep has no limits");
  if (sweep.truncation_bits.empty() || sweep.tolerances.empty()) throw ConfigError("sweep grid has an empty axis");
  for (int p : sweep.limit_percents) similarity_preset_bits(p);
  for (int b : sweep.limit_bits) {
    if (b < 0 || b > 64) throw ConfigError("sweep limit bits must be in [0, 64]");
  }
  for (int t : sweep.truncation_bits) {
    if (t < 0 || t >= 64 || t * value_width % 64 != 0) {
      throw ConfigError("sweep truncation " + std::to_string(t) + " does not split evenly across values");
    }
  }
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  auto schemes = nlohmann::json::array();
  for (auto s : c.schemes) schemes.push_back(std::string(to_string(s)));
  j["schemes"] = schemes;
  j["baseline"] = std::string(to_string(c.baseline));
  j["table_capacity"] = c.table_capacity;
  j["similarity_preset"] = c.similarity_preset ? nlohmann::json(*c.similarity_preset) : nlohmann::json(nullptr);
  j["similarity_limit_bits"] = c.similarity_limit_bits;
  j["value_width"] = c.value_width;
  j["truncation_bits"] = c.truncation_bits;
  j["tolerance"] = std::string(to_string(c.tolerance));
  j["update_policy"] = std::string(to_string(c.update));
  j["sideband_cost"] = std::string(to_string(c.sideband));
  j["energy"] = to_json(c.energy);
  j["inputs"] = c.inputs;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["write_reconstructions"] = c.write_reconstructions;
  j["frame_log"] = std::string(to_string(c.frame_log));
  j["sweep"] = {{"limit_percents", c.sweep.limit_percents},
                {"limit_bits", c.sweep.limit_bits},
                {"truncation_bits", c.sweep.truncation_bits},
                {"tolerances", tolerances_json(c.sweep.tolerances)}};
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  check_keys(j,
             {"schemes", "baseline", "table_capacity", "similarity_preset", "similarity_limit_bits", "value_width",
              "truncation_bits", "tolerance", "update_policy", "sideband_cost", "energy", "inputs", "output_dir",
              "seed", "jobs", "write_reconstructions", "frame_log", "sweep"},
             "config");
  RunConfig c;
  if (j.contains("schemes")) {
    c.schemes.clear();
    for (const auto& s : get<std::vector<std::string>>(j, "schemes")) c.schemes.push_back(scheme_from_string(s));
  }
  if (j.contains("baseline")) c.baseline = scheme_from_string(get<std::string>(j, "baseline"));
  if (j.contains("table_capacity")) c.table_capacity = get<int>(j, "table_capacity");

  const bool has_preset = j.contains("similarity_preset") && !j.at("similarity_preset").is_null();
  if (has_preset) {
    c.set_similarity_preset(get<int>(j, "similarity_preset"));
    if (j.contains("similarity_limit_bits") && get<int>(j, "similarity_limit_bits") != c.similarity_limit_bits) {
      throw ConfigError("similarity_limit_bits contradicts similarity_preset");
    }
  } else if (j.contains("similarity_limit_bits")) {
    c.similarity_preset.reset();
    c.similarity_limit_bits = get<int>(j, "similarity_limit_bits");
  } else if (j.contains("similarity_preset")) {
    throw ConfigError("similarity_preset is null but no similarity_limit_bits given");
  }

  if (j.contains("value_width")) c.value_width = get<int>(j, "value_width");
  if (j.contains("truncation_bits")) c.truncation_bits = get<int>(j, "truncation_bits");
  if (j.contains("tolerance")) c.tolerance = tolerance_mode_from_string(get<std::string>(j, "tolerance"));
  if (j.contains("update_policy")) c.update = update_policy_from_string(get<std::string>(j, "update_policy"));
  if (j.contains("sideband_cost")) c.sideband = sideband_cost_from_string(get<std::string>(j, "sideband_cost"));
  if (j.contains("energy")) c.energy = energy_params_from_json(j.at("energy"));
  if (j.contains("inputs")) c.inputs = get<std::vector<std::string>>(j, "inputs");
  if (j.contains("output_dir")) c.output_dir = get<std::string>(j, "output_dir");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("jobs")) c.jobs = get<int>(j, "jobs");
  if (j.contains("write_reconstructions")) c.write_reconstructions = get<bool>(j, "write_reconstructions");
  if (j.contains("frame_log")) c.frame_log = frame_log_from_string(get<std::string>(j, "frame_log"));
  if (j.contains("sweep")) c.sweep = sweep_from_json(j.at("sweep"));
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace dramenc
