#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dramenc/error.hpp"
#include "dramenc/runner.hpp"

namespace dramenc {

namespace fs = std::filesystem;

namespace {

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return e;
}

std::uint64_t parse_count(std::string_view arg, std::string_view text) {
  std::uint64_t n = 0;
  if (text.empty()) throw ConfigError("missing count in input '" + std::string(arg) + "'");
  for (char ch : text) {
    if (ch < '0' || ch > '9') throw ConfigError("bad count in input '" + std::string(arg) + "'");
    n = n * 10 + static_cast<std::uint64_t>(ch - '0');
  }
  return n;
}

std::vector<std::uint8_t> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), {}};
}

InputStream load_file(const fs::path& p) {
  InputStream s;
  s.name = p.filename().string();
  const std::string ext = lower_ext(p);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".png") {
    s.image = read_image(p);
    s.stream = image_to_cache_lines(*s.image);
  } else if (ext == ".f32") {
    const auto bytes = read_file(p);
    if (bytes.size() % 4 != 0) throw InputError(p.string() + ": float32 tensor size is not a multiple of 4 bytes");
    std::vector<float> v(bytes.size() / 4);
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::uint32_t u = 0;
      for (int b = 0; b < 4; ++b) u |= std::uint32_t{bytes[i * 4 + static_cast<std::size_t>(b)]} << (8 * b);
      v[i] = std::bit_cast<float>(u);
    }
    s.stream = tensor_f32_to_cache_lines(v);
  } else if (ext == ".trace" || ext == ".dtrc") {
    s.stream = read_trace(p);
    if (s.stream.meta.kind == TraceKind::kImage) s.image = cache_lines_to_image(s.stream);
  } else {
    s.stream = raw_to_cache_lines(p);
  }
  return s;
}

InputStream synthetic(std::string_view arg, std::uint64_t seed) {
  InputStream s;
  std::mt19937_64 rng(seed);
  if (arg.starts_with("random_f32:")) {
    const auto n = parse_count(arg, arg.substr(11));
    std::normal_distribution<float> dist(0.0f, 0.05f);
    std::vector<float> v(n * (kLineBytes / 4));
    for (auto& x : v) x = dist(rng);
    s.name = fmt::format("random_f32-{}", n);
    s.stream = tensor_f32_to_cache_lines(v);
  } else {
    const auto n = parse_count(arg, arg.substr(7));
    std::vector<std::uint8_t> bytes(n * kLineBytes);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
    s.name = fmt::format("random-{}", n);
    s.stream = bytes_to_cache_lines(bytes);
  }
  return s;
}

/// Runs fn(0..n-1) on up to `jobs` threads. The first failing job (by index)
/// is rethrown after all threads join.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string file_stem(const JobResult& r) {
  std::string s = r.stream;
  for (auto& ch : s) {
    if (ch == '/' || ch == '\\' || ch == ' ') ch = '_';
  }
  return s + "." + std::string(to_string(r.scheme));
}

double mix_fraction(const FrameMix& m, FrameType t) {
  return m.frames() == 0 ? std::nan("") : m.fraction(t);
}

std::string limit_percent_field(const JobResult& r) {
  return r.limit_percent ? std::to_string(*r.limit_percent) : std::string();
}

struct Job {
  std::size_t input = 0;
  Scheme scheme = Scheme::kOrg;
  std::optional<int> limit_percent;
  int limit_bits = 0;
  int truncation_bits = 0;
  ToleranceMode tolerance = ToleranceMode::kNone;
  std::uint32_t config_id = 0;
};

struct JobSinks {
  fs::path recon_dir;   // empty: no reconstructions
  fs::path frames_dir;  // empty: no frame logs
  FrameLogFormat frame_log = FrameLogFormat::kNone;
};

std::string sign_exp_audit(const TraceStream& original, const TraceStream& decoded) {
  const auto a = cache_lines_to_tensor_f32(original);
  const auto b = cache_lines_to_tensor_f32(decoded);
  if (a.size() != b.size()) return "fail";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((std::bit_cast<std::uint32_t>(a[i]) ^ std::bit_cast<std::uint32_t>(b[i])) & 0xFF800000u) return "fail";
  }
  return "pass";
}

JobResult execute(const RunConfig& cfg, const InputStream& in, const Job& job, const JobSinks& sinks) {
  SimConfig sc;
  sc.scheme = job.scheme;
  sc.table_capacity = cfg.table_capacity;
  sc.approx = approx_for(in.stream.meta, cfg.value_width, job.limit_bits, job.truncation_bits, job.tolerance);
  sc.update = cfg.update;
  sc.sideband = cfg.sideband;
  sc.record_frames = !sinks.frames_dir.empty() && sinks.frame_log != FrameLogFormat::kNone;
  sc.check_sync = true;
  sc.config_id = job.config_id;
  const SimResult sim = simulate(in.stream, sc);
  if (sim.sync_divergences != 0) {
    throw DesyncError(fmt::format("{} / {}: sender and receiver tables diverged {} times", in.name,
                                  to_string(job.scheme), sim.sync_divergences));
  }

  JobResult r;
  r.stream = in.name;
  r.scheme = job.scheme;
  r.limit_percent = job.limit_percent;
  r.limit_bits = job.limit_bits;
  r.truncation_bits = job.truncation_bits;
  r.tolerance = sim.approx.tol_mode;
  r.lines = in.stream.lines.size();
  r.counters = sim.counters;
  r.mix = sim.mix;
  r.sync_divergences = sim.sync_divergences;
  r.psnr_db = std::nan("");
  r.ssim = std::nan("");

  const std::string stem = file_stem(r);
  if (in.image) {
    const Image out = cache_lines_to_image(sim.decoded);
    r.psnr_db = psnr(*in.image, out);
    r.ssim = ssim(*in.image, out);
    if (!sinks.recon_dir.empty()) write_pnm(sinks.recon_dir / (stem + (out.channels == 3 ? ".ppm" : ".pgm")), out);
  } else {
    const auto ref = stream_bytes(in.stream);
    const auto out = stream_bytes(sim.decoded);
    if (in.stream.meta.kind == TraceKind::kTensorF32) {
      r.sign_exp_audit = sign_exp_audit(in.stream, sim.decoded);
    } else if (!ref.empty()) {
      r.psnr_db = psnr(ref, out);
    }
    if (!sinks.recon_dir.empty()) {
      const char* ext = in.stream.meta.kind == TraceKind::kTensorF32 ? ".f32" : ".bin";
      std::ofstream f(sinks.recon_dir / (stem + ext), std::ios::binary);
      f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
      if (!f) throw InputError("cannot write reconstruction for " + stem);
    }
  }
  if (sc.record_frames) {
    if (sinks.frame_log == FrameLogFormat::kBinary) {
      write_frame_log(sinks.frames_dir / (stem + ".dflg"), sim.frames);
    } else {
      write_frame_log_jsonl(sinks.frames_dir / (stem + ".jsonl"), sim.frames);
    }
  }
  return r;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw InputError("cannot write " + p.string());
  return f;
}

void write_config_echo(const fs::path& dir, const RunConfig& cfg, std::vector<fs::path>& files) {
  const auto p = dir / "config.json";
  open_out(p) << to_json(cfg).dump(2) << '\n';
  files.push_back(p);
}

fs::path prepare_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

/// Index of the baseline row sharing `r`'s stream and grid point.
const JobResult* find_baseline(const std::vector<JobResult>& rows, std::size_t group_begin, std::size_t group_size,
                               Scheme baseline) {
  for (std::size_t k = group_begin; k < group_begin + group_size; ++k) {
    if (rows[k].scheme == baseline) return &rows[k];
  }
  return nullptr;
}

std::string energy_header_comment(const RunConfig& cfg) {
  return fmt::format("# i_term={} v_dd={} t_bit={} c_line={} sideband={} baseline={}\n", cfg.energy.i_term,
                     cfg.energy.v_dd, cfg.energy.t_bit, cfg.energy.c_line, to_string(cfg.sideband),
                     to_string(cfg.baseline));
}

}  // namespace

double reduction_pct(std::uint64_t baseline, std::uint64_t value) {
  if (baseline == 0) return std::nan("");
  return 100.0 * (static_cast<double>(baseline) - static_cast<double>(value)) / static_cast<double>(baseline);
}

std::vector<InputStream> load_inputs(const std::vector<std::string>& args, std::uint64_t seed) {
  if (args.empty()) throw ConfigError("no inputs given");
  std::vector<InputStream> out;
  for (const auto& arg : args) {
    if (arg.starts_with("random:") || arg.starts_with("random_f32:")) {
      out.push_back(synthetic(arg, seed));
      continue;
    }
    const fs::path p(arg);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && !e.path().filename().string().starts_with(".")) files.push_back(e.path());
      }
      if (files.empty()) throw InputError("input directory " + p.string() + " has no files");
      std::sort(files.begin(), files.end());
      for (const auto& f : files) out.push_back(load_file(f));
    } else if (fs::exists(p, ec)) {
      out.push_back(load_file(p));
    } else {
      throw InputError("input not found: " + arg);
    }
  }
  std::map<std::string, int> seen;
  for (auto& s : out) {
    const int n = seen[s.name]++;
    if (n > 0) s.name += fmt::format("#{}", n);
  }
  return out;
}

ApproxConfig approx_for(const TraceMeta& meta, int value_width, int limit_bits, int truncation_bits,
                        ToleranceMode tol) {
  const bool tensor = meta.kind == TraceKind::kTensorF32;
  const int width = tensor ? 32 : value_width;
  if (truncation_bits < 0 || truncation_bits * width % 64 != 0) {
    throw ConfigError(fmt::format("{} truncated bits per word do not split across {}-bit values", truncation_bits,
                                  width));
  }
  ApproxConfig a;
  a.similarity_limit_bits = limit_bits;
  a.value_width = width;
  a.trunc_bits_per_value = truncation_bits * width / 64;
  a.tol_mode = tensor ? ToleranceMode::kFloat32 : tol;
  return effective_approx(meta, a);
}

RunOutputs cmd_run(const RunConfig& cfg) {
  cfg.validate();
  const auto inputs = load_inputs(cfg.inputs, cfg.seed);
  const fs::path dir = prepare_dir(cfg);
  JobSinks sinks;
  if (cfg.write_reconstructions) fs::create_directories(sinks.recon_dir = dir / "recon");
  if (cfg.frame_log != FrameLogFormat::kNone) fs::create_directories(sinks.frames_dir = dir / "frames");
  sinks.frame_log = cfg.frame_log;

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (Scheme s : cfg.schemes) {
      jobs.push_back({i, s, cfg.similarity_preset, cfg.similarity_limit_bits, cfg.truncation_bits, cfg.tolerance, 0});
    }
  }
  RunOutputs out;
  out.rows.resize(jobs.size());
  parallel_for(jobs.size(), cfg.jobs,
               [&](std::size_t k) { out.rows[k] = execute(cfg, inputs[jobs[k].input], jobs[k], sinks); });

  write_config_echo(dir, cfg, out.files);
  const std::size_t per_input = cfg.schemes.size();

  // energy.csv / energy.json
  {
    const auto p = dir / "energy.csv";
    auto f = open_out(p);
    f << energy_header_comment(cfg);
    f << "stream,scheme,limit_bits,trunc_bits,tolerance,lines,term_data,term_index,term_flags,term_total,"
         "sw_data,sw_index,sw_flags,sw_total,term_j,sw_j,total_j,term_reduction_pct,term_data_reduction_pct,"
         "sw_reduction_pct\n";
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < out.rows.size(); ++k) {
      const auto& r = out.rows[k];
      const auto* b = find_baseline(out.rows, k / per_input * per_input, per_input, cfg.baseline);
      const auto& t = r.counters.termination;
      const auto& s = r.counters.switching;
      const EnergyReport e = to_joules(r.counters, cfg.energy);
      const double tp = reduction_pct(b->counters.termination.total(), t.total());
      const double dp = reduction_pct(b->counters.termination.data, t.data);
      const double sp = reduction_pct(b->counters.switching.total(), s.total());
      f << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(r.stream),
                       to_string(r.scheme), r.limit_bits, r.truncation_bits, to_string(r.tolerance), r.lines, t.data,
                       t.index, t.flags, t.total(), s.data, s.index, s.flags, s.total(), e.termination_j.total(),
                       e.switching_j.total(), e.total_j(), tp, dp, sp);
      rows.push_back({{"stream", r.stream},
                      {"scheme", std::string(to_string(r.scheme))},
                      {"limit_bits", r.limit_bits},
                      {"trunc_bits", r.truncation_bits},
                      {"tolerance", std::string(to_string(r.tolerance))},
                      {"lines", r.lines},
                      {"termination", {{"data", t.data}, {"index", t.index}, {"flags", t.flags}}},
                      {"switching", {{"data", s.data}, {"index", s.index}, {"flags", s.flags}}},
                      {"termination_j", e.termination_j.total()},
                      {"switching_j", e.switching_j.total()},
                      {"total_j", e.total_j()}});
    }
    out.files.push_back(p);
    const auto pj = dir / "energy.json";
    nlohmann::json doc{{"energy_params", to_json(cfg.energy)},
                       {"sideband_cost", std::string(to_string(cfg.sideband))},
                       {"baseline", std::string(to_string(cfg.baseline))},
                       {"rows", rows}};
    open_out(pj) << doc.dump(2) << '\n';
    out.files.push_back(pj);
  }

  // quality.csv
  {
    const auto p = dir / "quality.csv";
    auto f = open_out(p);
    f << "stream,scheme,limit,trunc,tol,psnr_db,ssim,ssim_ratio,frac_zero,frac_ohe_skip,frac_xor_encoded,"
         "frac_raw,sign_exp_audit\n";
    for (std::size_t k = 0; k < out.rows.size(); ++k) {
      const auto& r = out.rows[k];
      const auto* b = find_baseline(out.rows, k / per_input * per_input, per_input, cfg.baseline);
      f << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(r.stream), to_string(r.scheme),
                       r.limit_bits, r.truncation_bits, to_string(r.tolerance), r.psnr_db, r.ssim, r.ssim / b->ssim,
                       mix_fraction(r.mix, FrameType::kZero), mix_fraction(r.mix, FrameType::kOheSkip),
                       mix_fraction(r.mix, FrameType::kXorEncoded), mix_fraction(r.mix, FrameType::kRaw),
                       r.sign_exp_audit);
    }
    out.files.push_back(p);
  }

  // framemix.csv
  {
    const auto p = dir / "framemix.csv";
    auto f = open_out(p);
    f << "stream,scheme,chip,zero,ohe_skip,xor_encoded,raw,frames\n";
    for (const auto& r : out.rows) {
      auto line = [&](std::string_view chip, const FrameTally& t) {
        f << fmt::format("{},{},{},{},{},{},{},{}\n", csv_field(r.stream), to_string(r.scheme), chip, t[0], t[1],
                         t[2], t[3], t[0] + t[1] + t[2] + t[3]);
      };
      line("all", r.mix.total);
      for (int c = 0; c < kChips; ++c) line(std::to_string(c), r.mix.per_chip[static_cast<std::size_t>(c)]);
    }
    out.files.push_back(p);
  }
  return out;
}

RunOutputs cmd_sweep(const RunConfig& cfg) {
  cfg.validate();
  const auto inputs = load_inputs(cfg.inputs, cfg.seed);
  const fs::path dir = prepare_dir(cfg);

  struct Point {
    std::optional<int> percent;
    int bits;
    int trunc;
    ToleranceMode tol;
  };
  std::vector<Point> grid;
  for (auto tol : cfg.sweep.tolerances) {
    for (int trunc : cfg.sweep.truncation_bits) {
      for (int p : cfg.sweep.limit_percents) grid.push_back({p, similarity_preset_bits(p), trunc, tol});
      for (int b : cfg.sweep.limit_bits) grid.push_back({std::nullopt, b, trunc, tol});
    }
  }

  // Tensors always run with float32 tolerance; other streams skip it.
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const bool tensor = inputs[i].stream.meta.kind == TraceKind::kTensorF32;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const Point& pt = grid[g];
      if (!tensor && pt.tol == ToleranceMode::kFloat32) continue;
      if (tensor) {
        // collapse the tolerance axis: run only the first tolerance entry
        if (pt.tol != cfg.sweep.tolerances.front()) continue;
      }
      for (Scheme s : cfg.schemes) {
        jobs.push_back({i, s, pt.percent, pt.bits, pt.trunc, pt.tol, static_cast<std::uint32_t>(g)});
      }
    }
  }
  if (jobs.empty()) throw ConfigError("sweep grid produced no jobs for the given inputs");

  RunOutputs out;
  out.rows.resize(jobs.size());
  parallel_for(jobs.size(), cfg.jobs, [&](std::size_t k) { out.rows[k] = execute(cfg, inputs[jobs[k].input], jobs[k], {}); });

  write_config_echo(dir, cfg, out.files);
  const std::size_t per_point = cfg.schemes.size();
  {
    const auto p = dir / "sweep.csv";
    auto f = open_out(p);
    f << energy_header_comment(cfg);
    f << "stream,scheme,config_id,limit_pct,limit_bits,trunc_bits,tolerance,lines,term_data,term_index,term_flags,"
         "term_total,sw_total,total_j,term_reduction_pct,psnr_db,ssim,frac_zero,frac_ohe_skip,frac_xor_encoded,"
         "frac_raw,sign_exp_audit\n";
    for (std::size_t k = 0; k < out.rows.size(); ++k) {
      const auto& r = out.rows[k];
      const auto* b = find_baseline(out.rows, k / per_point * per_point, per_point, cfg.baseline);
      const auto& t = r.counters.termination;
      f << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(r.stream),
                       to_string(r.scheme), jobs[k].config_id, limit_percent_field(r), r.limit_bits,
                       r.truncation_bits, to_string(r.tolerance), r.lines, t.data, t.index, t.flags, t.total(),
                       r.counters.switching.total(), to_joules(r.counters, cfg.energy).total_j(),
                       reduction_pct(b->counters.termination.total(), t.total()), r.psnr_db, r.ssim,
                       mix_fraction(r.mix, FrameType::kZero), mix_fraction(r.mix, FrameType::kOheSkip),
                       mix_fraction(r.mix, FrameType::kXorEncoded), mix_fraction(r.mix, FrameType::kRaw),
                       r.sign_exp_audit);
    }
    out.files.push_back(p);
  }
  {
    // termination should not grow as the limit loosens (more differing bits allowed)
    struct Key {
      std::string stream;
      Scheme scheme;
      int trunc;
      ToleranceMode tol;
      auto operator<=>(const Key&) const = default;
    };
    std::map<Key, std::vector<std::pair<int, std::uint64_t>>> series;
    std::vector<Key> order;
    for (const auto& r : out.rows) {
      Key key{r.stream, r.scheme, r.truncation_bits, r.tolerance};
      auto [it, fresh] = series.try_emplace(key);
      if (fresh) order.push_back(key);
      it->second.emplace_back(r.limit_bits, r.counters.termination.total());
    }
    const auto p = dir / "sweep_summary.csv";
    auto f = open_out(p);
    f << "stream,scheme,trunc_bits,tolerance,points,termination_monotone\n";
    for (const auto& key : order) {
      auto pts = series[key];
      std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      bool mono = true;
      for (std::size_t k = 1; k < pts.size(); ++k) mono = mono && pts[k].second <= pts[k - 1].second;
      f << fmt::format("{},{},{},{},{},{}\n", csv_field(key.stream), to_string(key.scheme), key.trunc,
                       to_string(key.tol), pts.size(), mono ? "yes" : "no");
    }
    out.files.push_back(p);
  }
  return out;
}

void cmd_img2trace(const fs::path& in, const fs::path& out, TraceFormat fmt, bool approx_allowed) {
  InputStream s = load_file(in);
  s.stream.meta.approx_allowed = approx_allowed;
  write_trace(out, s.stream, fmt);
}

void cmd_reconstruct(const fs::path& trace, const fs::path& out) {
  const TraceStream s = read_trace(trace);
  if (s.meta.kind == TraceKind::kImage) {
    write_pnm(out, cache_lines_to_image(s));
    return;
  }
  const auto bytes = stream_bytes(s);
  auto f = open_out(out);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

bool run_selftest(std::ostream& os, std::uint64_t seed) {
  bool all = true;
  auto check = [&](std::string_view name, bool ok) {
    os << (ok ? "ok   " : "FAIL ") << name << '\n';
    all = all && ok;
  };

  check("similarity presets 90/80/75/70 -> 7/13/16/20",
        similarity_preset_bits(90) == 7 && similarity_preset_bits(80) == 13 && similarity_preset_bits(75) == 16 &&
            similarity_preset_bits(70) == 20);
  check("one-hot index 63", ohe_encode(63) == 0x8000000000000000ULL && ohe_decode(ohe_encode(63)) == 63);

  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> bytes(64 * 2000);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    // half uniform noise, half slowly varying values so tables get hits
    bytes[i] = i < bytes.size() / 2 ? static_cast<std::uint8_t>(rng()) : static_cast<std::uint8_t>(i / 640 + (rng() & 3));
  }
  const TraceStream stream = bytes_to_cache_lines(bytes);
  for (Scheme s : {Scheme::kOrg, Scheme::kDbi, Scheme::kBdeOrg, Scheme::kMbdc}) {
    SimConfig c;
    c.scheme = s;
    c.check_sync = true;
    const auto r = simulate(stream, c);
    check(fmt::format("{} round trip", to_string(s)), r.decoded == stream && r.sync_divergences == 0);
  }

  SimConfig z;
  z.scheme = Scheme::kZacDest;
  z.approx.similarity_limit_bits = 16;
  z.approx.trunc_bits_per_value = 2;
  z.approx.tol_mode = ToleranceMode::kQuarter;
  z.check_sync = true;
  const auto r = simulate(stream, z);
  const ChipMasks m = r.approx.masks();
  bool bounded = r.sync_divergences == 0;
  for (std::size_t l = 0; l < stream.lines.size() && bounded; ++l) {
    const auto a = split_cache_line(stream.lines[l]);
    const auto b = split_cache_line(r.decoded.lines[l]);
    for (std::size_t c = 0; c < kChips; ++c) {
      const ChipWord want = a[c] & ~m.truncation[c];
      const ChipWord diff = want ^ b[c];
      bounded = bounded && popcount(diff) <= z.approx.similarity_limit_bits && (diff & m.tolerance[c]) == 0 &&
                (b[c] & m.truncation[c]) == 0;
    }
  }
  check("ZAC_DEST reconstruction within limit, tolerance and truncation", bounded);

  const auto zeros = bytes_to_cache_lines(std::vector<std::uint8_t>(64 * 64, 0));
  z.approx.trunc_bits_per_value = 0;
  const auto zr = simulate(zeros, z);
  check("all-zero stream sends only ZERO frames",
        zr.mix.fraction(FrameType::kZero) == 1.0 && zr.counters.termination.data == 0);
  return all;
}

}  // namespace dramenc
