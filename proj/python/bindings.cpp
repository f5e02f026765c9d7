// Python bindings: codec primitives, the channel simulator, quality metrics,
// trace files and the run/sweep drivers.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include <nlohmann/json.hpp>

#include "dramenc/error.hpp"
#include "dramenc/runner.hpp"

namespace py = pybind11;
using namespace dramenc;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using F32Array = py::array_t<float, py::array::c_style | py::array::forcecast>;

Image image_from_array(const U8Array& a) {
  if (a.ndim() != 2 && !(a.ndim() == 3 && a.shape(2) == 3)) {
    throw py::value_error("image must have shape (H, W) or (H, W, 3)");
  }
  Image img;
  img.height = static_cast<std::uint32_t>(a.shape(0));
  img.width = static_cast<std::uint32_t>(a.shape(1));
  img.channels = a.ndim() == 3 ? 3 : 1;
  img.pixels.assign(a.data(), a.data() + a.size());
  return img;
}

py::array image_to_array(const Image& img) {
  std::vector<py::ssize_t> shape{img.height, img.width};
  if (img.channels == 3) shape.push_back(3);
  U8Array out(shape);
  std::memcpy(out.mutable_data(), img.pixels.data(), img.pixels.size());
  return std::move(out);
}

/// numpy uint8 2-D/3-D -> image stream, float32 -> tensor stream, bytes -> raw.
TraceStream stream_from_python(const py::object& data, bool approx_allowed) {
  if (py::isinstance<py::bytes>(data) || py::isinstance<py::bytearray>(data)) {
    const std::string s = data.cast<std::string>();
    return bytes_to_cache_lines(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()), approx_allowed);
  }
  const auto arr = py::array::ensure(data);
  if (!arr) throw py::type_error("expected a numpy array or bytes");
  if (arr.dtype().is(py::dtype::of<float>())) {
    const auto f = arr.cast<F32Array>();
    return tensor_f32_to_cache_lines(std::span(f.data(), static_cast<std::size_t>(f.size())), approx_allowed);
  }
  if (arr.dtype().is(py::dtype::of<std::uint8_t>())) {
    return image_to_cache_lines(image_from_array(arr.cast<U8Array>()), approx_allowed);
  }
  throw py::type_error("arrays must be uint8 images or float32 tensors");
}

py::object stream_to_python(const TraceStream& s) {
  switch (s.meta.kind) {
    case TraceKind::kImage: return image_to_array(cache_lines_to_image(s));
    case TraceKind::kTensorF32: {
      const auto v = cache_lines_to_tensor_f32(s);
      F32Array out(static_cast<py::ssize_t>(v.size()));
      std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(float));
      return std::move(out);
    }
    case TraceKind::kRaw: break;
  }
  const auto b = stream_bytes(s);
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

py::dict groups(const LineGroupCounts& g) {
  py::dict d;
  d["data"] = g.data;
  d["index"] = g.index;
  d["flags"] = g.flags;
  d["total"] = g.total();
  return d;
}

py::dict mix_dict(const FrameMix& m) {
  py::dict d;
  for (auto t : {FrameType::kZero, FrameType::kOheSkip, FrameType::kXorEncoded, FrameType::kRaw}) {
    d[py::str(std::string(to_string(t)))] = m.total[static_cast<std::size_t>(t)];
  }
  return d;
}

py::dict row_dict(const JobResult& r) {
  py::dict d;
  d["stream"] = r.stream;
  d["scheme"] = std::string(to_string(r.scheme));
  d["limit_percent"] = r.limit_percent ? py::object(py::int_(*r.limit_percent)) : py::object(py::none());
  d["limit_bits"] = r.limit_bits;
  d["trunc_bits"] = r.truncation_bits;
  d["tolerance"] = std::string(to_string(r.tolerance));
  d["lines"] = r.lines;
  d["termination"] = groups(r.counters.termination);
  d["switching"] = groups(r.counters.switching);
  d["frame_mix"] = mix_dict(r.mix);
  d["psnr_db"] = r.psnr_db;
  d["ssim"] = r.ssim;
  d["sign_exp_audit"] = r.sign_exp_audit;
  return d;
}

RunConfig config_from_python(const py::dict& cfg) {
  const auto json = py::module_::import("json");
  return run_config_from_json(nlohmann::json::parse(json.attr("dumps")(cfg).cast<std::string>()));
}

py::dict run_outputs(const RunOutputs& out) {
  py::list rows;
  for (const auto& r : out.rows) rows.append(row_dict(r));
  py::list files;
  for (const auto& f : out.files) files.append(f.string());
  py::dict d;
  d["rows"] = rows;
  d["files"] = files;
  return d;
}

}  // namespace

PYBIND11_MODULE(_dramenc, m) {
  m.doc() = "DRAM data-bus encoding simulator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_OSError);
  py::register_exception<MalformedFrame>(m, "MalformedFrame", PyExc_ValueError);
  py::register_exception<DesyncError>(m, "DesyncError", PyExc_RuntimeError);

  py::enum_<Scheme>(m, "Scheme")
      .value("ORG", Scheme::kOrg)
      .value("DBI", Scheme::kDbi)
      .value("BDE_ORG", Scheme::kBdeOrg)
      .value("MBDC", Scheme::kMbdc)
      .value("ZAC_DEST", Scheme::kZacDest);
  py::enum_<FrameType>(m, "FrameType")
      .value("ZERO", FrameType::kZero)
      .value("OHE_SKIP", FrameType::kOheSkip)
      .value("XOR_ENCODED", FrameType::kXorEncoded)
      .value("RAW", FrameType::kRaw);

  m.def("similarity_preset_bits", &similarity_preset_bits, py::arg("percent"));
  m.def("build_mask", [](const std::string& kind, int width, int bits) {
    if (kind != "truncation" && kind != "tolerance") throw py::value_error("kind must be 'truncation' or 'tolerance'");
    return build_mask(kind == "truncation" ? MaskKind::kTruncation : MaskKind::kTolerance, width, bits).bits;
  }, py::arg("kind"), py::arg("value_width"), py::arg("bits_per_value"));
  m.def("dbi_encode", [](ChipWord w) {
    const auto r = dbi_encode(w);
    return py::make_tuple(r.payload, r.flags);
  }, py::arg("word"), "Returns (payload, flags).");
  m.def("dbi_decode", &dbi_decode, py::arg("payload"), py::arg("flags"));
  m.def("ohe_encode", &ohe_encode, py::arg("slot"));
  m.def("ohe_decode", &ohe_decode, py::arg("word"));
  m.def("split_cache_line", [](const py::bytes& b) {
    const std::string s = b;
    if (s.size() != kLineBytes) throw py::value_error("a cache line is 64 bytes");
    CacheLine line;
    std::memcpy(line.data(), s.data(), kLineBytes);
    const auto w = split_cache_line(line);
    return std::vector<ChipWord>(w.begin(), w.end());
  }, py::arg("line"));

  py::class_<Frame>(m, "Frame")
      .def(py::init<>())
      .def_readwrite("type", &Frame::type)
      .def_readwrite("payload", &Frame::payload)
      .def_readwrite("dbi_flags", &Frame::dbi_flags)
      .def_readwrite("index", &Frame::index)
      .def_readwrite("sideband", &Frame::sideband)
      .def("__eq__", [](const Frame& a, const Frame& b) { return a == b; })
      .def("__repr__", [](const Frame& f) {
        return "Frame(" + std::string(to_string(f.type)) + ", payload=" + std::to_string(f.payload) + ")";
      });

  py::class_<DataTable>(m, "DataTable")
      .def(py::init<int, bool>(), py::arg("capacity") = kMaxTableEntries, py::arg("dedupe") = true)
      .def("insert", &DataTable::insert, py::arg("word"))
      .def("entries", &DataTable::entries)
      .def("__len__", &DataTable::size)
      .def("mse_search", [](const DataTable& t, ChipWord q, ChipWord trunc) -> py::object {
        const auto r = t.mse_search(q, trunc);
        if (!r) return py::none();
        return py::make_tuple(r->index, r->entry, r->xor_weight);
      }, py::arg("query"), py::arg("trunc_mask") = 0, "Returns (index, entry, xor_weight) or None.");

  py::class_<CodecState>(m, "ChipCodec", "One side of one chip's encoder")
      .def(py::init([](const std::string& scheme, int capacity, ChipWord trunc, ChipWord tol, int limit,
                       const std::string& update) {
             return CodecState(scheme_from_string(scheme), capacity,
                               CodecParams{trunc, tol, limit, update_policy_from_string(update)});
           }),
           py::arg("scheme"), py::arg("capacity") = kMaxTableEntries, py::arg("trunc_mask") = 0,
           py::arg("tol_mask") = 0, py::arg("similarity_limit_bits") = 0, py::arg("update") = "algorithm")
      .def("encode", &encode_step, py::arg("word"))
      .def("decode", &decode_step, py::arg("frame"))
      .def_property_readonly("table", [](const CodecState& s) { return s.table.entries(); });

  m.def("count_termination", [](const Frame& f, const std::string& sideband) {
    return groups(count_termination(f, sideband_cost_from_string(sideband)));
  }, py::arg("frame"), py::arg("sideband") = "counted");

  m.def(
      "simulate",
      [](const py::object& data, const std::string& scheme, int limit_bits, int trunc_bits_per_value,
         const std::string& tolerance, int value_width, int capacity, const std::string& sideband,
         const std::string& update, bool approx_allowed, bool record_frames) {
        SimConfig c;
        c.scheme = scheme_from_string(scheme);
        c.table_capacity = capacity;
        c.approx = {limit_bits, value_width, trunc_bits_per_value, tolerance_mode_from_string(tolerance), true};
        c.sideband = sideband_cost_from_string(sideband);
        c.update = update_policy_from_string(update);
        c.record_frames = record_frames;
        c.check_sync = true;
        const TraceStream stream = stream_from_python(data, approx_allowed);
        SimResult r;
        {
          py::gil_scoped_release release;
          r = simulate(stream, c);
        }
        py::dict d;
        d["lines"] = stream.lines.size();
        d["termination"] = groups(r.counters.termination);
        d["switching"] = groups(r.counters.switching);
        d["frame_mix"] = mix_dict(r.mix);
        d["sync_divergences"] = r.sync_divergences;
        d["decoded"] = stream_to_python(r.decoded);
        if (record_frames) {
          py::list frames;
          for (const auto& f : r.frames) frames.append(py::make_tuple(f.chip, f.frame));
          d["frames"] = frames;
        }
        return d;
      },
      py::arg("data"), py::arg("scheme") = "ZAC_DEST", py::arg("limit_bits") = 13,
      py::arg("trunc_bits_per_value") = 0, py::arg("tolerance") = "none", py::arg("value_width") = 8,
      py::arg("capacity") = kMaxTableEntries, py::arg("sideband") = "counted", py::arg("update") = "algorithm",
      py::arg("approx_allowed") = true, py::arg("record_frames") = false,
      "Encode, count and decode a uint8 image, float32 tensor or bytes object.");

  m.def("energy_joules", [](std::uint64_t term_ones, std::uint64_t edges, double i_term, double v_dd, double t_bit,
                            double c_line) {
    EnergyCounters c;
    c.termination.data = term_ones;
    c.switching.data = edges;
    const EnergyParams p{i_term, v_dd, t_bit, c_line};
    p.validate();
    const auto r = to_joules(c, p);
    return py::make_tuple(r.termination_j.total(), r.switching_j.total());
  }, py::arg("termination_ones"), py::arg("falling_edges"), py::arg("i_term") = 13.75e-3, py::arg("v_dd") = 1.2,
     py::arg("t_bit") = 1.0 / 2.4e9, py::arg("c_line") = 15e-12, "Returns (termination_j, switching_j).");

  m.def("psnr", [](const U8Array& a, const U8Array& b) { return psnr(image_from_array(a), image_from_array(b)); },
        py::arg("reference"), py::arg("test"));
  m.def("ssim", [](const U8Array& a, const U8Array& b) { return ssim(image_from_array(a), image_from_array(b)); },
        py::arg("reference"), py::arg("test"));

  m.def("read_image", [](const std::filesystem::path& p) { return image_to_array(read_image(p)); }, py::arg("path"));
  m.def("write_pnm", [](const std::filesystem::path& p, const U8Array& a) { write_pnm(p, image_from_array(a)); },
        py::arg("path"), py::arg("image"));
  m.def("write_trace", [](const std::filesystem::path& p, const py::object& data, const std::string& format,
                          bool approx_allowed) {
    if (format != "binary" && format != "hex") throw py::value_error("format must be 'binary' or 'hex'");
    write_trace(p, stream_from_python(data, approx_allowed), format == "hex" ? TraceFormat::kHex : TraceFormat::kBinary);
  }, py::arg("path"), py::arg("data"), py::arg("format") = "binary", py::arg("approx_allowed") = true);
  m.def("read_trace", [](const std::filesystem::path& p) { return stream_to_python(read_trace(p)); }, py::arg("path"));

  m.def("run", [](const py::dict& cfg) { return run_outputs(cmd_run(config_from_python(cfg))); }, py::arg("config"),
        "Run every (input, scheme) pair of a config dict and write the reports.");
  m.def("sweep", [](const py::dict& cfg) { return run_outputs(cmd_sweep(config_from_python(cfg))); },
        py::arg("config"), "Sweep the config's grid and write sweep.csv.");
  m.def("default_config", [] {
    const auto json = py::module_::import("json");
    return json.attr("loads")(to_json(RunConfig{}).dump());
  });
}
