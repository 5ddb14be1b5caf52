/*
 * Copyright 2026 The ptfp-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ptfp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ptfp {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void fail_open(const std::string& path, const char* mode) {
  throw ParseError(std::string("cannot open '") + path + "' for " + mode);
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail_open(path, "reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail_open(path, "writing");
  f << content;
}

// ---------------------------------------------------------------------------
// PGM
// ---------------------------------------------------------------------------

DataTensor read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail_open(path, "reading");
  std::string magic;
  f >> magic;
  if (magic != "P5") throw ParseError("'" + path + "': not a binary PGM (P5) file");
  const auto next_int = [&] {
    // skip whitespace and '#' comments
    int c = f.peek();
    while (c == '#' || std::isspace(c)) {
      if (c == '#') f.ignore(1 << 20, '\n');
      else f.get();
      c = f.peek();
    }
    long v = -1;
    f >> v;
    if (!f || v < 0) throw ParseError("'" + path + "': malformed PGM header");
    return v;
  };
  const long w = next_int();
  const long h = next_int();
  const long maxval = next_int();
  if (maxval != 255) throw ParseError("'" + path + "': only maxval 255 PGM is supported");
  f.get();  // single whitespace before raster
  std::vector<unsigned char> bytes(static_cast<size_t>(w) * h);
  f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw ParseError("'" + path + "': truncated PGM raster");
  DataTensor img({static_cast<int>(h), static_cast<int>(w)}, 1);
  for (long i = 0; i < w * h; ++i) img.raw()[i] = bytes[i] / 255.0;
  return img;
}

void write_pgm(const std::string& path, const DataTensor& image, int channel) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail_open(path, "writing");
  f << "P5\n" << image.cols() << " " << image.rows() << "\n255\n";
  const auto ch = image.channel(channel);
  for (double v : ch) {
    const int b = static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    f.put(static_cast<char>(b));
  }
}

std::pair<double, double> write_pgm_rescaled(const std::string& path, const DataTensor& image,
                                             int channel) {
  const auto ch = image.channel(channel);
  double lo = ch.front(), hi = ch.front();
  for (double v : ch) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  std::ofstream f(path, std::ios::binary);
  if (!f) fail_open(path, "writing");
  f << "P5\n" << image.cols() << " " << image.rows() << "\n255\n";
  for (double v : ch) {
    const int b = static_cast<int>(std::lround((v - lo) * scale));
    f.put(static_cast<char>(std::clamp(b, 0, 255)));
  }
  return {lo, scale};
}

// ---------------------------------------------------------------------------
// CSV (shared one-line header for tensors and waveforms)
// ---------------------------------------------------------------------------

void write_tensor_csv(const std::string& path, const DataTensor& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail_open(path, "writing");
  f << "# shape=" << t.rows() << "x" << t.cols() << ";channels=" << t.channels()
    << ";symbol_period_ps=0\n";
  for (int r = 0; r < t.rows(); ++r)
    for (int c = 0; c < t.cols(); ++c) {
      for (int ch = 0; ch < t.channels(); ++ch) {
        if (ch) f << ",";
        f << fmt_double(t.at(ch, r, c));
      }
      f << "\n";
    }
}

namespace {

struct CsvHeader {
  int rows = 1, cols = 0, channels = 1;
  double symbol_period_ps = 0.0;
};

CsvHeader parse_csv_header(const std::string& line, const std::string& origin) {
  CsvHeader h;
  if (line.rfind("# ", 0) != 0) throw ParseError(origin + ": missing '# ' CSV header line");
  std::stringstream ss(line.substr(2));
  std::string field;
  while (std::getline(ss, field, ';')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = field.substr(0, eq);
    const std::string val = field.substr(eq + 1);
    if (key == "shape") {
      const auto x = val.find('x');
      if (x == std::string::npos) {
        h.rows = 1;
        h.cols = std::stoi(val);
      } else {
        h.rows = std::stoi(val.substr(0, x));
        h.cols = std::stoi(val.substr(x + 1));
      }
    } else if (key == "channels") {
      h.channels = std::stoi(val);
    } else if (key == "symbol_period_ps") {
      h.symbol_period_ps = std::stod(val);
    }
  }
  if (h.cols <= 0 || h.rows <= 0 || h.channels <= 0)
    throw ParseError(origin + ": invalid CSV header '" + line + "'");
  return h;
}

}  // namespace

DataTensor read_tensor_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail_open(path, "reading");
  std::string line;
  if (!std::getline(f, line)) throw ParseError(path + ": empty file");
  const CsvHeader h = parse_csv_header(line, path);
  DataTensor t({h.rows, h.cols}, h.channels);
  for (int r = 0; r < h.rows; ++r)
    for (int c = 0; c < h.cols; ++c) {
      if (!std::getline(f, line)) throw ParseError(path + ": truncated tensor CSV");
      std::stringstream ss(line);
      std::string cell;
      for (int ch = 0; ch < h.channels; ++ch) {
        if (!std::getline(ss, cell, ',')) throw ParseError(path + ": short CSV row");
        t.at(ch, r, c) = std::stod(cell);
      }
    }
  return t;
}

void write_waveform_csv(const std::string& path, const Waveform& w) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail_open(path, "writing");
  f << "# shape=" << w.n_samples() << ";channels=1;symbol_period_ps="
    << fmt_double(w.symbol_period() * 1e12) << ";oversampling=" << w.oversampling()
    << ";origin_offset=" << w.origin_offset() << "\n";
  for (long i = 0; i < w.n_samples(); ++i) {
    const int sym = static_cast<int>(i / w.oversampling());
    f << fmt_double(w.samples()[i]) << "," << (w.is_guard(sym) ? 1 : 0) << "\n";
  }
}

Waveform read_waveform_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail_open(path, "reading");
  std::string line;
  if (!std::getline(f, line)) throw ParseError(path + ": empty file");
  const CsvHeader h = parse_csv_header(line, path);
  int oversampling = 1;
  long origin = 0;
  {
    std::stringstream ss(line.substr(2));
    std::string field;
    while (std::getline(ss, field, ';')) {
      if (field.rfind("oversampling=", 0) == 0) oversampling = std::stoi(field.substr(13));
      if (field.rfind("origin_offset=", 0) == 0) origin = std::stol(field.substr(14));
    }
  }
  const long n_samples = h.cols;
  if (n_samples % oversampling != 0) throw ParseError(path + ": sample count not a multiple of oversampling");
  Waveform w = Waveform::zeros(static_cast<int>(n_samples / oversampling),
                               h.symbol_period_ps * 1e-12, oversampling);
  w.set_origin_offset(origin);
  for (long i = 0; i < n_samples; ++i) {
    if (!std::getline(f, line)) throw ParseError(path + ": truncated waveform CSV");
    const auto comma = line.find(',');
    w.samples()[i] = std::stod(line.substr(0, comma));
    if (comma != std::string::npos && i % oversampling == 0)
      w.guard_map()[i / oversampling] = static_cast<std::uint8_t>(std::stoi(line.substr(comma + 1)));
  }
  return w;
}

void write_lut_csv(const std::string& path, const WeightVoltageLUT& lut) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail_open(path, "writing");
  f << "# mrr_id=" << lut.mrr_id() << ";normalization=" << fmt_double(lut.normalization())
    << ";branch=[" << lut.branch_begin() << "," << lut.branch_end() << ")\n";
  f << "# voltage_mV,weight\n";
  for (const auto& e : lut.entries()) f << fmt_double(e.voltage_mv) << "," << fmt_double(e.weight) << "\n";
}

// ---------------------------------------------------------------------------
// Chip JSON (schema 1)
// ---------------------------------------------------------------------------

ChipConfig chip_from_json_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  try {
    if (j.value("schema", 0) != 1)
      throw ParseError(origin + ": unsupported or missing \"schema\" (expected 1)");
    ChipConfig cfg;
    const auto& dims = j.at("dims");
    cfg.d_w = dims.at("d_w").get<int>();
    cfg.d_t = dims.at("d_t").get<int>();
    cfg.d_s = dims.at("d_s").get<int>();
    cfg.operating_wavelengths_nm = j.at("operating_wavelengths_nm").get<std::vector<double>>();
    cfg.symbol_rate_baud = j.value("symbol_rate_baud", 20e9);
    cfg.oversampling = j.value("oversampling", 1);
    cfg.lut_grid_step_mv = j.value("lut_grid_step_mv", 1.0);

    if (j.contains("wdm")) {
      const auto& w = j.at("wdm");
      cfg.wdm.channel_centers_nm =
          w.value("channel_centers_nm", cfg.wdm.channel_centers_nm);
      cfg.wdm.channel_spacing_nm = w.value("channel_spacing_nm", cfg.wdm.channel_spacing_nm);
      cfg.wdm.flatness_db = w.value("flatness_db", cfg.wdm.flatness_db);
      cfg.wdm.fsr_nm = w.value("fsr_nm", cfg.wdm.fsr_nm);
      cfg.wdm.fwhm_nm = w.value("fwhm_nm", cfg.wdm.fwhm_nm);
      cfg.wdm.order = w.value("order", cfg.wdm.order);
    }
    if (j.contains("noise")) {
      cfg.noise.sigma = j.at("noise").value("sigma", 0.0);
      cfg.noise.seed = j.at("noise").value("seed", 0ULL);
    }

    MRRModel base;
    if (j.contains("mrr")) {
      const auto& m = j.at("mrr");
      base.linewidth_hwhm_nm = m.value("linewidth_hwhm_nm", base.linewidth_hwhm_nm);
      base.extinction_depth = m.value("extinction_depth", base.extinction_depth);
      base.tuning_coeff_nm_per_v2 = m.value("tuning_coeff_nm_per_v2", base.tuning_coeff_nm_per_v2);
      base.max_voltage_mv = m.value("max_voltage_mv", base.max_voltage_mv);
      const double detune = m.value("detune_nm", -0.5);
      cfg.rings.clear();
      for (int idx = 0; idx < cfg.ring_count(); ++idx) {
        const int w = idx / (cfg.d_t * cfg.d_s);
        MRRModel r = base;
        r.base_resonance_nm = cfg.operating_wavelengths_nm.at(w) + detune;
        cfg.rings.push_back(r);
      }
    }
    if (j.contains("voltages_mv") && !j.at("voltages_mv").is_null()) {
      cfg.voltages_mv = j.at("voltages_mv").get<std::vector<double>>();
      if (static_cast<int>(cfg.voltages_mv.size()) != cfg.ring_count())
        throw ParseError(origin + ": voltages_mv needs d_w*d_t*d_s = " +
                         std::to_string(cfg.ring_count()) + " entries, got " +
                         std::to_string(cfg.voltages_mv.size()));
    }
    if (j.contains("input_skews")) cfg.input_skews = j.at("input_skews").get<std::vector<double>>();
    if (j.contains("output_skews"))
      cfg.output_skews = j.at("output_skews").get<std::vector<double>>();
    cfg.model_crosstalk = j.value("model_crosstalk", false);
    if (j.contains("wdm_channel_loss_db"))
      cfg.wdm_channel_loss_db = j.at("wdm_channel_loss_db").get<std::vector<double>>();
    if (j.contains("coupler_imbalance"))
      cfg.coupler_imbalance = j.at("coupler_imbalance").get<std::vector<double>>();
    cfg.crossing_loss_db = j.value("crossing_loss_db", 0.0);

    try {
      cfg.calibrate();
      cfg.validate();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      // malformed configs surface as parse errors with file context
      throw ParseError(origin + ": " + e.what());
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

ChipConfig load_chip_json(const std::string& path) {
  return chip_from_json_text(read_text_file(path), path);
}

std::string chip_to_json_text(const ChipConfig& cfg) {
  json j;
  j["schema"] = 1;
  j["dims"] = {{"d_w", cfg.d_w}, {"d_t", cfg.d_t}, {"d_s", cfg.d_s}};
  j["operating_wavelengths_nm"] = cfg.operating_wavelengths_nm;
  j["symbol_rate_baud"] = cfg.symbol_rate_baud;
  j["oversampling"] = cfg.oversampling;
  j["lut_grid_step_mv"] = cfg.lut_grid_step_mv;
  j["wdm"] = {{"channel_centers_nm", cfg.wdm.channel_centers_nm},
              {"channel_spacing_nm", cfg.wdm.channel_spacing_nm},
              {"flatness_db", cfg.wdm.flatness_db},
              {"fsr_nm", cfg.wdm.fsr_nm},
              {"fwhm_nm", cfg.wdm.fwhm_nm},
              {"order", cfg.wdm.order}};
  j["noise"] = {{"sigma", cfg.noise.sigma}, {"seed", cfg.noise.seed}};
  if (!cfg.rings.empty()) {
    const MRRModel& r = cfg.rings.front();
    j["mrr"] = {{"detune_nm", r.base_resonance_nm - cfg.operating_wavelengths_nm.front()},
                {"linewidth_hwhm_nm", r.linewidth_hwhm_nm},
                {"extinction_depth", r.extinction_depth},
                {"tuning_coeff_nm_per_v2", r.tuning_coeff_nm_per_v2},
                {"max_voltage_mv", r.max_voltage_mv}};
  }
  j["voltages_mv"] = cfg.voltages_mv;
  if (!cfg.input_skews.empty()) j["input_skews"] = cfg.input_skews;
  if (!cfg.output_skews.empty()) j["output_skews"] = cfg.output_skews;
  if (cfg.model_crosstalk) j["model_crosstalk"] = true;
  if (!cfg.wdm_channel_loss_db.empty()) j["wdm_channel_loss_db"] = cfg.wdm_channel_loss_db;
  if (!cfg.coupler_imbalance.empty()) j["coupler_imbalance"] = cfg.coupler_imbalance;
  if (cfg.crossing_loss_db != 0.0) j["crossing_loss_db"] = cfg.crossing_loss_db;
  return j.dump(2) + "\n";
}

KernelTensor load_kernel(const std::string& name_or_path) {
  try {
    return named_kernel(name_or_path);
  } catch (const ArgumentError&) {
    // fall through to JSON file
  }
  json j;
  try {
    j = json::parse(read_text_file(name_or_path));
  } catch (const json::parse_error& e) {
    throw ParseError(name_or_path + ": " + e.what());
  }
  try {
    KernelTensor k({j.value("rows", 1), j.at("cols").get<int>()}, j.value("in_channels", 1),
                   j.value("out_channels", 1));
    const auto w = j.at("weights").get<std::vector<double>>();
    if (w.size() != k.raw().size())
      throw ParseError(name_or_path + ": expected " + std::to_string(k.raw().size()) +
                       " weights, got " + std::to_string(w.size()));
    k.raw() = w;
    k.validate_finite();
    return k;
  } catch (const json::exception& e) {
    throw ParseError(name_or_path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Execution plan JSON
// ---------------------------------------------------------------------------

std::string plan_to_json_text(const ExecutionPlan& plan) {
  json j;
  j["kernel_shape"] = {plan.kshape.rows, plan.kshape.cols};
  j["in_channels"] = plan.in_channels;
  j["out_channels"] = plan.out_channels;
  j["calls"] = json::array();
  for (const auto& c : plan.calls) {
    json routing = json::array();
    for (const auto& r : c.routing) routing.push_back({{"channel", r.channel}, {"row_shift", r.row_shift}});
    j["calls"].push_back({{"voltages_mv", c.voltages_mv},
                          {"routing", routing},
                          {"sign", c.sign == SignLabel::plus ? "plus" : "minus"},
                          {"scale", c.scale},
                          {"out_channel", c.out_channel},
                          {"taps", c.taps},
                          {"col_offset", c.col_offset},
                          {"guard_len", c.guard_len},
                          {"unit_weights", c.unit_weights}});
  }
  return j.dump(2) + "\n";
}

ExecutionPlan plan_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("plan JSON: ") + e.what());
  }
  try {
    ExecutionPlan plan;
    plan.kshape = {j.at("kernel_shape").at(0).get<int>(), j.at("kernel_shape").at(1).get<int>()};
    plan.in_channels = j.at("in_channels").get<int>();
    plan.out_channels = j.at("out_channels").get<int>();
    for (const auto& cj : j.at("calls")) {
      ChipCall c;
      c.voltages_mv = cj.at("voltages_mv").get<std::vector<double>>();
      for (const auto& rj : cj.at("routing"))
        c.routing.push_back({rj.at("channel").get<int>(), rj.at("row_shift").get<int>()});
      c.sign = cj.at("sign").get<std::string>() == "minus" ? SignLabel::minus : SignLabel::plus;
      c.scale = cj.at("scale").get<double>();
      c.out_channel = cj.at("out_channel").get<int>();
      c.taps = cj.at("taps").get<int>();
      c.col_offset = cj.at("col_offset").get<int>();
      c.guard_len = cj.at("guard_len").get<int>();
      c.unit_weights = cj.at("unit_weights").get<std::vector<double>>();
      plan.calls.push_back(std::move(c));
    }
    return plan;
  } catch (const json::exception& e) {
    throw ParseError(std::string("plan JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Checkpoint: JSON header line + little-endian float64 payload
// ---------------------------------------------------------------------------

namespace {

void append_payload(std::vector<double>& payload, const std::vector<double>& v) {
  payload.insert(payload.end(), v.begin(), v.end());
}

}  // namespace

void save_checkpoint(const std::string& path, const NetworkSpec& spec) {
  std::vector<double> payload;
  append_payload(payload, spec.conv1.raw());
  append_payload(payload, spec.bias1);
  append_payload(payload, spec.conv2.raw());
  append_payload(payload, spec.bias2);
  append_payload(payload, spec.w_x.a);
  append_payload(payload, spec.w_h.a);
  append_payload(payload, spec.b_h);
  append_payload(payload, spec.w_fc.a);
  append_payload(payload, spec.b_fc);

  json h;
  h["schema"] = 1;
  h["frame"] = {spec.frame_rows, spec.frame_cols};
  h["frames_per_segment"] = spec.frames_per_segment;
  h["classes"] = spec.n_classes;
  h["hidden"] = spec.hidden;
  h["conv1"] = {spec.conv1.krows(), spec.conv1.kcols(), spec.conv1.in_channels(),
                spec.conv1.out_channels()};
  h["conv2"] = {spec.conv2.krows(), spec.conv2.kcols(), spec.conv2.in_channels(),
                spec.conv2.out_channels()};
  h["seed"] = spec.seed;
  h["trained"] = spec.trained;
  h["payload_doubles"] = payload.size();
  h["layer_order"] = {"conv1", "bias1", "conv2", "bias2", "w_x", "w_h", "b_h", "w_fc", "b_fc"};

  std::ofstream f(path, std::ios::binary);
  if (!f) fail_open(path, "writing");
  f << h.dump() << "\n";
  f.write(reinterpret_cast<const char*>(payload.data()),
          static_cast<std::streamsize>(payload.size() * sizeof(double)));
}

NetworkSpec load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail_open(path, "reading");
  std::string header;
  if (!std::getline(f, header)) throw ParseError(path + ": missing checkpoint header");
  json h;
  try {
    h = json::parse(header);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    if (h.value("schema", 0) != 1) throw ParseError(path + ": unsupported checkpoint schema");
    NetworkSpec spec;
    spec.frame_rows = h.at("frame").at(0).get<int>();
    spec.frame_cols = h.at("frame").at(1).get<int>();
    spec.frames_per_segment = h.at("frames_per_segment").get<int>();
    spec.n_classes = h.at("classes").get<int>();
    spec.hidden = h.at("hidden").get<int>();
    const auto c1 = h.at("conv1");
    const auto c2 = h.at("conv2");
    spec.conv1 = KernelTensor({c1.at(0).get<int>(), c1.at(1).get<int>()}, c1.at(2).get<int>(),
                              c1.at(3).get<int>());
    spec.conv2 = KernelTensor({c2.at(0).get<int>(), c2.at(1).get<int>()}, c2.at(2).get<int>(),
                              c2.at(3).get<int>());
    spec.bias1.assign(spec.conv1.out_channels(), 0.0);
    spec.bias2.assign(spec.conv2.out_channels(), 0.0);
    spec.w_x = Mat(spec.hidden, spec.feature_dim());
    spec.w_h = Mat(spec.hidden, spec.hidden);
    spec.b_h.assign(spec.hidden, 0.0);
    spec.w_fc = Mat(spec.n_classes, spec.hidden);
    spec.b_fc.assign(spec.n_classes, 0.0);
    spec.seed = h.at("seed").get<std::uint64_t>();
    spec.trained = h.value("trained", false);

    const size_t n = h.at("payload_doubles").get<size_t>();
    std::vector<double> payload(n);
    f.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!f) throw ParseError(path + ": truncated checkpoint payload");

    size_t pos = 0;
    const auto take = [&](std::vector<double>& dst) {
      if (pos + dst.size() > payload.size()) throw ParseError(path + ": checkpoint payload too short");
      std::copy(payload.begin() + pos, payload.begin() + pos + dst.size(), dst.begin());
      pos += dst.size();
    };
    take(spec.conv1.raw());
    take(spec.bias1);
    take(spec.conv2.raw());
    take(spec.bias2);
    take(spec.w_x.a);
    take(spec.w_h.a);
    take(spec.b_h);
    take(spec.w_fc.a);
    take(spec.b_fc);
    if (pos != payload.size()) throw ParseError(path + ": checkpoint payload size mismatch");
    return spec;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_manifest(const std::string& path, const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["config"] = m.config_path;
  j["seed"] = m.seed;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["tool_version"] = m.tool_version;
  j["duration_ms"] = m.duration_ms;
  for (const auto& [k, v] : m.extra) j[k] = v;
  j["error"] = m.error.empty() ? json() : json(m.error);
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace ptfp
