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

#include "ptfp/chip.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptfp/rng.hpp"

namespace ptfp {

void ChipConfig::calibrate() {
  validate_basic_shapes();
  luts_.clear();
  luts_.reserve(ring_count());
  for (int idx = 0; idx < ring_count(); ++idx) {
    const int w = idx / (d_t * d_s);
    const int t = (idx / d_s) % d_t;
    const int s = idx % d_s;
    const std::string id =
        "w" + std::to_string(w) + "_t" + std::to_string(t) + "_s" + std::to_string(s);
    luts_.push_back(calibrate_lut(rings[idx], operating_wavelengths_nm[w], lut_grid_step_mv, id));
  }
  if (voltages_mv.empty()) {
    voltages_mv.resize(ring_count());
    for (int idx = 0; idx < ring_count(); ++idx)
      voltages_mv[idx] = luts_[idx].voltage_for_weight(luts_[idx].min_weight());
  }
}

void ChipConfig::validate_basic_shapes() const {
  if (d_w < 1 || d_t < 1 || d_s < 1) throw ShapeError("chip dimensions must all be >= 1");
  if (static_cast<int>(operating_wavelengths_nm.size()) != d_w)
    throw ShapeError("need exactly d_w operating wavelengths");
  if (static_cast<int>(rings.size()) != ring_count())
    throw ShapeError("need exactly d_w*d_t*d_s ring models");
  if (symbol_rate_baud <= 0.0) throw ArgumentError("symbol rate must be positive");
  if (oversampling < 1) throw ArgumentError("oversampling must be >= 1");
}

void ChipConfig::validate() const {
  validate_basic_shapes();
  if (static_cast<int>(voltages_mv.size()) != ring_count())
    throw ShapeError("voltage grid must have shape [d_w, d_t, d_s]");
  if (!input_skews.empty() && static_cast<int>(input_skews.size()) != d_w)
    throw ShapeError("input_skews must be empty or have one entry per wavelength");
  if (!output_skews.empty() && static_cast<int>(output_skews.size()) != d_t)
    throw ShapeError("output_skews must be empty or have one entry per tap branch");
  if (!wdm_channel_loss_db.empty() && static_cast<int>(wdm_channel_loss_db.size()) != d_w)
    throw ShapeError("wdm_channel_loss_db must be empty or have one entry per wavelength");
  if (!coupler_imbalance.empty() && static_cast<int>(coupler_imbalance.size()) != d_t)
    throw ShapeError("coupler_imbalance must be empty or have one entry per tap branch");
  wdm.validate();
  std::vector<int> used;
  for (double lam : operating_wavelengths_nm) {
    if (!wdm.in_flat_band(lam))
      throw ArgumentError("operating wavelength " + std::to_string(lam) +
                          " nm is outside the WDM flat band");
    const int ch = wdm.nearest_channel(lam);
    if (std::find(used.begin(), used.end(), ch) != used.end())
      throw ArgumentError("two operating wavelengths share WDM channel " + std::to_string(ch));
    used.push_back(ch);
  }
}

ChipConfig default_chip() {
  ChipConfig cfg;
  cfg.rings.reserve(cfg.ring_count());
  for (int idx = 0; idx < cfg.ring_count(); ++idx) {
    const int w = idx / (cfg.d_t * cfg.d_s);
    MRRModel m;
    // Detuned half a nanometer below the channel so the heater sweep drags
    // the notch across it; full extinction makes weight 0 reachable.
    m.base_resonance_nm = cfg.operating_wavelengths_nm[w] - 0.5;
    m.linewidth_hwhm_nm = 0.1;
    m.extinction_depth = 1.0;
    m.tuning_coeff_nm_per_v2 = 0.5;
    m.max_voltage_mv = 1400.0;
    cfg.rings.push_back(m);
  }
  cfg.calibrate();
  cfg.validate();
  return cfg;
}

double reference_footprint_mm2() { return 480.0 / 588.0; }

double throughput_ops_per_s(const ChipConfig& cfg) {
  return 2.0 * cfg.d_w * cfg.d_t * cfg.d_s * cfg.symbol_rate_baud;
}

double compute_density(const ChipConfig& cfg, double footprint_mm2) {
  if (footprint_mm2 <= 0.0) throw ArgumentError("footprint must be positive");
  return throughput_ops_per_s(cfg) / footprint_mm2;
}

namespace {

// Linear interpolation of a sample array at real index p, zero outside.
inline double sample_at(const std::vector<double>& s, double p) {
  const double fl = std::floor(p);
  const long j = static_cast<long>(fl);
  const double f = p - fl;
  const long n = static_cast<long>(s.size());
  const double a = (j >= 0 && j < n) ? s[j] : 0.0;
  if (f == 0.0) return a;
  const double b = (j + 1 >= 0 && j + 1 < n) ? s[j + 1] : 0.0;
  return a + f * (b - a);
}

struct ForwardContext {
  int n_in_symbols;
  int out_symbols;
  int os;
  long out_subsamples;
  long in_origin;
  double sigma;
  std::uint64_t seed;
  std::vector<double> weights;  // [d_w * d_t * d_s]
  const std::vector<double>* iskew;
  const std::vector<double>* oskew;
};

ForwardContext make_context(const ChipConfig& cfg, const std::vector<Waveform>& inputs,
                            const ForwardOptions& opt) {
  if (static_cast<int>(inputs.size()) != cfg.d_w)
    throw ShapeError("chip_forward needs exactly d_w = " + std::to_string(cfg.d_w) +
                     " input waveforms, got " + std::to_string(inputs.size()));
  if (!cfg.calibrated()) throw CalibrationError("chip has no calibration LUTs; call calibrate()");
  const auto& ref = inputs.front();
  for (const auto& in : inputs) {
    if (in.n_symbols() != ref.n_symbols() || in.symbol_period() != ref.symbol_period() ||
        in.oversampling() != ref.oversampling() || in.origin_offset() != ref.origin_offset())
      throw AlignmentError("chip inputs must share length, symbol period, oversampling and origin");
  }
  const std::span<const double> volts =
      opt.voltages_mv.empty() ? std::span<const double>(cfg.voltages_mv) : opt.voltages_mv;
  if (static_cast<int>(volts.size()) != cfg.ring_count())
    throw ShapeError("voltage grid must have shape [d_w, d_t, d_s]");

  ForwardContext ctx;
  ctx.n_in_symbols = ref.n_symbols();
  ctx.out_symbols = ref.n_symbols() + cfg.d_t - 1;
  ctx.os = ref.oversampling();
  ctx.out_subsamples = static_cast<long>(ctx.out_symbols) * ctx.os;
  ctx.in_origin = ref.origin_offset();
  ctx.sigma = cfg.noise.sigma;
  ctx.seed = opt.noise_seed.value_or(cfg.noise.seed);
  ctx.weights.resize(cfg.ring_count());
  for (int idx = 0; idx < cfg.ring_count(); ++idx)
    ctx.weights[idx] = cfg.luts()[idx].weight_at_voltage(volts[idx]);

  // imperfection knobs; everything below is 1.0 on the ideal default chip
  const double crossing_gain =
      std::pow(10.0, -cfg.crossing_loss_db * (cfg.d_s - 1) / 10.0);
  for (int w = 0; w < cfg.d_w; ++w) {
    const double channel_gain =
        cfg.wdm_channel_loss_db.empty()
            ? 1.0
            : std::pow(10.0, -cfg.wdm_channel_loss_db[w] / 10.0);
    for (int t = 0; t < cfg.d_t; ++t) {
      const double branch_gain = cfg.coupler_imbalance.empty() ? 1.0 : cfg.coupler_imbalance[t];
      for (int s = 0; s < cfg.d_s; ++s) {
        double& wgt = ctx.weights[cfg.ring_index(w, t, s)];
        wgt *= channel_gain * branch_gain * crossing_gain;
        if (cfg.model_crosstalk) {
          // the channel passes through every ring of its branch; neighbors
          // attenuate it by their off-resonance transmission
          for (int other = 0; other < cfg.d_w; ++other) {
            if (other == w) continue;
            const int idx = cfg.ring_index(other, t, s);
            wgt *= cfg.rings[idx].transmission(cfg.operating_wavelengths_nm[w], volts[idx]);
          }
        }
      }
    }
  }
  ctx.iskew = &cfg.input_skews;
  ctx.oskew = &cfg.output_skews;
  return ctx;
}

inline double skew_of(const std::vector<double>* v, int i) {
  return (v && !v->empty()) ? (*v)[i] : 0.0;
}

}  // namespace

ChipOutput chip_forward(const ChipConfig& cfg, const std::vector<Waveform>& inputs,
                        const ForwardOptions& opt) {
  const ForwardContext ctx = make_context(cfg, inputs, opt);
  const int os = ctx.os;
  const bool noisy = ctx.sigma > 0.0;

  ChipOutput out;
  out.effective_weights = ctx.weights;
  out.ports.reserve(cfg.d_s);
  for (int s = 0; s < cfg.d_s; ++s) {
    Waveform port = Waveform::zeros(ctx.out_symbols, inputs.front().symbol_period(), os);
    port.set_origin_offset(ctx.in_origin);
    auto& y = port.samples();
    const long m_sub = ctx.out_subsamples;

#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < m_sub; ++idx) {
      double acc = 0.0;
      for (int t = 0; t < cfg.d_t; ++t) {
        const double branch_delay = (t + skew_of(ctx.oskew, t)) * os;
        double branch = 0.0;
        for (int w = 0; w < cfg.d_w; ++w) {
          const double wgt = ctx.weights[(w * cfg.d_t + t) * cfg.d_s + s];
          if (wgt == 0.0) continue;
          const double p = idx - branch_delay - skew_of(ctx.iskew, w) * os;
          branch += wgt * sample_at(inputs[w].samples(), p);
        }
        acc += branch;
        if (noisy)
          acc += ctx.sigma * gaussian(ctx.seed, (static_cast<std::uint64_t>(s) * cfg.d_t + t) *
                                                        static_cast<std::uint64_t>(m_sub) +
                                                    static_cast<std::uint64_t>(idx));
      }
      y[idx] = acc;
    }
    out.ports.push_back(std::move(port));
  }
  return out;
}

ChipOutput chip_forward_serial(const ChipConfig& cfg, const std::vector<Waveform>& inputs,
                               const ForwardOptions& opt) {
  const ForwardContext ctx = make_context(cfg, inputs, opt);
  const int os = ctx.os;
  const double period = inputs.front().symbol_period();

  // Device-by-device pipeline: weight each wavelength, delay per tap,
  // re-grid every branch onto the common output window, photodetect with
  // the branch noise stream, then combine electrically.
  const auto regrid = [&](const Waveform& w, double extra_shift_symbols) {
    Waveform g = Waveform::zeros(ctx.out_symbols, period, os);
    g.set_origin_offset(ctx.in_origin);
    const double shift = (w.origin_offset() - ctx.in_origin + extra_shift_symbols) * os;
    for (long i = 0; i < g.n_samples(); ++i) g.samples()[i] = sample_at(w.samples(), i - shift);
    return g;
  };

  ChipOutput out;
  out.effective_weights = ctx.weights;
  for (int s = 0; s < cfg.d_s; ++s) {
    std::vector<Waveform> branches;
    branches.reserve(cfg.d_t);
    for (int t = 0; t < cfg.d_t; ++t) {
      std::vector<Waveform> aligned;
      aligned.reserve(cfg.d_w);
      for (int w = 0; w < cfg.d_w; ++w) {
        Waveform weighted = inputs[w];
        const double wgt = ctx.weights[(w * cfg.d_t + t) * cfg.d_s + s];
        for (double& v : weighted.samples()) v *= wgt;
        weighted = delay_line(weighted, t);
        aligned.push_back(regrid(weighted, skew_of(ctx.oskew, t) + skew_of(ctx.iskew, w)));
      }
      NoiseModel noise = cfg.noise;
      noise.seed = ctx.seed;
      const std::uint64_t stream = (static_cast<std::uint64_t>(s) * cfg.d_t + t) *
                                   static_cast<std::uint64_t>(ctx.out_subsamples);
      branches.push_back(photodetect(aligned, noise, stream));
    }
    out.ports.push_back(electrical_combine(branches));
  }
  return out;
}

SyncResult synchronize_outputs(const ChipConfig& cfg, const Waveform& probe, int active_wavelength) {
  if (active_wavelength < 0 || active_wavelength >= cfg.d_w)
    throw ArgumentError("active wavelength out of range");
  if (!cfg.calibrated()) throw CalibrationError("chip has no calibration LUTs; call calibrate()");

  double lo = probe.samples().empty() ? 0.0 : probe.samples().front(), hi = lo;
  for (double v : probe.samples()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo <= 0.0) throw SyncError("probe waveform is flat; no autocorrelation contrast");

  const int os = probe.oversampling();
  std::vector<Waveform> inputs(cfg.d_w, Waveform::zeros(probe.n_symbols(), probe.symbol_period(), os));
  inputs[active_wavelength] = probe;

  SyncResult res;
  res.corrections.resize(cfg.d_t);
  res.measured_delays.resize(cfg.d_t);
  for (int t = 0; t < cfg.d_t; ++t) {
    // unit weight on the active branch only; every other ring fully dark
    std::vector<double> volts(cfg.ring_count());
    for (int idx = 0; idx < cfg.ring_count(); ++idx) {
      const auto& lut = cfg.luts()[idx];
      volts[idx] = lut.voltage_for_weight(lut.min_weight());
    }
    const int on = (active_wavelength * cfg.d_t + t) * cfg.d_s + 0;
    volts[on] = cfg.luts()[on].voltage_for_weight(cfg.luts()[on].max_weight());

    ForwardOptions opt;
    opt.voltages_mv = volts;
    const ChipOutput out = chip_forward(cfg, inputs, opt);
    const auto& y = out.ports[0].samples();
    const auto& x = probe.samples();

    const long max_lag = static_cast<long>(cfg.d_t + 1) * os;
    long best_lag = 0;
    double best = -1e300;
    std::vector<double> corr(max_lag + 1);
    for (long lag = 0; lag <= max_lag; ++lag) {
      double c = 0.0;
      for (size_t i = 0; i < x.size(); ++i) {
        const size_t j = i + lag;
        if (j < y.size()) c += x[i] * y[j];
      }
      corr[lag] = c;
      if (c > best) {
        best = c;
        best_lag = lag;
      }
    }
    if (best <= 0.0) throw SyncError("cross-correlation has no positive peak");
    double refined = static_cast<double>(best_lag);
    if (best_lag > 0 && best_lag < max_lag) {
      const double cm = corr[best_lag - 1], c0 = corr[best_lag], cp = corr[best_lag + 1];
      const double denom = cm - 2.0 * c0 + cp;
      if (denom < 0.0) refined += std::clamp(0.5 * (cm - cp) / denom, -0.5, 0.5);
    }
    res.measured_delays[t] = refined / os;
    res.corrections[t] = t - res.measured_delays[t];
  }
  return res;
}

}  // namespace ptfp
