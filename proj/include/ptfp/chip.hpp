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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ptfp/devices.hpp"
#include "ptfp/waveform.hpp"

namespace ptfp {

/// Full description of one chip: dimensions [d_w, d_t, d_s], operating
/// wavelengths, per-ring models and calibration tables, voltage grid,
/// symbol rate and imperfection knobs.
///
/// Weight addressing: ring (w, t, s) attenuates wavelength w in the tap-t
/// branch feeding space port s. voltages_mv is flattened w-major:
/// index = (w * d_t + t) * d_s + s.
class ChipConfig {
public:
  int d_w = 4;
  int d_t = 3;
  int d_s = 1;
  std::vector<double> operating_wavelengths_nm = {1550.8, 1552.8, 1554.8, 1556.8};
  std::vector<double> voltages_mv;  // [d_w * d_t * d_s]
  double symbol_rate_baud = 20e9;
  int oversampling = 1;

  std::vector<MRRModel> rings;  // per (w, t, s)
  WDMModel wdm;
  NoiseModel noise;

  /// Fractional-symbol imperfections (default 0 = ideal integer delays).
  std::vector<double> input_skews;   // per wavelength, symbols
  std::vector<double> output_skews;  // per tap branch, symbols

  /// Robustness knobs, all ideal by default.
  bool model_crosstalk = false;            // neighboring rings attenuate a channel
  std::vector<double> wdm_channel_loss_db; // per-wavelength insertion-loss imbalance
  std::vector<double> coupler_imbalance;   // per tap branch, linear power factor
  double crossing_loss_db = 0.0;           // per waveguide crossing ((d_s-1) per path)

  double lut_grid_step_mv = 1.0;

  double symbol_period_s() const { return 1.0 / symbol_rate_baud; }
  int ring_count() const { return d_w * d_t * d_s; }
  int ring_index(int w, int t, int s) const { return (w * d_t + t) * d_s + s; }
  double voltage(int w, int t, int s) const { return voltages_mv[ring_index(w, t, s)]; }

  const WeightVoltageLUT& lut(int w, int t, int s) const { return luts_[ring_index(w, t, s)]; }
  const std::vector<WeightVoltageLUT>& luts() const { return luts_; }
  bool calibrated() const { return !luts_.empty(); }

  /// Build the weight-voltage LUT of every ring at its operating wavelength.
  void calibrate();

  /// Shape/invariant checks; throws ShapeError or ArgumentError.
  void validate() const;

private:
  void validate_basic_shapes() const;
  std::vector<WeightVoltageLUT> luts_;
};

/// Default proof-of-concept chip: [4, 3, 1] at 20 Gbaud, wavelengths
/// 1550.8/1552.8/1554.8/1556.8 nm, full-extinction rings detuned 0.5 nm
/// below their channel so the 0-1400 mV sweep covers weights [0, 1].
ChipConfig default_chip();

/// Footprint that reproduces the reference compute density of the default
/// chip (back-derived, not a measured value).
double reference_footprint_mm2();

struct ChipOutput {
  std::vector<Waveform> ports;           // d_s output waveforms, origin 0
  std::vector<double> effective_weights; // [d_w * d_t * d_s], post-LUT
};

struct ForwardOptions {
  /// Override the config voltage grid (same flattened layout) without
  /// copying the whole config.
  std::span<const double> voltages_mv = {};
  /// Override the noise seed (per-call sub-seeds during plan execution).
  std::optional<std::uint64_t> noise_seed;
};

/// One chip invocation. For space port s:
///   y_s[n] = sum_t sum_w W[w,t,s] * x_w[n - t]  (+ Gaussian noise per
/// tap-branch photodetector sample when sigma > 0).
/// Inputs: exactly d_w waveforms of equal length, period and origin.
/// Output length = input length + d_t - 1 symbols; valid trimming is the
/// decoder's job. OpenMP-parallel over output samples.
ChipOutput chip_forward(const ChipConfig& cfg, const std::vector<Waveform>& inputs,
                        const ForwardOptions& opt = {});

/// Branch-by-branch reference implementation (delay, weight, photodetect,
/// combine) kept serial for testing and benchmarking against chip_forward.
ChipOutput chip_forward_serial(const ChipConfig& cfg, const std::vector<Waveform>& inputs,
                               const ForwardOptions& opt = {});

struct SyncResult {
  std::vector<double> corrections;     // per tap branch, symbols; apply by
                                       // adding onto output_skews
  std::vector<double> measured_delays; // estimated branch delays, symbols
};

/// Output synchronization: drive one wavelength with a probe, observe each
/// tap branch in isolation (unit weight on that branch only), estimate each
/// branch delay by cross-correlation at the configured oversampling factor
/// and return corrections that restore exactly one symbol of delay per tap.
/// Throws SyncError when the probe has no autocorrelation contrast.
SyncResult synchronize_outputs(const ChipConfig& cfg, const Waveform& probe, int active_wavelength = 0);

/// 2 ops per multiply-accumulate: 2 * d_w * d_t * d_s * symbol_rate.
double throughput_ops_per_s(const ChipConfig& cfg);

/// throughput / footprint; throws ArgumentError for non-positive footprint.
double compute_density(const ChipConfig& cfg, double footprint_mm2);

}  // namespace ptfp
