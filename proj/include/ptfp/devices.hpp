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
#include <string>
#include <vector>

#include "ptfp/errors.hpp"
#include "ptfp/waveform.hpp"

namespace ptfp {

/// Microring resonator as a Lorentzian notch with quadratic thermal red
/// shift: T(lambda, V) = 1 - d / (1 + ((lambda - lambda_res(V)) / gamma)^2),
/// lambda_res(V) = lambda_0 + c * (V/1000)^2 with V in millivolt.
struct MRRModel {
  double base_resonance_nm = 1552.3;   // resonance at 0 V
  double linewidth_hwhm_nm = 0.1;      // gamma
  double extinction_depth = 1.0;       // d in (0, 1]
  double tuning_coeff_nm_per_v2 = 0.5; // c, thermal shift per volt^2
  double max_voltage_mv = 1400.0;

  double resonance_nm(double voltage_mv) const {
    const double v = voltage_mv / 1000.0;
    return base_resonance_nm + tuning_coeff_nm_per_v2 * v * v;
  }

  /// Transmission in [1-d, 1]. Throws CalibrationError for voltages
  /// outside [0, max_voltage].
  double transmission(double wavelength_nm, double voltage_mv) const;
};

/// Flat-top wavelength multiplexer, modeled as a super-Gaussian passband
/// periodic in the free spectral range.
struct WDMModel {
  std::vector<double> channel_centers_nm = {1550.8, 1552.8, 1554.8, 1556.8};
  double channel_spacing_nm = 2.0;
  double flatness_db = 1.2;  // maximum in-band ripple
  double fsr_nm = 8.0;
  double fwhm_nm = 1.5;
  int order = 4;  // super-Gaussian order

  int channel_count() const { return static_cast<int>(channel_centers_nm.size()); }

  /// Passband transmission of one channel at the given wavelength.
  double channel_transmission(int channel, double wavelength_nm) const;

  /// Transmission through the best-matched channel (the passband a tone at
  /// this wavelength would use).
  double passband(double wavelength_nm) const;

  /// Index of the channel whose center is closest (modulo FSR).
  int nearest_channel(double wavelength_nm) const;

  /// Flat band is +- spacing/4 around a channel center.
  bool in_flat_band(double wavelength_nm) const;

  void validate() const;
};

/// Additive Gaussian noise applied at photodetector outputs, relative to
/// full-scale normalized intensity. sigma = 0 is bit-exactly deterministic
/// (no draws are made at all).
struct NoiseModel {
  double sigma = 0.0;
  std::uint64_t seed = 0;
  enum class Injection { pd_output };
  Injection injection = Injection::pd_output;
};

/// Calibration table for one ring: normalized weight versus heater voltage,
/// sampled on a uniform grid, with the largest strictly monotone branch
/// identified for inversion.
class WeightVoltageLUT {
public:
  struct Entry {
    double voltage_mv;
    double weight;  // normalized so the sweep maximum is 1
  };

  const std::string& mrr_id() const { return id_; }
  const std::vector<Entry>& entries() const { return entries_; }
  double normalization() const { return norm_scale_; }
  int branch_begin() const { return branch_begin_; }
  int branch_end() const { return branch_end_; }

  double min_weight() const { return min_weight_; }
  double max_weight() const { return max_weight_; }

  /// Piecewise-linear weight at a voltage inside the calibrated grid.
  double weight_at_voltage(double voltage_mv) const;

  /// Inverse lookup on the monotone branch (linear interpolation between the
  /// bracketing entries). Throws UnreachableWeightError outside the
  /// achievable [min_weight, max_weight] range.
  double voltage_for_weight(double target_weight) const;

  friend WeightVoltageLUT calibrate_lut(const MRRModel& m, double operating_wavelength_nm,
                                        double grid_step_mv, std::string id);

private:
  std::string id_;
  std::vector<Entry> entries_;
  double norm_scale_ = 1.0;
  int branch_begin_ = 0;  // [begin, end) largest strictly monotone run
  int branch_end_ = 0;
  bool decreasing_ = true;
  double min_weight_ = 0.0;
  double max_weight_ = 1.0;
};

/// Sweep the ring from 0 to max_voltage in grid_step increments, normalize
/// by the sweep maximum and locate the monotone branch. Throws
/// CalibrationError on a degenerate (constant) sweep.
WeightVoltageLUT calibrate_lut(const MRRModel& m, double operating_wavelength_nm,
                               double grid_step_mv, std::string id = "");

/// Voltage realizing the target normalized weight (thin wrapper kept for
/// symmetry with calibrate_lut).
inline double weight_to_voltage(const WeightVoltageLUT& lut, double target_weight) {
  return lut.voltage_for_weight(target_weight);
}

/// Flat-top passband evaluation, see WDMModel.
inline double wdm_passband(const WDMModel& w, double wavelength_nm) {
  return w.passband(wavelength_nm);
}

/// Ideal optical delay: shifts the absolute origin by n symbols. Loss hook
/// defaults to 0 dB.
Waveform delay_line(const Waveform& w, int n_symbols, double loss_db = 0.0);

/// Photodetection: per-sample sum of the optical intensities of all input
/// waveforms plus seeded Gaussian noise. `stream` offsets the noise counter
/// so independent detectors draw independent samples from one seed.
Waveform photodetect(const std::vector<Waveform>& weighted, const NoiseModel& noise,
                     std::uint64_t stream = 0);

/// Electrical power combiner: pointwise sum of aligned branch signals.
Waveform electrical_combine(const std::vector<Waveform>& branches);

}  // namespace ptfp
