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

#include "ptfp/devices.hpp"

#include <algorithm>
#include <cmath>

#include "ptfp/rng.hpp"

namespace ptfp {

double MRRModel::transmission(double wavelength_nm, double voltage_mv) const {
  if (voltage_mv < 0.0 || voltage_mv > max_voltage_mv)
    throw CalibrationError("voltage " + std::to_string(voltage_mv) +
                           " mV outside calibration range [0, " + std::to_string(max_voltage_mv) +
                           "] mV");
  const double detune = (wavelength_nm - resonance_nm(voltage_mv)) / linewidth_hwhm_nm;
  return 1.0 - extinction_depth / (1.0 + detune * detune);
}

double WDMModel::channel_transmission(int channel, double wavelength_nm) const {
  const double center = channel_centers_nm.at(channel);
  // wrap into [-fsr/2, fsr/2): passbands repeat every free spectral range
  double d = std::fmod(wavelength_nm - center, fsr_nm);
  if (d < -fsr_nm / 2) d += fsr_nm;
  if (d >= fsr_nm / 2) d -= fsr_nm;
  const double u = 2.0 * d / fwhm_nm;
  return std::exp(-std::log(2.0) * std::pow(u * u, order));
}

int WDMModel::nearest_channel(double wavelength_nm) const {
  int best = 0;
  double best_d = 1e300;
  for (int ch = 0; ch < channel_count(); ++ch) {
    double d = std::fmod(wavelength_nm - channel_centers_nm[ch], fsr_nm);
    if (d < -fsr_nm / 2) d += fsr_nm;
    if (d >= fsr_nm / 2) d -= fsr_nm;
    if (std::fabs(d) < best_d) {
      best_d = std::fabs(d);
      best = ch;
    }
  }
  return best;
}

double WDMModel::passband(double wavelength_nm) const {
  double best = 0.0;
  for (int ch = 0; ch < channel_count(); ++ch)
    best = std::max(best, channel_transmission(ch, wavelength_nm));
  return best;
}

bool WDMModel::in_flat_band(double wavelength_nm) const {
  const int ch = nearest_channel(wavelength_nm);
  double d = std::fmod(wavelength_nm - channel_centers_nm[ch], fsr_nm);
  if (d < -fsr_nm / 2) d += fsr_nm;
  if (d >= fsr_nm / 2) d -= fsr_nm;
  return std::fabs(d) <= channel_spacing_nm / 4.0;
}

void WDMModel::validate() const {
  if (channel_centers_nm.empty()) throw ArgumentError("WDM needs at least one channel");
  for (size_t i = 1; i < channel_centers_nm.size(); ++i) {
    const double gap = channel_centers_nm[i] - channel_centers_nm[i - 1];
    if (std::fabs(gap - channel_spacing_nm) > 1e-9)
      throw ArgumentError("WDM channel centers must be equally spaced by " +
                          std::to_string(channel_spacing_nm) + " nm");
  }
}

WeightVoltageLUT calibrate_lut(const MRRModel& m, double operating_wavelength_nm,
                               double grid_step_mv, std::string id) {
  if (grid_step_mv <= 0.0) throw ArgumentError("grid_step must be positive");

  WeightVoltageLUT lut;
  lut.id_ = std::move(id);
  const int n = static_cast<int>(std::floor(m.max_voltage_mv / grid_step_mv + 1e-9)) + 1;
  lut.entries_.reserve(n);
  double t_max = 0.0, t_min = 1e300;
  for (int i = 0; i < n; ++i) {
    const double v = std::min(i * grid_step_mv, m.max_voltage_mv);
    const double t = m.transmission(operating_wavelength_nm, v);
    lut.entries_.push_back({v, t});
    t_max = std::max(t_max, t);
    t_min = std::min(t_min, t);
  }
  if (t_max - t_min < 1e-12 || t_max <= 0.0)
    throw CalibrationError("degenerate sweep: transmission constant over the voltage grid");

  lut.norm_scale_ = t_max;
  for (auto& e : lut.entries_) e.weight /= t_max;

  // largest strictly monotone run of consecutive entries
  int best_begin = 0, best_end = 1;
  int run_begin = 0;
  int run_dir = 0;  // +1 increasing, -1 decreasing, 0 unknown
  for (int i = 1; i < n; ++i) {
    const double d = lut.entries_[i].weight - lut.entries_[i - 1].weight;
    const int dir = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (dir == 0 || (run_dir != 0 && dir != run_dir)) {
      run_begin = dir == 0 ? i : i - 1;
      run_dir = dir;
    } else {
      run_dir = dir;
    }
    if (dir != 0 && i + 1 - run_begin > best_end - best_begin) {
      best_begin = run_begin;
      best_end = i + 1;
    }
  }
  if (best_end - best_begin < 2)
    throw CalibrationError("no monotone branch found in the voltage sweep");
  lut.branch_begin_ = best_begin;
  lut.branch_end_ = best_end;
  lut.decreasing_ = lut.entries_[best_end - 1].weight < lut.entries_[best_begin].weight;
  const double w0 = lut.entries_[best_begin].weight;
  const double w1 = lut.entries_[best_end - 1].weight;
  lut.min_weight_ = std::min(w0, w1);
  lut.max_weight_ = std::max(w0, w1);
  return lut;
}

double WeightVoltageLUT::weight_at_voltage(double voltage_mv) const {
  const double v0 = entries_.front().voltage_mv;
  const double v1 = entries_.back().voltage_mv;
  if (voltage_mv < v0 - 1e-9 || voltage_mv > v1 + 1e-9)
    throw CalibrationError("voltage " + std::to_string(voltage_mv) +
                           " mV outside the calibrated grid");
  voltage_mv = std::clamp(voltage_mv, v0, v1);
  // uniform grid except possibly the final (clamped) entry
  const double step = entries_[1].voltage_mv - entries_[0].voltage_mv;
  int i = std::min(static_cast<int>((voltage_mv - v0) / step),
                   static_cast<int>(entries_.size()) - 2);
  while (i > 0 && voltage_mv < entries_[i].voltage_mv) --i;
  while (i + 2 < static_cast<int>(entries_.size()) && voltage_mv > entries_[i + 1].voltage_mv) ++i;
  const auto& a = entries_[i];
  const auto& b = entries_[i + 1];
  const double f = (voltage_mv - a.voltage_mv) / (b.voltage_mv - a.voltage_mv);
  return a.weight + f * (b.weight - a.weight);
}

double WeightVoltageLUT::voltage_for_weight(double target) const {
  if (target < min_weight_ - 1e-12 || target > max_weight_ + 1e-12)
    throw UnreachableWeightError(target, min_weight_, max_weight_);
  target = std::clamp(target, min_weight_, max_weight_);

  // binary search over the monotone branch for the bracketing segment
  int lo = branch_begin_, hi = branch_end_ - 1;
  const auto above = [&](int i) {
    return decreasing_ ? entries_[i].weight >= target : entries_[i].weight <= target;
  };
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (above(mid))
      lo = mid;
    else
      hi = mid;
  }
  const auto& a = entries_[lo];
  const auto& b = entries_[hi];
  if (a.weight == b.weight) return a.voltage_mv;
  const double f = (target - a.weight) / (b.weight - a.weight);
  return a.voltage_mv + f * (b.voltage_mv - a.voltage_mv);
}

Waveform delay_line(const Waveform& w, int n_symbols, double loss_db) {
  if (n_symbols < 0) throw ArgumentError("delay must be >= 0 symbols");
  Waveform out = w;
  out.set_origin_offset(w.origin_offset() + n_symbols);
  if (loss_db != 0.0) {
    const double g = std::pow(10.0, -loss_db / 10.0);
    for (double& s : out.samples()) s *= g;
  }
  return out;
}

namespace {

void check_aligned(const std::vector<Waveform>& ws, const char* who) {
  if (ws.empty()) throw ArgumentError(std::string(who) + " requires at least one waveform");
  const auto& ref = ws.front();
  for (const auto& w : ws) {
    if (w.symbol_period() != ref.symbol_period() || w.oversampling() != ref.oversampling())
      throw AlignmentError(std::string(who) + ": mismatched symbol period or oversampling");
    if (w.origin_offset() != ref.origin_offset() || w.n_samples() != ref.n_samples())
      throw AlignmentError(std::string(who) +
                           ": waveforms are not synchronized (origin or length differs)");
  }
}

}  // namespace

Waveform photodetect(const std::vector<Waveform>& weighted, const NoiseModel& noise,
                     std::uint64_t stream) {
  check_aligned(weighted, "photodetect");
  Waveform out = weighted.front();
  for (size_t i = 1; i < weighted.size(); ++i) {
    const auto& w = weighted[i];
    for (long n = 0; n < out.n_samples(); ++n) out.samples()[n] += w.samples()[n];
  }
  if (noise.sigma > 0.0)
    for (long n = 0; n < out.n_samples(); ++n)
      out.samples()[n] += noise.sigma * gaussian(noise.seed, stream + static_cast<std::uint64_t>(n));
  return out;
}

Waveform electrical_combine(const std::vector<Waveform>& branches) {
  check_aligned(branches, "electrical_combine");
  Waveform out = branches.front();
  for (size_t i = 1; i < branches.size(); ++i)
    for (long n = 0; n < out.n_samples(); ++n) out.samples()[n] += branches[i].samples()[n];
  return out;
}

}  // namespace ptfp
