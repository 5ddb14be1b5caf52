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
#include <vector>

#include "ptfp/errors.hpp"
#include "ptfp/tensor.hpp"

namespace ptfp {

/// Temporal sample sequence, one value per symbol (times an optional integer
/// oversampling factor). `origin_offset` anchors sample 0 on the absolute
/// symbol grid, so a pure delay is an origin shift without touching samples.
class Waveform {
public:
  Waveform() = default;
  Waveform(double symbol_period_s, int oversampling = 1)
      : symbol_period_s_(symbol_period_s), oversampling_(oversampling) {
    if (symbol_period_s <= 0.0) throw ArgumentError("symbol_period must be positive");
    if (oversampling < 1) throw ArgumentError("oversampling factor must be >= 1");
  }

  static Waveform zeros(int n_symbols, double symbol_period_s, int oversampling = 1) {
    Waveform w(symbol_period_s, oversampling);
    w.samples_.assign(static_cast<size_t>(n_symbols) * oversampling, 0.0);
    w.guard_.assign(n_symbols, 0);
    return w;
  }

  double symbol_period() const { return symbol_period_s_; }
  int oversampling() const { return oversampling_; }
  int n_symbols() const { return static_cast<int>(guard_.size()); }
  long n_samples() const { return static_cast<long>(samples_.size()); }
  long origin_offset() const { return origin_offset_; }
  void set_origin_offset(long o) { origin_offset_ = o; }

  const std::vector<double>& samples() const { return samples_; }
  std::vector<double>& samples() { return samples_; }
  const std::vector<std::uint8_t>& guard_map() const { return guard_; }
  std::vector<std::uint8_t>& guard_map() { return guard_; }

  /// Value of symbol n (first sub-sample of the oversampling group).
  double symbol_value(int n) const { return samples_[static_cast<size_t>(n) * oversampling_]; }
  bool is_guard(int n) const { return guard_[n] != 0; }

private:
  double symbol_period_s_ = 1.0;
  int oversampling_ = 1;
  long origin_offset_ = 0;
  std::vector<double> samples_;
  std::vector<std::uint8_t> guard_;
};

/// Encode one channel as a temporal sequence: rows flattened in row-major
/// order with `guard_len` zero guard symbols between consecutive rows.
/// Payload length = rows*cols + guard_len*(rows-1).
///
/// `row_begin`/`row_count` select a row window (used by the row-shift
/// mapping); row_count < 0 means "through the last row".
Waveform encode_channel(const DataTensor& x, int channel, int guard_len, double symbol_period_s,
                        int oversampling = 1, int row_begin = 0, int row_count = -1);

/// Inverse of encode_channel after valid-region trimming. For a waveform
/// produced by a `taps`-tap filter over an encoded channel, keeps the
/// cols-taps+1 fully-overlapped outputs of each row and drops guard and
/// ramp symbols. taps = 1 is the exact round trip.
/// Returned values are row-major [shape.rows x (shape.cols - taps + 1)].
std::vector<double> decode_channel(const Waveform& w, TensorShape original_shape, int guard_len,
                                   int taps = 1);

}  // namespace ptfp
