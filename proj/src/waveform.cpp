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

#include "ptfp/waveform.hpp"

#include <cmath>
#include <string>

namespace ptfp {

Waveform encode_channel(const DataTensor& x, int channel, int guard_len, double symbol_period_s,
                        int oversampling, int row_begin, int row_count) {
  if (guard_len < 0) throw ArgumentError("guard_len must be >= 0");
  if (channel < 0 || channel >= x.channels()) throw ShapeError("channel index out of range");
  if (row_count < 0) row_count = x.rows() - row_begin;
  if (row_begin < 0 || row_count < 1 || row_begin + row_count > x.rows())
    throw ShapeError("row window out of range");

  const int cols = x.cols();
  const int n_symbols = row_count * cols + guard_len * (row_count - 1);
  Waveform w = Waveform::zeros(n_symbols, symbol_period_s, oversampling);

  int n = 0;
  for (int r = 0; r < row_count; ++r) {
    for (int c = 0; c < cols; ++c, ++n) {
      const double v = x.at(channel, row_begin + r, c);
      if (!std::isfinite(v) || v < 0.0)
        throw EncodingError("sample at channel " + std::to_string(channel) + " row " +
                            std::to_string(row_begin + r) + " col " + std::to_string(c) +
                            " (flat index " + std::to_string(n) +
                            ") is not a valid intensity: " + std::to_string(v));
      for (int o = 0; o < oversampling; ++o) w.samples()[static_cast<size_t>(n) * oversampling + o] = v;
    }
    if (r + 1 < row_count)
      for (int g = 0; g < guard_len; ++g, ++n) w.guard_map()[n] = 1;
  }
  return w;
}

std::vector<double> decode_channel(const Waveform& w, TensorShape shape, int guard_len, int taps) {
  if (taps < 1) throw ArgumentError("taps must be >= 1");
  if (guard_len < 0) throw ArgumentError("guard_len must be >= 0");
  if (shape.cols < taps)
    throw ShapeError("row length " + std::to_string(shape.cols) + " shorter than " +
                     std::to_string(taps) + "-tap filter");

  const int out_cols = shape.cols - taps + 1;
  // last symbol the decode touches, on the absolute grid
  const long last = static_cast<long>(shape.rows - 1) * (shape.cols + guard_len) + (out_cols - 1) +
                    (taps - 1);
  if (last - w.origin_offset() >= w.n_symbols() || w.origin_offset() > 0)
    throw ShapeError("waveform (" + std::to_string(w.n_symbols()) + " symbols from offset " +
                     std::to_string(w.origin_offset()) + ") too short for shape " +
                     std::to_string(shape.rows) + "x" + std::to_string(shape.cols) + " with " +
                     std::to_string(taps) + " taps");

  std::vector<double> out(static_cast<size_t>(shape.rows) * out_cols);
  for (int r = 0; r < shape.rows; ++r) {
    const long row_start = static_cast<long>(r) * (shape.cols + guard_len);
    for (int c = 0; c < out_cols; ++c) {
      const long abs_idx = row_start + c + (taps - 1);
      out[static_cast<size_t>(r) * out_cols + c] =
          w.symbol_value(static_cast<int>(abs_idx - w.origin_offset()));
    }
  }
  return out;
}

}  // namespace ptfp
