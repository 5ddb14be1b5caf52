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

#include "ptfp/oracle.hpp"

#include <cmath>
#include <string>

namespace ptfp {

std::vector<double> oracle_xcorr_1d(std::span<const double> x, std::span<const double> k) {
  if (x.empty() || k.empty()) throw ArgumentError("oracle_xcorr_1d requires nonempty inputs");
  if (x.size() < k.size())
    throw ShapeError("input shorter than kernel (" + std::to_string(x.size()) + " < " +
                     std::to_string(k.size()) + ")");
  std::vector<double> y(x.size() - k.size() + 1, 0.0);
  for (size_t n = 0; n < y.size(); ++n) {
    double acc = 0.0;
    for (size_t j = 0; j < k.size(); ++j) acc += k[j] * x[n + j];
    y[n] = acc;
  }
  return y;
}

DataTensor oracle_tensor_conv(const DataTensor& x, const KernelTensor& k) {
  if (x.channels() != k.in_channels())
    throw ShapeError("input has " + std::to_string(x.channels()) + " channels, kernel expects " +
                     std::to_string(k.in_channels()));
  if (x.rows() < k.krows() || x.cols() < k.kcols())
    throw ShapeError("input smaller than kernel in valid mode");

  const int out_rows = x.rows() - k.krows() + 1;
  const int out_cols = x.cols() - k.kcols() + 1;
  DataTensor y({out_rows, out_cols}, k.out_channels());
  for (int o = 0; o < k.out_channels(); ++o)
    for (int i = 0; i < x.channels(); ++i)
      for (int r = 0; r < out_rows; ++r)
        for (int c = 0; c < out_cols; ++c) {
          double acc = 0.0;
          for (int kr = 0; kr < k.krows(); ++kr)
            for (int kc = 0; kc < k.kcols(); ++kc)
              acc += k.at(o, i, kr, kc) * x.at(i, r + kr, c + kc);
          y.at(o, r, c) += acc;
        }
  return y;
}

MemoryReport im2col_accounting(const DataTensor& x, const KernelTensor& k) {
  if (x.channels() != k.in_channels()) throw ShapeError("channel mismatch in im2col accounting");
  if (x.rows() < k.krows() || x.cols() < k.kcols())
    throw ShapeError("input smaller than kernel in valid mode");

  MemoryReport rep;
  rep.input_elements = x.channel_size() * x.channels();
  rep.duplication_factor = k.tap_count();
  rep.im2col_elements = rep.input_elements * rep.duplication_factor;
  rep.delay_stages_per_port = k.kcols() - 1;

  // Materialize the matrix: one row per input position, windows zero-padded
  // at the boundary; columns ordered (in_channel, kernel_row, kernel_col).
  const long positions = x.channel_size();
  const long width = k.tap_count() * k.in_channels();
  std::vector<double> m(positions * width, 0.0);
  for (int r = 0; r < x.rows(); ++r)
    for (int c = 0; c < x.cols(); ++c) {
      double* row = m.data() + (static_cast<long>(r) * x.cols() + c) * width;
      long col = 0;
      for (int i = 0; i < k.in_channels(); ++i)
        for (int kr = 0; kr < k.krows(); ++kr)
          for (int kc = 0; kc < k.kcols(); ++kc, ++col) {
            const int rr = r + kr, cc = c + kc;
            if (rr < x.rows() && cc < x.cols()) row[col] = x.at(i, rr, cc);
          }
    }

  // GeMM against the reshaped kernel, then compare the valid region.
  const DataTensor ref = oracle_tensor_conv(x, k);
  const int out_rows = ref.rows(), out_cols = ref.cols();
  for (int o = 0; o < k.out_channels(); ++o)
    for (int r = 0; r < out_rows; ++r)
      for (int c = 0; c < out_cols; ++c) {
        const double* row = m.data() + (static_cast<long>(r) * x.cols() + c) * width;
        double acc = 0.0;
        long col = 0;
        for (int i = 0; i < k.in_channels(); ++i)
          for (int kr = 0; kr < k.krows(); ++kr)
            for (int kc = 0; kc < k.kcols(); ++kc, ++col) acc += row[col] * k.at(o, i, kr, kc);
        const double want = ref.at(o, r, c);
        const double tol = 1e-12 * std::max(1.0, std::fabs(want));
        if (std::fabs(acc - want) > tol)
          throw NumericError("im2col self-check failed at output (" + std::to_string(o) + "," +
                             std::to_string(r) + "," + std::to_string(c) + ")");
      }
  return rep;
}

}  // namespace ptfp
