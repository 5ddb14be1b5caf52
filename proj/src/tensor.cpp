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

#include "ptfp/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace ptfp {

double DataTensor::max_value() const {
  double m = data_.empty() ? 0.0 : data_.front();
  for (double v : data_) m = std::max(m, v);
  return m;
}

double DataTensor::min_value() const {
  double m = data_.empty() ? 0.0 : data_.front();
  for (double v : data_) m = std::min(m, v);
  return m;
}

DataTensor DataTensor::padded(int top, int bottom, int left, int right) const {
  if (top < 0 || bottom < 0 || left < 0 || right < 0)
    throw ArgumentError("padding amounts must be non-negative");
  DataTensor out({rows() + top + bottom, cols() + left + right}, channels());
  for (int c = 0; c < channels(); ++c)
    for (int r = 0; r < rows(); ++r)
      for (int col = 0; col < cols(); ++col)
        out.at(c, r + top, col + left) = at(c, r, col);
  return out;
}

double KernelTensor::max_abs() const {
  double m = 0.0;
  for (double v : w_) m = std::max(m, std::fabs(v));
  return m;
}

bool KernelTensor::all_zero() const {
  return std::all_of(w_.begin(), w_.end(), [](double v) { return v == 0.0; });
}

void KernelTensor::validate_finite() const {
  for (double v : w_)
    if (!std::isfinite(v)) throw ArgumentError("kernel weights must be finite");
}

namespace {

KernelTensor kernel_3x3(const double (&w)[9]) {
  KernelTensor k({3, 3}, 1, 1);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) k.at(0, 0, r, c) = w[r * 3 + c];
  return k;
}

}  // namespace

KernelTensor named_kernel(std::string_view name) {
  if (name == "sobel-h") return kernel_3x3({-1, 0, 1, -2, 0, 2, -1, 0, 1});
  if (name == "sobel-v") return kernel_3x3({-1, -2, -1, 0, 0, 0, 1, 2, 1});
  // nine equal weights
  if (name == "blur")
    return kernel_3x3({1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9});
  // horizontal Sobel superposed with the identity kernel
  if (name == "sharpen") return kernel_3x3({-1, 0, 1, -2, 1, 2, -1, 0, 1});
  if (name == "identity") return kernel_3x3({0, 0, 0, 0, 1, 0, 0, 0, 0});
  throw ArgumentError("unknown kernel name '" + std::string(name) + "'; choose one of " +
                      named_kernel_list());
}

std::string named_kernel_list() { return "sobel-h, sobel-v, blur, sharpen, identity"; }

}  // namespace ptfp
