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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ptfp/errors.hpp"

namespace ptfp {

/// Per-channel data extent. A 1-D sequence is represented as a single row.
struct TensorShape {
  int rows = 1;
  int cols = 0;
  long size() const { return static_cast<long>(rows) * cols; }
  bool operator==(const TensorShape&) const = default;
};

/// Multi-channel sample grid, channel-major storage.
///
/// Values destined for the optical front end must be normalized intensities
/// in [0, 1]; that constraint is enforced at encoding time so the same type
/// can carry signed convolution outputs.
class DataTensor {
public:
  DataTensor() = default;
  DataTensor(TensorShape shape, int channels)
      : shape_(shape), channels_(channels), data_(shape.size() * channels, 0.0) {
    if (shape.rows < 1 || shape.cols < 1 || channels < 1)
      throw ShapeError("DataTensor requires positive shape and at least one channel");
  }

  const TensorShape& shape() const { return shape_; }
  int rows() const { return shape_.rows; }
  int cols() const { return shape_.cols; }
  int channels() const { return channels_; }
  long channel_size() const { return shape_.size(); }

  double at(int channel, int row, int col) const { return data_[index(channel, row, col)]; }
  double& at(int channel, int row, int col) { return data_[index(channel, row, col)]; }

  std::span<const double> channel(int c) const {
    return {data_.data() + static_cast<long>(c) * channel_size(), static_cast<size_t>(channel_size())};
  }
  std::span<double> channel(int c) {
    return {data_.data() + static_cast<long>(c) * channel_size(), static_cast<size_t>(channel_size())};
  }

  const std::vector<double>& raw() const { return data_; }
  std::vector<double>& raw() { return data_; }

  double max_value() const;
  double min_value() const;

  /// Zero-pad every channel (explicit pre-processing; the convolution itself
  /// is always valid-mode).
  DataTensor padded(int top, int bottom, int left, int right) const;

private:
  long index(int channel, int row, int col) const {
    return (static_cast<long>(channel) * shape_.rows + row) * shape_.cols + col;
  }
  TensorShape shape_;
  int channels_ = 0;
  std::vector<double> data_;
};

/// Convolution kernel [rows x cols, in_channels, out_channels], signed weights.
class KernelTensor {
public:
  KernelTensor() = default;
  KernelTensor(TensorShape kshape, int in_channels, int out_channels)
      : kshape_(kshape), in_channels_(in_channels), out_channels_(out_channels),
        w_(kshape.size() * in_channels * out_channels, 0.0) {
    if (kshape.rows < 1 || kshape.cols < 1 || in_channels < 1 || out_channels < 1)
      throw ShapeError("KernelTensor requires nonempty shape and positive channel counts");
  }

  const TensorShape& kshape() const { return kshape_; }
  int krows() const { return kshape_.rows; }
  int kcols() const { return kshape_.cols; }
  int in_channels() const { return in_channels_; }
  int out_channels() const { return out_channels_; }
  long tap_count() const { return kshape_.size(); }
  long weight_count() const { return static_cast<long>(w_.size()); }
  bool is_1d() const { return kshape_.rows == 1; }

  double at(int out_c, int in_c, int row, int col) const { return w_[index(out_c, in_c, row, col)]; }
  double& at(int out_c, int in_c, int row, int col) { return w_[index(out_c, in_c, row, col)]; }

  const std::vector<double>& raw() const { return w_; }
  std::vector<double>& raw() { return w_; }

  double max_abs() const;
  bool all_zero() const;
  void validate_finite() const;

private:
  long index(int out_c, int in_c, int row, int col) const {
    return ((static_cast<long>(out_c) * in_channels_ + in_c) * kshape_.rows + row) * kshape_.cols + col;
  }
  TensorShape kshape_;
  int in_channels_ = 0;
  int out_channels_ = 0;
  std::vector<double> w_;
};

/// Built-in 3x3 single-in single-out kernels: "sobel-h", "sobel-v", "blur",
/// "sharpen", "identity". Throws ArgumentError for unknown names.
KernelTensor named_kernel(std::string_view name);

/// Names accepted by named_kernel, comma separated (for CLI help text).
std::string named_kernel_list();

}  // namespace ptfp
