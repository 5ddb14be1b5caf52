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

#include <utility>
#include <vector>

#include "ptfp/chip.hpp"
#include "ptfp/tensor.hpp"

namespace ptfp {

enum class SignLabel { plus, minus };

/// Which logical input channel feeds a wavelength, and with how many rows of
/// shift (the row-shift mapping). channel < 0 marks an unused wavelength.
struct WavelengthRoute {
  int channel = -1;
  int row_shift = 0;
};

/// One chip invocation inside a plan. Weights are normalized per
/// (sign pass, output channel); `scale` restores magnitude digitally.
struct ChipCall {
  std::vector<double> voltages_mv;       // [d_w * d_t * d_s]
  std::vector<WavelengthRoute> routing;  // size d_w
  SignLabel sign = SignLabel::plus;
  double scale = 1.0;
  int out_channel = 0;
  int taps = 1;        // kernel columns realized by this call
  int col_offset = 0;  // tap-tiling offset into the full kernel width
  int guard_len = 0;   // guard symbols between encoded rows (= taps - 1)
  std::vector<double> unit_weights;  // [d_w * d_t] requested normalized weights
};

/// Ordered chip invocations plus the digital post-combine recipe: partial
/// result of call c accumulates into output channel `out_channel` with
/// factor sign * scale at column offset `col_offset`.
struct ExecutionPlan {
  TensorShape kshape;
  int in_channels = 1;
  int out_channels = 1;
  std::vector<ChipCall> calls;

  TensorShape valid_output_shape(TensorShape input) const {
    return {input.rows - kshape.rows + 1, input.cols - kshape.cols + 1};
  }
};

struct CompileOptions {
  /// Split kernels wider than d_t into multiple tap segments. When disabled
  /// an oversized kernel raises CapacityError naming the required d_t.
  bool allow_tap_tiling = true;
};

/// Elementwise non-negative split: k = plus - minus, disjoint support.
std::pair<KernelTensor, KernelTensor> split_signs(const KernelTensor& k);

/// Scale a kernel into [0, 1] optical range; scale = max |weight|.
/// An all-zero kernel returns scale 0 (compiles to an empty plan).
std::pair<KernelTensor, double> normalize_weights(const KernelTensor& k);

/// Map a kernel onto the chip.
///
/// 1-D kernels use the wavelength-parallel mode: one wavelength per input
/// channel (channel groups of d_w summed digitally), taps along the delay
/// dimension in reversed order so the delay-line FIR realizes
/// cross-correlation.
///
/// 2-D kernels use the row-shift mode: wavelength r carries the input image
/// shifted by r rows and its taps carry kernel row r, so the photodetector
/// sum across wavelengths completes a 2-D convolution. Kernels taller than
/// d_w fall back to row groups summed digitally; kernels wider than d_t are
/// tap-tiled when allowed.
///
/// Call count = sign passes x C_in x C_out x row groups x tap segments,
/// skipping blocks that are entirely zero.
ExecutionPlan compile_kernel(const KernelTensor& k, const ChipConfig& cfg,
                             const CompileOptions& opt = {});

/// The documented call-count rule, computed without building a plan; tested
/// against enumeration of compiled plans.
long expected_call_count(const KernelTensor& k, const ChipConfig& cfg,
                         const CompileOptions& opt = {});

/// Plan fragment for a 3x3 single-in single-out kernel on a chip with
/// d_w >= 3 and d_t >= 3 (the row-shift demonstration case).
ExecutionPlan plan_row_shift_2d(const KernelTensor& k2d, const ChipConfig& cfg);

/// Run every call through the chip simulation, decode valid regions and
/// apply the signed, scaled post-combine. Inputs must be normalized to
/// [0, 1]. With sigma = 0 and ideal devices the result equals
/// oracle_tensor_conv. Calls execute concurrently; the accumulation is a
/// deterministic ordered reduction. Per-call noise sub-seeds derive from
/// `noise_seed` (or the config seed) plus the call index.
DataTensor execute_plan(const ExecutionPlan& plan, const DataTensor& x, const ChipConfig& cfg,
                        std::optional<std::uint64_t> noise_seed = {});

/// Rebuild the signed kernel a plan realizes (slot-coverage audit).
KernelTensor reconstruct_kernel(const ExecutionPlan& plan);

/// Human-readable call table for `ptfp plan`.
std::string describe_plan(const ExecutionPlan& plan);

}  // namespace ptfp
