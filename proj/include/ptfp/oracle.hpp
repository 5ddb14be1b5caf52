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
#include <vector>

#include "ptfp/tensor.hpp"

namespace ptfp {

// Brute-force reference convolutions. These are the ground truth for the
// whole repo: plain nested loops, no FFT, and no code shared with the chip
// simulation path. Convention is cross-correlation (no kernel flip),
// valid mode only: y[n] = sum_j k[j] * x[n+j].

/// Valid 1-D cross-correlation; output length len(x) - len(k) + 1.
std::vector<double> oracle_xcorr_1d(std::span<const double> x, std::span<const double> k);

/// Valid tensor convolution: output channel o = sum over input channels i of
/// xcorr(x_i, k[:, i, o]). Handles 1-D and 2-D kernels.
DataTensor oracle_tensor_conv(const DataTensor& x, const KernelTensor& k);

/// Memory bookkeeping for the matrix-multiplication route.
struct MemoryReport {
  long input_elements = 0;       // rows*cols*C_in
  long im2col_elements = 0;      // rows*cols*|D_kernel|*C_in
  long duplication_factor = 0;   // |D_kernel|, exactly
  int delay_stages_per_port = 0; // streaming equivalent: kcols-1 symbol delays
};

/// Computes the im2col size accounting, materializes the im2col matrix
/// (one row per input position, zero-padded windows), and self-checks that
/// the matrix product reproduces oracle_tensor_conv on the valid region.
/// Throws NumericError if the self-check fails.
MemoryReport im2col_accounting(const DataTensor& x, const KernelTensor& k);

}  // namespace ptfp
