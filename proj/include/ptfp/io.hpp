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

#include <string>
#include <vector>

#include "ptfp/chip.hpp"
#include "ptfp/compiler.hpp"
#include "ptfp/network.hpp"
#include "ptfp/tensor.hpp"
#include "ptfp/waveform.hpp"

namespace ptfp {

// All writers emit fixed-format text ('\n' line endings, %.17g doubles) so
// identical inputs produce byte-identical files.

/// Binary PGM (P5, maxval 255), normalized to [0, 1] on load.
DataTensor read_pgm(const std::string& path);
void write_pgm(const std::string& path, const DataTensor& image, int channel = 0);

/// Affine rescale of an arbitrary real channel to [0, 255] bytes; returns
/// (offset, scale) such that byte = round((value - offset) * scale).
std::pair<double, double> write_pgm_rescaled(const std::string& path, const DataTensor& image,
                                             int channel = 0);

/// CSV with the one-line header `# shape=...;channels=...;symbol_period_ps=...`.
void write_tensor_csv(const std::string& path, const DataTensor& t);
DataTensor read_tensor_csv(const std::string& path);
void write_waveform_csv(const std::string& path, const Waveform& w);
Waveform read_waveform_csv(const std::string& path);

/// LUT export: `# mrr_id=...` header then voltage_mV,weight rows.
void write_lut_csv(const std::string& path, const WeightVoltageLUT& lut);

/// Chip description JSON (schema 1). Throws ParseError with context on
/// malformed input. Loading calibrates all rings.
ChipConfig load_chip_json(const std::string& path);
ChipConfig chip_from_json_text(const std::string& text, const std::string& origin = "<string>");
std::string chip_to_json_text(const ChipConfig& cfg);

/// Kernel from JSON ({"rows","cols","in_channels","out_channels","weights"})
/// or a built-in name (sobel-h, sobel-v, blur, sharpen, identity).
KernelTensor load_kernel(const std::string& name_or_path);

/// Execution plan audit format.
std::string plan_to_json_text(const ExecutionPlan& plan);
ExecutionPlan plan_from_json_text(const std::string& text);

/// Checkpoint: one JSON header line (shapes, hyperparams, seed, payload
/// count) followed by the flat little-endian float64 payload. Layer order:
/// conv1, bias1, conv2, bias2, w_x, w_h, b_h, w_fc, b_fc.
void save_checkpoint(const std::string& path, const NetworkSpec& spec);
NetworkSpec load_checkpoint(const std::string& path);

/// Reproducibility sidecar written by every CLI invocation that produces
/// output files.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string tool_version;
  double duration_ms = 0.0;
  std::vector<std::pair<std::string, double>> extra;  // e.g. pgm offset/scale
  std::string error;                                  // empty on success
};
void write_manifest(const std::string& path, const RunManifest& m);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ptfp
