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

#include "ptfp/compiler.hpp"
#include "ptfp/tensor.hpp"

namespace ptfp {

/// Minimal dense matrix (row-major) for the recurrent and classifier layers.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
  double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
};

enum class Backend { digital, chip };

/// Action-recognition network: two chip-executable convolution layers
/// (ReLU), an Elman recurrent layer over the per-frame features and a
/// fully connected softmax classifier. The recurrent and dense layers
/// always run digitally.
struct NetworkSpec {
  int frame_rows = 24;
  int frame_cols = 24;
  int frames_per_segment = 5;
  int n_classes = 5;
  int hidden = 32;

  KernelTensor conv1;  // [3x3, 1, 4]
  std::vector<double> bias1;
  KernelTensor conv2;  // [3x3, 4, 8]
  std::vector<double> bias2;

  Mat w_x;  // [hidden x feature_dim]
  Mat w_h;  // [hidden x hidden]
  std::vector<double> b_h;
  Mat w_fc;  // [n_classes x hidden]
  std::vector<double> b_fc;

  bool trained = false;
  std::uint64_t seed = 0;

  int conv1_out_rows() const { return frame_rows - conv1.krows() + 1; }
  int conv1_out_cols() const { return frame_cols - conv1.kcols() + 1; }
  int conv2_out_rows() const { return conv1_out_rows() - conv2.krows() + 1; }
  int conv2_out_cols() const { return conv1_out_cols() - conv2.kcols() + 1; }
  int feature_dim() const { return conv2_out_rows() * conv2_out_cols() * conv2.out_channels(); }

  /// Fresh untrained network with seeded initialization.
  static NetworkSpec make(std::uint64_t seed);
};

struct VideoSegment {
  std::vector<DataTensor> frames;  // frames_per_segment x [24x24, 1 channel]
  int label = 0;
};

/// Seeded synthetic 5-class motion dataset (moving blob): oscillate-x,
/// oscillate-y, expand-contract, translate-right, translate-down.
/// Class of segment i is i mod 5, so any multiple of 5 is class-balanced.
std::vector<VideoSegment> synth_dataset(int n_segments, std::uint64_t seed);

/// The repo's canonical split: 1000 seeded segments, first 800 train /
/// last 200 test (labels cycle, so both stay balanced).
struct DatasetSplit {
  std::vector<VideoSegment> train;
  std::vector<VideoSegment> test;
};
DatasetSplit canonical_dataset(std::uint64_t seed);

/// Seeded sample of n distinct segments (the 96-segment evaluation draw).
std::vector<VideoSegment> sample_segments(const std::vector<VideoSegment>& pool, int n,
                                          std::uint64_t seed);

/// Compiled plans reused across frames (compiling per frame would dominate
/// inference time).
struct ChipPlans {
  ExecutionPlan conv1;
  ExecutionPlan conv2;
};
ChipPlans compile_network(const NetworkSpec& spec, const ChipConfig& cfg);

/// One convolution layer: linear part on the chosen backend, then bias and
/// ReLU. The chip path normalizes the input into [0, 1], runs the compiled
/// plan and inverts the scale digitally. `noise_seed` overrides the config
/// noise seed for this call (chip backend only).
DataTensor conv_layer_forward(const KernelTensor& k, const std::vector<double>& bias,
                              const DataTensor& x, const ChipConfig& cfg, Backend backend,
                              const ExecutionPlan* plan = nullptr,
                              std::uint64_t noise_seed = 0);

/// Elman recurrence h_t = tanh(W_x f_t + W_h h_{t-1} + b), h_0 = 0;
/// returns the final hidden state.
std::vector<double> rnn_forward(const NetworkSpec& spec,
                                const std::vector<std::vector<double>>& features);

struct Classification {
  int label = 0;
  std::vector<double> scores;  // softmax, sums to 1
};

/// Full inference over one segment. Throws UsageError on an untrained spec.
Classification classify(const NetworkSpec& spec, const VideoSegment& segment,
                        const ChipConfig& cfg, Backend backend,
                        const ChipPlans* plans = nullptr, std::uint64_t noise_seed = 0);

struct TrainHyperparams {
  int epochs = 20;
  double learning_rate = 0.02;
  double momentum = 0.9;
  int batch_size = 16;
  std::uint64_t seed = 7;
  /// Std of seeded Gaussian noise added to conv pre-activations during
  /// training; hardens inference against analog noise. 0 disables.
  double feature_noise_std = 0.12;
};

struct TrainCurvePoint {
  int epoch;
  double loss;
  double train_accuracy;
};

struct TrainResult {
  NetworkSpec spec;
  std::vector<TrainCurvePoint> curve;
};

/// Deterministic SGD training (digital backend only). Throws NumericError
/// naming the last stable epoch if the loss diverges.
TrainResult train(const std::vector<VideoSegment>& trainset, const TrainHyperparams& hp);

/// Accuracy of `spec` over `segments`; chip backend uses per-segment
/// sub-seeds derived from `seed`.
double evaluate_accuracy(const NetworkSpec& spec, const std::vector<VideoSegment>& segments,
                         const ChipConfig& cfg, Backend backend, std::uint64_t seed = 0,
                         const ChipPlans* plans = nullptr);

/// n_classes x n_classes counts, rows = true label, cols = prediction.
Mat confusion_matrix(const NetworkSpec& spec, const std::vector<VideoSegment>& segments,
                     const ChipConfig& cfg, Backend backend, std::uint64_t seed = 0);

struct SweepPoint {
  double sigma;
  double mean_accuracy;
  double p5;   // 5th percentile over trials
  double p95;  // 95th percentile over trials
};

/// Noise-accuracy curve: chip-backend inference at each sigma with
/// `trials_per_sigma` independent seeds; the sigma = 0 entry equals the
/// digital baseline exactly.
std::vector<SweepPoint> noise_accuracy_sweep(const NetworkSpec& spec,
                                             const std::vector<VideoSegment>& testset,
                                             const ChipConfig& cfg, std::vector<double> sigmas,
                                             int trials_per_sigma, std::uint64_t seed = 1);

}  // namespace ptfp
