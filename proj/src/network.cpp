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

#include "ptfp/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ptfp/oracle.hpp"
#include "ptfp/rng.hpp"

namespace ptfp {

NetworkSpec NetworkSpec::make(std::uint64_t seed) {
  NetworkSpec s;
  s.seed = seed;
  s.conv1 = KernelTensor({3, 3}, 1, 4);
  s.bias1.assign(4, 0.0);
  s.conv2 = KernelTensor({3, 3}, 4, 8);
  s.bias2.assign(8, 0.0);

  SplitMix rng(derive_seed(seed, 0xC0FFEE));
  const auto init = [&](std::vector<double>& w, double limit) {
    for (double& v : w) v = rng.uniform(-limit, limit);
  };
  init(s.conv1.raw(), std::sqrt(6.0 / (9 + 9 * 4)));
  init(s.conv2.raw(), std::sqrt(6.0 / (9 * 4 + 9 * 8)));

  const int f = s.feature_dim();
  s.w_x = Mat(s.hidden, f);
  init(s.w_x.a, std::sqrt(6.0 / (f + s.hidden)));
  s.w_h = Mat(s.hidden, s.hidden);
  init(s.w_h.a, std::sqrt(6.0 / (2 * s.hidden)));
  s.b_h.assign(s.hidden, 0.0);
  s.w_fc = Mat(s.n_classes, s.hidden);
  init(s.w_fc.a, std::sqrt(6.0 / (s.hidden + s.n_classes)));
  s.b_fc.assign(s.n_classes, 0.0);
  return s;
}

std::vector<VideoSegment> synth_dataset(int n_segments, std::uint64_t seed) {
  if (n_segments < 1) throw ArgumentError("need at least one segment");
  const int R = 24, C = 24, F = 5;
  std::vector<VideoSegment> out;
  out.reserve(n_segments);
  for (int idx = 0; idx < n_segments; ++idx) {
    SplitMix rng(derive_seed(seed, static_cast<std::uint64_t>(idx)));
    const int cls = idx % 5;
    const double cx0 = rng.uniform(9.0, 15.0);
    const double cy0 = rng.uniform(9.0, 15.0);
    const double sig0 = rng.uniform(2.0, 3.0);
    const double amp = rng.uniform(3.0, 5.0);
    const double speed = rng.uniform(1.3, 2.2);
    const double bright = rng.uniform(0.7, 1.0);

    VideoSegment seg;
    seg.label = cls;
    seg.frames.reserve(F);
    for (int t = 0; t < F; ++t) {
      double cx = cx0, cy = cy0, sig = sig0;
      const double osc = std::sin(M_PI * t / 2.0);
      switch (cls) {
        case 0: cx = cx0 + amp * osc; break;                  // oscillate-x
        case 1: cy = cy0 + amp * osc; break;                  // oscillate-y
        case 2: sig = sig0 * (1.0 + 0.55 * osc); break;       // expand-contract
        case 3: cx = cx0 + speed * (t - 2.0); break;          // translate-right
        case 4: cy = cy0 + speed * (t - 2.0); break;          // translate-down
      }
      DataTensor frame({R, C}, 1);
      for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
          const double dx = c - cx, dy = r - cy;
          frame.at(0, r, c) =
              std::clamp(bright * std::exp(-(dx * dx + dy * dy) / (2.0 * sig * sig)), 0.0, 1.0);
        }
      seg.frames.push_back(std::move(frame));
    }
    out.push_back(std::move(seg));
  }
  return out;
}

DatasetSplit canonical_dataset(std::uint64_t seed) {
  auto all = synth_dataset(1000, seed);
  DatasetSplit d;
  d.train.assign(all.begin(), all.begin() + 800);
  d.test.assign(all.begin() + 800, all.end());
  return d;
}

std::vector<VideoSegment> sample_segments(const std::vector<VideoSegment>& pool, int n,
                                          std::uint64_t seed) {
  if (n >= static_cast<int>(pool.size())) return pool;
  std::vector<int> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  SplitMix rng(derive_seed(seed, 0xE7A1));
  for (int i = 0; i < n; ++i)
    std::swap(idx[i], idx[i + static_cast<int>(rng.below(idx.size() - i))]);
  std::vector<VideoSegment> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(pool[idx[i]]);
  return out;
}

ChipPlans compile_network(const NetworkSpec& spec, const ChipConfig& cfg) {
  return {compile_kernel(spec.conv1, cfg), compile_kernel(spec.conv2, cfg)};
}

namespace {

DataTensor relu_bias(DataTensor z, const std::vector<double>& bias) {
  for (int o = 0; o < z.channels(); ++o)
    for (double& v : z.channel(o)) v = std::max(0.0, v + bias[o]);
  return z;
}

}  // namespace

DataTensor conv_layer_forward(const KernelTensor& k, const std::vector<double>& bias,
                              const DataTensor& x, const ChipConfig& cfg, Backend backend,
                              const ExecutionPlan* plan, std::uint64_t noise_seed) {
  if (backend == Backend::digital) return relu_bias(oracle_tensor_conv(x, k), bias);

  // Chip path: rescale into [0, 1], run the plan, invert the scale.
  const double s_in = x.max_value();
  if (x.min_value() < 0.0) throw EncodingError("chip convolution input must be non-negative");
  ExecutionPlan local;
  if (!plan) {
    local = compile_kernel(k, cfg);
    plan = &local;
  }
  DataTensor lin(plan->valid_output_shape(x.shape()), k.out_channels());
  if (s_in > 0.0) {
    DataTensor xn = x;
    for (double& v : xn.raw()) v /= s_in;
    lin = execute_plan(*plan, xn, cfg, noise_seed);
    for (double& v : lin.raw()) v *= s_in;
  }
  return relu_bias(std::move(lin), bias);
}

std::vector<double> rnn_forward(const NetworkSpec& spec,
                                const std::vector<std::vector<double>>& features) {
  std::vector<double> h(spec.hidden, 0.0);
  std::vector<double> u(spec.hidden);
  for (const auto& f : features) {
    if (static_cast<int>(f.size()) != spec.w_x.cols)
      throw ShapeError("feature vector has wrong dimension");
    for (double v : f)
      if (!std::isfinite(v)) throw NumericError("non-finite feature value in recurrent layer");
    for (int i = 0; i < spec.hidden; ++i) {
      double acc = spec.b_h[i];
      const double* wx = spec.w_x.a.data() + static_cast<size_t>(i) * spec.w_x.cols;
      for (size_t j = 0; j < f.size(); ++j) acc += wx[j] * f[j];
      const double* wh = spec.w_h.a.data() + static_cast<size_t>(i) * spec.hidden;
      for (int j = 0; j < spec.hidden; ++j) acc += wh[j] * h[j];
      u[i] = acc;
    }
    for (int i = 0; i < spec.hidden; ++i) h[i] = std::tanh(u[i]);
  }
  return h;
}

namespace {

std::vector<double> softmax(std::vector<double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : logits) v /= sum;
  return logits;
}

std::vector<std::vector<double>> frame_features(const NetworkSpec& spec, const VideoSegment& seg,
                                                const ChipConfig& cfg, Backend backend,
                                                const ChipPlans* plans, std::uint64_t noise_seed) {
  std::vector<std::vector<double>> feats;
  feats.reserve(seg.frames.size());
  for (size_t t = 0; t < seg.frames.size(); ++t) {
    const DataTensor a1 = conv_layer_forward(
        spec.conv1, spec.bias1, seg.frames[t], cfg, backend, plans ? &plans->conv1 : nullptr,
        derive_seed(noise_seed, 2 * t));
    const DataTensor a2 =
        conv_layer_forward(spec.conv2, spec.bias2, a1, cfg, backend,
                           plans ? &plans->conv2 : nullptr, derive_seed(noise_seed, 2 * t + 1));
    feats.emplace_back(a2.raw());
  }
  return feats;
}

}  // namespace

Classification classify(const NetworkSpec& spec, const VideoSegment& segment,
                        const ChipConfig& cfg, Backend backend, const ChipPlans* plans,
                        std::uint64_t noise_seed) {
  if (!spec.trained) throw UsageError("network is untrained; run training or load a checkpoint");
  if (static_cast<int>(segment.frames.size()) != spec.frames_per_segment)
    throw ShapeError("segment must have " + std::to_string(spec.frames_per_segment) + " frames");

  const auto feats = frame_features(spec, segment, cfg, backend, plans, noise_seed);
  const auto h = rnn_forward(spec, feats);
  std::vector<double> logits(spec.n_classes);
  for (int i = 0; i < spec.n_classes; ++i) {
    double acc = spec.b_fc[i];
    for (int j = 0; j < spec.hidden; ++j) acc += spec.w_fc(i, j) * h[j];
    logits[i] = acc;
  }
  Classification res;
  res.scores = softmax(std::move(logits));
  res.label = static_cast<int>(
      std::max_element(res.scores.begin(), res.scores.end()) - res.scores.begin());
  return res;
}

// ---------------------------------------------------------------------------
// Training (digital backend, deterministic)
// ---------------------------------------------------------------------------

namespace {

// Noise applied to conv pre-activations during training, matched to what the
// analog path would add: each output channel accumulates (sign passes x
// input-channel calls) x d_t photodetector noise sources, all scaled by the
// kernel normalization and the input rescale.
double emulated_noise_std(const KernelTensor& k, double sigma_emu, int d_t, double input_scale) {
  const int calls_per_out = 2 * k.in_channels();
  return sigma_emu * std::sqrt(static_cast<double>(d_t) * calls_per_out) * k.max_abs() *
         input_scale;
}

struct FrameCache {
  DataTensor z1, a1, z2, a2;
};

struct SegmentCache {
  std::vector<FrameCache> frames;
  std::vector<std::vector<double>> feats;
  std::vector<std::vector<double>> hidden;  // h_1..h_T
  std::vector<double> scores;
};

struct Gradients {
  KernelTensor conv1, conv2;
  std::vector<double> bias1, bias2;
  Mat w_x, w_h, w_fc;
  std::vector<double> b_h, b_fc;

  explicit Gradients(const NetworkSpec& s)
      : conv1(s.conv1.kshape(), s.conv1.in_channels(), s.conv1.out_channels()),
        conv2(s.conv2.kshape(), s.conv2.in_channels(), s.conv2.out_channels()),
        bias1(s.bias1.size(), 0.0), bias2(s.bias2.size(), 0.0),
        w_x(s.hidden, s.w_x.cols), w_h(s.hidden, s.hidden), w_fc(s.n_classes, s.hidden),
        b_h(s.hidden, 0.0), b_fc(s.n_classes, 0.0) {}

  void zero() {
    std::fill(conv1.raw().begin(), conv1.raw().end(), 0.0);
    std::fill(conv2.raw().begin(), conv2.raw().end(), 0.0);
    std::fill(bias1.begin(), bias1.end(), 0.0);
    std::fill(bias2.begin(), bias2.end(), 0.0);
    std::fill(w_x.a.begin(), w_x.a.end(), 0.0);
    std::fill(w_h.a.begin(), w_h.a.end(), 0.0);
    std::fill(w_fc.a.begin(), w_fc.a.end(), 0.0);
    std::fill(b_h.begin(), b_h.end(), 0.0);
    std::fill(b_fc.begin(), b_fc.end(), 0.0);
  }
};

DataTensor conv_linear(const DataTensor& x, const KernelTensor& k, const std::vector<double>& bias) {
  DataTensor z = oracle_tensor_conv(x, k);
  for (int o = 0; o < z.channels(); ++o)
    for (double& v : z.channel(o)) v += bias[o];
  return z;
}

double forward_segment(const NetworkSpec& spec, const VideoSegment& seg, SegmentCache& cache,
                       SplitMix* noise_rng, double sigma_emu, int d_t) {
  const int T = spec.frames_per_segment;
  cache.frames.resize(T);
  cache.feats.resize(T);
  cache.hidden.assign(T, std::vector<double>(spec.hidden, 0.0));

  for (int t = 0; t < T; ++t) {
    FrameCache& fc = cache.frames[t];
    fc.z1 = conv_linear(seg.frames[t], spec.conv1, spec.bias1);
    if (noise_rng && sigma_emu > 0.0) {
      const double std1 = emulated_noise_std(spec.conv1, sigma_emu, d_t, seg.frames[t].max_value());
      for (double& v : fc.z1.raw()) v += std1 * normal_quantile(noise_rng->next_double());
    }
    fc.a1 = fc.z1;
    for (double& v : fc.a1.raw()) v = std::max(0.0, v);

    fc.z2 = conv_linear(fc.a1, spec.conv2, spec.bias2);
    if (noise_rng && sigma_emu > 0.0) {
      const double std2 = emulated_noise_std(spec.conv2, sigma_emu, d_t, fc.a1.max_value());
      for (double& v : fc.z2.raw()) v += std2 * normal_quantile(noise_rng->next_double());
    }
    fc.a2 = fc.z2;
    for (double& v : fc.a2.raw()) v = std::max(0.0, v);
    cache.feats[t] = fc.a2.raw();
  }

  std::vector<double> h(spec.hidden, 0.0);
  for (int t = 0; t < T; ++t) {
    std::vector<double>& ht = cache.hidden[t];
    for (int i = 0; i < spec.hidden; ++i) {
      double acc = spec.b_h[i];
      const double* wx = spec.w_x.a.data() + static_cast<size_t>(i) * spec.w_x.cols;
      const auto& f = cache.feats[t];
      for (size_t j = 0; j < f.size(); ++j) acc += wx[j] * f[j];
      const double* wh = spec.w_h.a.data() + static_cast<size_t>(i) * spec.hidden;
      for (int j = 0; j < spec.hidden; ++j) acc += wh[j] * h[j];
      ht[i] = std::tanh(acc);
    }
    h = ht;
  }

  std::vector<double> logits(spec.n_classes);
  for (int i = 0; i < spec.n_classes; ++i) {
    double acc = spec.b_fc[i];
    for (int j = 0; j < spec.hidden; ++j) acc += spec.w_fc(i, j) * h[j];
    logits[i] = acc;
  }
  cache.scores = softmax(std::move(logits));
  return -std::log(std::max(cache.scores[seg.label], 1e-300));
}

// dK[o][i] += valid xcorr of x_i with dz_o; dX accumulates the transposed map.
void conv_backward(const DataTensor& x, const KernelTensor& k, const DataTensor& dz,
                   KernelTensor& dk, std::vector<double>& dbias, DataTensor* dx) {
  for (int o = 0; o < k.out_channels(); ++o) {
    double db = 0.0;
    for (double v : dz.channel(o)) db += v;
    dbias[o] += db;
  }
  for (int o = 0; o < k.out_channels(); ++o)
    for (int i = 0; i < k.in_channels(); ++i)
      for (int kr = 0; kr < k.krows(); ++kr)
        for (int kc = 0; kc < k.kcols(); ++kc) {
          double acc = 0.0;
          for (int r = 0; r < dz.rows(); ++r)
            for (int c = 0; c < dz.cols(); ++c) acc += dz.at(o, r, c) * x.at(i, r + kr, c + kc);
          dk.at(o, i, kr, kc) += acc;
        }
  if (dx) {
    for (int i = 0; i < k.in_channels(); ++i)
      for (int r = 0; r < x.rows(); ++r)
        for (int c = 0; c < x.cols(); ++c) {
          double acc = 0.0;
          for (int o = 0; o < k.out_channels(); ++o)
            for (int kr = 0; kr < k.krows(); ++kr) {
              const int zr = r - kr;
              if (zr < 0 || zr >= dz.rows()) continue;
              for (int kc = 0; kc < k.kcols(); ++kc) {
                const int zc = c - kc;
                if (zc < 0 || zc >= dz.cols()) continue;
                acc += dz.at(o, zr, zc) * k.at(o, i, kr, kc);
              }
            }
          dx->at(i, r, c) = acc;
        }
  }
}

void backward_segment(const NetworkSpec& spec, const VideoSegment& seg, const SegmentCache& cache,
                      Gradients& g) {
  const int T = spec.frames_per_segment;

  std::vector<double> dlogit = cache.scores;
  dlogit[seg.label] -= 1.0;

  const auto& h_last = cache.hidden[T - 1];
  std::vector<double> dh(spec.hidden, 0.0);
  for (int i = 0; i < spec.n_classes; ++i) {
    g.b_fc[i] += dlogit[i];
    for (int j = 0; j < spec.hidden; ++j) {
      g.w_fc(i, j) += dlogit[i] * h_last[j];
      dh[j] += spec.w_fc(i, j) * dlogit[i];
    }
  }

  std::vector<std::vector<double>> dfeat(T);
  std::vector<double> du(spec.hidden);
  for (int t = T - 1; t >= 0; --t) {
    const auto& ht = cache.hidden[t];
    for (int i = 0; i < spec.hidden; ++i) du[i] = dh[i] * (1.0 - ht[i] * ht[i]);
    const std::vector<double>* h_prev = t > 0 ? &cache.hidden[t - 1] : nullptr;
    const auto& f = cache.feats[t];
    dfeat[t].assign(f.size(), 0.0);
    for (int i = 0; i < spec.hidden; ++i) {
      g.b_h[i] += du[i];
      double* gwx = g.w_x.a.data() + static_cast<size_t>(i) * g.w_x.cols;
      const double* wx = spec.w_x.a.data() + static_cast<size_t>(i) * spec.w_x.cols;
      for (size_t j = 0; j < f.size(); ++j) {
        gwx[j] += du[i] * f[j];
        dfeat[t][j] += wx[j] * du[i];
      }
      if (h_prev) {
        double* gwh = g.w_h.a.data() + static_cast<size_t>(i) * spec.hidden;
        for (int j = 0; j < spec.hidden; ++j) gwh[j] += du[i] * (*h_prev)[j];
      }
    }
    std::vector<double> dh_prev(spec.hidden, 0.0);
    if (h_prev)
      for (int i = 0; i < spec.hidden; ++i)
        for (int j = 0; j < spec.hidden; ++j) dh_prev[j] += spec.w_h(i, j) * du[i];
    dh = std::move(dh_prev);
  }

  for (int t = 0; t < T; ++t) {
    const FrameCache& fc = cache.frames[t];
    DataTensor dz2(fc.z2.shape(), fc.z2.channels());
    for (size_t i = 0; i < dz2.raw().size(); ++i)
      dz2.raw()[i] = fc.z2.raw()[i] > 0.0 ? dfeat[t][i] : 0.0;

    DataTensor da1(fc.a1.shape(), fc.a1.channels());
    conv_backward(fc.a1, spec.conv2, dz2, g.conv2, g.bias2, &da1);

    DataTensor dz1(fc.z1.shape(), fc.z1.channels());
    for (size_t i = 0; i < dz1.raw().size(); ++i)
      dz1.raw()[i] = fc.z1.raw()[i] > 0.0 ? da1.raw()[i] : 0.0;
    conv_backward(seg.frames[t], spec.conv1, dz1, g.conv1, g.bias1, nullptr);
  }
}

void sgd_step(std::vector<double>& w, std::vector<double>& vel, const std::vector<double>& grad,
              double lr, double mu, double inv_batch) {
  for (size_t i = 0; i < w.size(); ++i) {
    vel[i] = mu * vel[i] - lr * grad[i] * inv_batch;
    w[i] += vel[i];
  }
}

}  // namespace

TrainResult train(const std::vector<VideoSegment>& trainset, const TrainHyperparams& hp) {
  if (trainset.empty()) throw ArgumentError("empty training set");
  NetworkSpec spec = NetworkSpec::make(hp.seed);
  const int d_t = 3;  // target chip taps; only scales the noise augmentation

  Gradients grads(spec);
  Gradients vel(spec);
  vel.zero();

  std::vector<int> order(trainset.size());
  std::iota(order.begin(), order.end(), 0);
  SplitMix shuffle_rng(derive_seed(hp.seed, 0x5EED));
  SplitMix noise_rng(derive_seed(hp.seed, 0xA06));

  TrainResult result;
  SegmentCache cache;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    // Fisher-Yates with the project RNG: platform-independent determinism
    for (size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    double loss_sum = 0.0;
    long correct = 0;
    size_t pos = 0;
    while (pos < order.size()) {
      const size_t batch = std::min<size_t>(hp.batch_size, order.size() - pos);
      grads.zero();
      for (size_t b = 0; b < batch; ++b) {
        const VideoSegment& seg = trainset[order[pos + b]];
        loss_sum += forward_segment(spec, seg, cache, &noise_rng, hp.feature_noise_std, d_t);
        if (static_cast<int>(std::max_element(cache.scores.begin(), cache.scores.end()) -
                             cache.scores.begin()) == seg.label)
          ++correct;
        backward_segment(spec, seg, cache, grads);
      }
      const double ib = 1.0 / static_cast<double>(batch);
      sgd_step(spec.conv1.raw(), vel.conv1.raw(), grads.conv1.raw(), hp.learning_rate, hp.momentum, ib);
      sgd_step(spec.bias1, vel.bias1, grads.bias1, hp.learning_rate, hp.momentum, ib);
      sgd_step(spec.conv2.raw(), vel.conv2.raw(), grads.conv2.raw(), hp.learning_rate, hp.momentum, ib);
      sgd_step(spec.bias2, vel.bias2, grads.bias2, hp.learning_rate, hp.momentum, ib);
      sgd_step(spec.w_x.a, vel.w_x.a, grads.w_x.a, hp.learning_rate, hp.momentum, ib);
      sgd_step(spec.w_h.a, vel.w_h.a, grads.w_h.a, hp.learning_rate, hp.momentum, ib);
      sgd_step(spec.b_h, vel.b_h, grads.b_h, hp.learning_rate, hp.momentum, ib);
      sgd_step(spec.w_fc.a, vel.w_fc.a, grads.w_fc.a, hp.learning_rate, hp.momentum, ib);
      sgd_step(spec.b_fc, vel.b_fc, grads.b_fc, hp.learning_rate, hp.momentum, ib);
      pos += batch;
    }

    const double mean_loss = loss_sum / static_cast<double>(order.size());
    if (!std::isfinite(mean_loss))
      throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                         "; last stable epoch " + std::to_string(epoch - 1));
    result.curve.push_back(
        {epoch, mean_loss, static_cast<double>(correct) / static_cast<double>(order.size())});
  }

  spec.trained = true;
  result.spec = std::move(spec);
  return result;
}

double evaluate_accuracy(const NetworkSpec& spec, const std::vector<VideoSegment>& segments,
                         const ChipConfig& cfg, Backend backend, std::uint64_t seed,
                         const ChipPlans* plans) {
  if (segments.empty()) throw ArgumentError("empty evaluation set");
  ChipPlans local;
  if (backend == Backend::chip && !plans) {
    local = compile_network(spec, cfg);
    plans = &local;
  }
  const int n = static_cast<int>(segments.size());
  long correct = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : correct)
  for (int i = 0; i < n; ++i) {
    const Classification c = classify(spec, segments[i], cfg, backend, plans,
                                      derive_seed(seed, static_cast<std::uint64_t>(i)));
    if (c.label == segments[i].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

Mat confusion_matrix(const NetworkSpec& spec, const std::vector<VideoSegment>& segments,
                     const ChipConfig& cfg, Backend backend, std::uint64_t seed) {
  ChipPlans plans;
  const ChipPlans* p = nullptr;
  if (backend == Backend::chip) {
    plans = compile_network(spec, cfg);
    p = &plans;
  }
  Mat m(spec.n_classes, spec.n_classes);
  for (size_t i = 0; i < segments.size(); ++i) {
    const Classification c =
        classify(spec, segments[i], cfg, backend, p, derive_seed(seed, static_cast<std::uint64_t>(i)));
    m(segments[i].label, c.label) += 1.0;
  }
  return m;
}

std::vector<SweepPoint> noise_accuracy_sweep(const NetworkSpec& spec,
                                             const std::vector<VideoSegment>& testset,
                                             const ChipConfig& cfg, std::vector<double> sigmas,
                                             int trials_per_sigma, std::uint64_t seed) {
  if (trials_per_sigma < 1) throw ArgumentError("need at least one trial per sigma");
  for (size_t i = 1; i < sigmas.size(); ++i)
    if (sigmas[i] < sigmas[i - 1]) throw ArgumentError("sigma list must be sorted ascending");

  const ChipPlans plans = compile_network(spec, cfg);
  std::vector<SweepPoint> curve;
  curve.reserve(sigmas.size());
  for (size_t si = 0; si < sigmas.size(); ++si) {
    ChipConfig run_cfg = cfg;
    run_cfg.noise.sigma = sigmas[si];
    std::vector<double> accs(trials_per_sigma);
    for (int trial = 0; trial < trials_per_sigma; ++trial) {
      run_cfg.noise.seed = derive_seed(seed, si * 100003ULL + static_cast<std::uint64_t>(trial));
      accs[trial] = evaluate_accuracy(spec, testset, run_cfg, Backend::chip,
                                      run_cfg.noise.seed, &plans);
    }
    std::vector<double> sorted = accs;
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double q) {
      const double pos = q * (sorted.size() - 1);
      const size_t lo = static_cast<size_t>(pos);
      const size_t hi = std::min(lo + 1, sorted.size() - 1);
      const double f = pos - lo;
      return sorted[lo] + f * (sorted[hi] - sorted[lo]);
    };
    SweepPoint pt;
    pt.sigma = sigmas[si];
    // identical trials (always the case at sigma 0) keep the exact value
    const bool all_same =
        std::all_of(accs.begin(), accs.end(), [&](double a) { return a == accs.front(); });
    pt.mean_accuracy =
        all_same ? accs.front() : std::accumulate(accs.begin(), accs.end(), 0.0) / accs.size();
    pt.p5 = quantile(0.05);
    pt.p95 = quantile(0.95);
    curve.push_back(pt);
  }
  return curve;
}

}  // namespace ptfp
