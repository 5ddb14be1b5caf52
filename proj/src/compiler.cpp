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

#include "ptfp/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "ptfp/rng.hpp"
#include "ptfp/waveform.hpp"

namespace ptfp {

std::pair<KernelTensor, KernelTensor> split_signs(const KernelTensor& k) {
  KernelTensor plus(k.kshape(), k.in_channels(), k.out_channels());
  KernelTensor minus(k.kshape(), k.in_channels(), k.out_channels());
  for (size_t i = 0; i < k.raw().size(); ++i) {
    const double v = k.raw()[i];
    plus.raw()[i] = v > 0.0 ? v : 0.0;
    minus.raw()[i] = v < 0.0 ? -v : 0.0;
  }
  return {std::move(plus), std::move(minus)};
}

std::pair<KernelTensor, double> normalize_weights(const KernelTensor& k) {
  k.validate_finite();
  const double scale = k.max_abs();
  KernelTensor unit = k;
  if (scale > 0.0)
    for (double& v : unit.raw()) v /= scale;
  return {std::move(unit), scale};
}

namespace {

struct Block {
  int out_channel;
  SignLabel sign;
  int in_channel;   // wavelength-parallel: first channel of the group
  int group_size;   // rows in the group (row-shift) or channels (1-D)
  int row0;         // first kernel row of the group (row-shift; 0 for 1-D)
  int col0;         // first kernel column of the tap segment
  int taps;         // segment width
  double scale;     // per (sign, out channel)
};

// The decomposition rule shared by compile_kernel: one chip call per
// (output channel, sign pass, input channel [or channel group], row group,
// tap segment) whose weights are not entirely zero.
template <typename Fn>
void enumerate_blocks(const KernelTensor& k, const ChipConfig& cfg, const CompileOptions& opt,
                      Fn&& emit) {
  k.validate_finite();
  const int kcols = k.kcols();
  const int krows = k.krows();
  if (kcols > cfg.d_t && !opt.allow_tap_tiling)
    throw CapacityError("kernel width " + std::to_string(kcols) + " exceeds the chip's d_t = " +
                            std::to_string(cfg.d_t) + " taps and tap tiling is disabled; need d_t >= " +
                            std::to_string(kcols),
                        kcols);
  const int n_segments = (kcols + cfg.d_t - 1) / cfg.d_t;
  const bool one_d = k.is_1d();

  const auto [plus, minus] = split_signs(k);
  for (int o = 0; o < k.out_channels(); ++o) {
    for (int pass = 0; pass < 2; ++pass) {
      const KernelTensor& part = pass == 0 ? plus : minus;
      // one normalization scale per (sign pass, output channel)
      double scale = 0.0;
      for (int i = 0; i < k.in_channels(); ++i)
        for (int r = 0; r < krows; ++r)
          for (int c = 0; c < kcols; ++c) scale = std::max(scale, part.at(o, i, r, c));
      if (scale == 0.0) continue;  // pass not needed for this output channel

      const auto segment_loop = [&](int in_channel, int group_size, int row0, int group_rows) {
        for (int seg = 0; seg < n_segments; ++seg) {
          const int col0 = seg * cfg.d_t;
          const int taps = std::min(cfg.d_t, kcols - col0);
          bool nonzero = false;
          for (int g = 0; g < (one_d ? group_size : group_rows) && !nonzero; ++g)
            for (int c = col0; c < col0 + taps && !nonzero; ++c) {
              const double v = one_d ? part.at(o, in_channel + g, 0, c)
                                     : part.at(o, in_channel, row0 + g, c);
              nonzero = v != 0.0;
            }
          if (!nonzero) continue;
          emit(Block{o, pass == 0 ? SignLabel::plus : SignLabel::minus, in_channel,
                     one_d ? group_size : group_rows, row0, col0, taps, scale},
               part);
        }
      };

      if (one_d) {
        for (int base = 0; base < k.in_channels(); base += cfg.d_w)
          segment_loop(base, std::min(cfg.d_w, k.in_channels() - base), 0, 1);
      } else {
        for (int i = 0; i < k.in_channels(); ++i)
          for (int row0 = 0; row0 < krows; row0 += cfg.d_w)
            segment_loop(i, 1, row0, std::min(cfg.d_w, krows - row0));
      }
    }
  }
}

}  // namespace

ExecutionPlan compile_kernel(const KernelTensor& k, const ChipConfig& cfg,
                             const CompileOptions& opt) {
  if (!cfg.calibrated())
    throw CalibrationError("chip has no calibration LUTs; call calibrate() before compiling");

  ExecutionPlan plan;
  plan.kshape = k.kshape();
  plan.in_channels = k.in_channels();
  plan.out_channels = k.out_channels();

  // voltages realizing "as dark as possible" on every ring; rings on active
  // wavelengths are overwritten per call
  std::vector<double> dark(cfg.ring_count());
  for (int idx = 0; idx < cfg.ring_count(); ++idx)
    dark[idx] = cfg.luts()[idx].voltage_for_weight(cfg.luts()[idx].min_weight());

  enumerate_blocks(k, cfg, opt, [&](const Block& b, const KernelTensor& part) {
    ChipCall call;
    call.sign = b.sign;
    call.scale = b.scale;
    call.out_channel = b.out_channel;
    call.taps = b.taps;
    call.col_offset = b.col0;
    call.guard_len = b.taps - 1;
    call.voltages_mv = dark;
    call.routing.assign(cfg.d_w, WavelengthRoute{});
    call.unit_weights.assign(static_cast<size_t>(cfg.d_w) * cfg.d_t, 0.0);

    const bool one_d = part.is_1d();
    for (int g = 0; g < b.group_size; ++g) {
      call.routing[g].channel = one_d ? b.in_channel + g : b.in_channel;
      call.routing[g].row_shift = one_d ? 0 : b.row0 + g;
      for (int t = 0; t < b.taps; ++t) {
        // delay-line FIR computes y[n] = sum_t w_t x[n-t]; reversing the tap
        // order realizes the cross-correlation convention
        const int kc = b.col0 + (b.taps - 1 - t);
        const double w = one_d ? part.at(b.out_channel, b.in_channel + g, 0, kc)
                               : part.at(b.out_channel, b.in_channel, b.row0 + g, kc);
        const double unit = w / b.scale;
        call.unit_weights[static_cast<size_t>(g) * cfg.d_t + t] = unit;
        const int ring = cfg.ring_index(g, t, 0);
        call.voltages_mv[ring] = cfg.luts()[ring].voltage_for_weight(unit);
      }
      // taps beyond the segment on an active wavelength must be exactly dark;
      // voltage_for_weight throws if this chip cannot reach weight 0
      for (int t = b.taps; t < cfg.d_t; ++t) {
        const int ring = cfg.ring_index(g, t, 0);
        call.voltages_mv[ring] = cfg.luts()[ring].voltage_for_weight(0.0);
      }
    }
    plan.calls.push_back(std::move(call));
  });
  return plan;
}

long expected_call_count(const KernelTensor& k, const ChipConfig& cfg, const CompileOptions& opt) {
  // Independent restatement of the counting rule: sign passes x input
  // channels (or channel groups of d_w when the kernel is 1-D) x row groups
  // of d_w x tap segments of d_t, counting only blocks with any nonzero
  // weight.
  const int kcols = k.kcols(), krows = k.krows();
  if (kcols > cfg.d_t && !opt.allow_tap_tiling)
    throw CapacityError("kernel wider than d_t with tap tiling disabled", kcols);
  const int n_segments = (kcols + cfg.d_t - 1) / cfg.d_t;
  const auto [plus, minus] = split_signs(k);
  long count = 0;
  for (int o = 0; o < k.out_channels(); ++o)
    for (const KernelTensor* part : {&plus, &minus}) {
      bool pass_used = false;
      for (int i = 0; i < k.in_channels() && !pass_used; ++i)
        for (int r = 0; r < krows && !pass_used; ++r)
          for (int c = 0; c < kcols && !pass_used; ++c) pass_used = part->at(o, i, r, c) != 0.0;
      if (!pass_used) continue;
      if (k.is_1d()) {
        for (int base = 0; base < k.in_channels(); base += cfg.d_w)
          for (int seg = 0; seg < n_segments; ++seg) {
            bool nz = false;
            for (int g = base; g < std::min(k.in_channels(), base + cfg.d_w) && !nz; ++g)
              for (int c = seg * cfg.d_t; c < std::min(kcols, (seg + 1) * cfg.d_t) && !nz; ++c)
                nz = part->at(o, g, 0, c) != 0.0;
            if (nz) ++count;
          }
      } else {
        for (int i = 0; i < k.in_channels(); ++i)
          for (int row0 = 0; row0 < krows; row0 += cfg.d_w)
            for (int seg = 0; seg < n_segments; ++seg) {
              bool nz = false;
              for (int r = row0; r < std::min(krows, row0 + cfg.d_w) && !nz; ++r)
                for (int c = seg * cfg.d_t; c < std::min(kcols, (seg + 1) * cfg.d_t) && !nz; ++c)
                  nz = part->at(o, i, r, c) != 0.0;
              if (nz) ++count;
            }
      }
    }
  return count;
}

ExecutionPlan plan_row_shift_2d(const KernelTensor& k2d, const ChipConfig& cfg) {
  if (k2d.in_channels() != 1 || k2d.out_channels() != 1 || k2d.krows() != 3 || k2d.kcols() != 3)
    throw ShapeError("plan_row_shift_2d expects a 3x3 single-in single-out kernel");
  return compile_kernel(k2d, cfg);
}

DataTensor execute_plan(const ExecutionPlan& plan, const DataTensor& x, const ChipConfig& cfg,
                        std::optional<std::uint64_t> noise_seed) {
  if (x.channels() != plan.in_channels)
    throw ShapeError("plan expects " + std::to_string(plan.in_channels) + " input channels, got " +
                     std::to_string(x.channels()));
  if (x.rows() < plan.kshape.rows || x.cols() < plan.kshape.cols)
    throw ShapeError("input smaller than the planned kernel");
  for (double v : x.raw())
    if (!std::isfinite(v) || v < 0.0 || v > 1.0 + 1e-12)
      throw EncodingError("plan inputs must be normalized intensities in [0, 1]");

  const TensorShape out_shape = plan.valid_output_shape(x.shape());
  DataTensor out(out_shape, plan.out_channels);
  const int rows_enc = out_shape.rows;  // rows carried per wavelength
  const int n_calls = static_cast<int>(plan.calls.size());

  std::vector<std::vector<double>> partials(n_calls);

#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < n_calls; ++c) {
    const ChipCall& call = plan.calls[c];
    std::vector<Waveform> inputs;
    inputs.reserve(cfg.d_w);
    const int n_symbols = rows_enc * x.cols() + call.guard_len * (rows_enc - 1);
    for (int w = 0; w < cfg.d_w; ++w) {
      const WavelengthRoute& route = call.routing[w];
      if (route.channel < 0) {
        inputs.push_back(Waveform::zeros(n_symbols, cfg.symbol_period_s(), cfg.oversampling));
      } else {
        inputs.push_back(encode_channel(x, route.channel, call.guard_len, cfg.symbol_period_s(),
                                        cfg.oversampling, route.row_shift, rows_enc));
      }
    }
    ForwardOptions opt;
    opt.voltages_mv = call.voltages_mv;
    opt.noise_seed =
        derive_seed(noise_seed.value_or(cfg.noise.seed), static_cast<std::uint64_t>(c));
    const ChipOutput res = chip_forward(cfg, inputs, opt);
    partials[c] =
        decode_channel(res.ports[0], {rows_enc, x.cols()}, call.guard_len, call.taps);
  }

  // ordered reduction: deterministic regardless of call scheduling
  for (int c = 0; c < n_calls; ++c) {
    const ChipCall& call = plan.calls[c];
    const double factor = (call.sign == SignLabel::minus ? -1.0 : 1.0) * call.scale;
    const int partial_cols = x.cols() - call.taps + 1;
    for (int r = 0; r < out_shape.rows; ++r)
      for (int col = 0; col < out_shape.cols; ++col)
        out.at(call.out_channel, r, col) +=
            factor * partials[c][static_cast<size_t>(r) * partial_cols + col + call.col_offset];
  }
  return out;
}

KernelTensor reconstruct_kernel(const ExecutionPlan& plan) {
  KernelTensor k(plan.kshape, plan.in_channels, plan.out_channels);
  for (const ChipCall& call : plan.calls) {
    const int d_w = static_cast<int>(call.routing.size());
    const int d_t = d_w > 0 ? static_cast<int>(call.unit_weights.size()) / d_w : 0;
    const double factor = (call.sign == SignLabel::minus ? -1.0 : 1.0) * call.scale;
    for (int w = 0; w < d_w; ++w) {
      const WavelengthRoute& route = call.routing[w];
      if (route.channel < 0) continue;
      const int krow = route.row_shift;  // kernel row carried by this wavelength
      for (int t = 0; t < call.taps; ++t) {
        const int kcol = call.col_offset + (call.taps - 1 - t);
        k.at(call.out_channel, route.channel, krow, kcol) +=
            factor * call.unit_weights[static_cast<size_t>(w) * d_t + t];
      }
    }
  }
  return k;
}

std::string describe_plan(const ExecutionPlan& plan) {
  std::string s;
  char line[256];
  std::snprintf(line, sizeof line, "kernel [%dx%d, %d, %d], %zu chip call(s)\n", plan.kshape.rows,
                plan.kshape.cols, plan.in_channels, plan.out_channels, plan.calls.size());
  s += line;
  s += "call  sign  out_ch  taps  col_off  scale        routing (wavelength<-channel+rowshift)\n";
  for (size_t c = 0; c < plan.calls.size(); ++c) {
    const ChipCall& call = plan.calls[c];
    std::string routes;
    for (size_t w = 0; w < call.routing.size(); ++w) {
      if (call.routing[w].channel < 0) continue;
      char r[48];
      std::snprintf(r, sizeof r, "%zu<-%d+%d ", w, call.routing[w].channel,
                    call.routing[w].row_shift);
      routes += r;
    }
    std::snprintf(line, sizeof line, "%-5zu %-5s %-7d %-5d %-8d %-12.6g %s\n", c,
                  call.sign == SignLabel::plus ? "+" : "-", call.out_channel, call.taps,
                  call.col_offset, call.scale, routes.c_str());
    s += line;
  }
  return s;
}

}  // namespace ptfp
