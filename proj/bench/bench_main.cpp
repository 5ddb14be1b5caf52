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

// Benchmark: serial reference pipeline vs the OpenMP per-sample kernel, for
// the raw chip forward pass and for full plan execution.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ptfp/chip.hpp"
#include "ptfp/compiler.hpp"
#include "ptfp/oracle.hpp"
#include "ptfp/rng.hpp"

using namespace ptfp;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ChipConfig bench_chip(int d_w, int d_t, int d_s) {
  ChipConfig cfg;
  cfg.d_w = d_w;
  cfg.d_t = d_t;
  cfg.d_s = d_s;
  cfg.operating_wavelengths_nm.resize(d_w);
  cfg.wdm.channel_centers_nm.resize(d_w);
  for (int w = 0; w < d_w; ++w) {
    cfg.operating_wavelengths_nm[w] = 1550.8 + 2.0 * w;
    cfg.wdm.channel_centers_nm[w] = 1550.8 + 2.0 * w;
  }
  cfg.wdm.fsr_nm = 2.0 * d_w;
  for (int idx = 0; idx < cfg.ring_count(); ++idx) {
    MRRModel m;
    m.base_resonance_nm = cfg.operating_wavelengths_nm[idx / (d_t * d_s)] - 0.5;
    cfg.rings.push_back(m);
  }
  cfg.calibrate();
  return cfg;
}

struct Timing {
  double serial_s;
  double parallel_s;
  double checksum;
};

Timing bench_forward(const ChipConfig& cfg, int n_symbols, int reps) {
  SplitMix rng(1);
  std::vector<double> weights(cfg.ring_count());
  for (double& w : weights) w = rng.next_double();
  std::vector<double> volts(cfg.ring_count());
  for (int i = 0; i < cfg.ring_count(); ++i) volts[i] = cfg.luts()[i].voltage_for_weight(weights[i]);
  std::vector<Waveform> ins;
  for (int w = 0; w < cfg.d_w; ++w) {
    Waveform x = Waveform::zeros(n_symbols, cfg.symbol_period_s());
    for (double& v : x.samples()) v = rng.next_double();
    ins.push_back(std::move(x));
  }
  ForwardOptions opt;
  opt.voltages_mv = volts;

  Timing t{};
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) {
    const ChipOutput out = chip_forward_serial(cfg, ins, opt);
    t.checksum += out.ports[0].samples()[n_symbols / 2];
  }
  t.serial_s = seconds_since(t0) / reps;

  t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) {
    const ChipOutput out = chip_forward(cfg, ins, opt);
    t.checksum -= out.ports[0].samples()[n_symbols / 2];
  }
  t.parallel_s = seconds_since(t0) / reps;
  return t;
}

void report(const char* name, double macs, const Timing& t) {
  std::printf("%-28s serial %8.3f ms  parallel %8.3f ms  speedup %5.2fx  %7.2f MMAC/s\n", name,
              1e3 * t.serial_s, 1e3 * t.parallel_s, t.serial_s / t.parallel_s,
              macs / t.parallel_s / 1e6);
  if (std::fabs(t.checksum) > 1e-6)
    std::printf("  WARNING: serial/parallel checksum drift %.3g\n", t.checksum);
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
#ifdef _OPENMP
  std::printf("OpenMP enabled, %d thread(s)\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled (serial build)\n");
#endif

  const int reps = quick ? 3 : 20;
  {
    const ChipConfig cfg = bench_chip(4, 3, 1);
    const int n = quick ? 20000 : 200000;
    const Timing t = bench_forward(cfg, n, reps);
    report("forward [4,3,1]", static_cast<double>(n) * 12, t);
  }
  {
    const ChipConfig cfg = bench_chip(8, 5, 4);
    const int n = quick ? 10000 : 100000;
    const Timing t = bench_forward(cfg, n, reps);
    report("forward [8,5,4]", static_cast<double>(n) * 8 * 5 * 4, t);
  }
  {
    // full plan execution: 3x3 multi-channel kernel over an image
    const ChipConfig cfg = bench_chip(4, 3, 1);
    SplitMix rng(2);
    const int side = quick ? 48 : 96;
    DataTensor img({side, side}, 4);
    for (double& v : img.raw()) v = rng.next_double();
    KernelTensor k({3, 3}, 4, 8);
    for (double& v : k.raw()) v = rng.uniform(-1.0, 1.0);
    const ExecutionPlan plan = compile_kernel(k, cfg);

    const auto t0 = std::chrono::steady_clock::now();
    const DataTensor out = execute_plan(plan, img, cfg);
    const double secs = seconds_since(t0);
    const double macs = static_cast<double>(out.rows()) * out.cols() * 9 * 4 * 8;
    std::printf("%-28s %zu calls in %8.3f ms  %7.2f MMAC/s (checksum %.4f)\n", "execute_plan 3x3x4x8",
                plan.calls.size(), 1e3 * secs, macs / secs / 1e6, out.at(0, 0, 0));
  }
  return 0;
}
