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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ptfp/chip.hpp"
#include "ptfp/compiler.hpp"
#include "ptfp/io.hpp"
#include "ptfp/network.hpp"
#include "ptfp/oracle.hpp"
#include "ptfp/rng.hpp"

namespace fs = std::filesystem;
using namespace ptfp;

namespace {

constexpr const char* kToolVersion = "ptfp 1.0.0";

ChipConfig load_chip_or_default(const std::string& path) {
  if (path.empty()) return default_chip();
  return load_chip_json(path);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const CapacityError*>(&e)) return 4;
  if (dynamic_cast<const NumericError*>(&e) || dynamic_cast<const AlignmentError*>(&e) ||
      dynamic_cast<const SyncError*>(&e))
    return 5;
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const CalibrationError*>(&e)) return 3;
  if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const ArgumentError*>(&e) ||
      dynamic_cast<const ShapeError*>(&e) || dynamic_cast<const EncodingError*>(&e))
    return 2;
  return 1;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Runs a command body, always writing the manifest (with the error recorded
// on failure) next to the command outputs.
template <typename Fn>
int run_command(RunManifest m, const std::string& manifest_path, Fn&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  m.tool_version = kToolVersion;
  int code = 0;
  try {
    body(m);
  } catch (const std::exception& e) {
    m.error = e.what();
    code = exit_code_for(e);
    std::cerr << "error: " << e.what() << "\n";
  }
  m.duration_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (!manifest_path.empty()) {
    try {
      write_manifest(manifest_path, m);
    } catch (const std::exception& e) {
      std::cerr << "error writing manifest: " << e.what() << "\n";
      if (code == 0) code = 1;
    }
  }
  return code;
}

void write_confusion_csv(const std::string& path, const Mat& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open '" + path + "' for writing");
  f << "# rows=true label, cols=predicted label\n";
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      if (c) f << ",";
      f << static_cast<long>(m(r, c));
    }
    f << "\n";
  }
}

// --------------------------------------------------------------------------
// characterize
// --------------------------------------------------------------------------

int cmd_characterize(const std::string& chip_path, const std::string& out_dir, double sweep_step) {
  RunManifest m;
  m.command = "characterize";
  m.config_path = chip_path;
  fs::create_directories(out_dir);
  return run_command(std::move(m), out_dir + "/manifest.json", [&](RunManifest& man) {
    const ChipConfig cfg = load_chip_or_default(chip_path);
    if (!chip_path.empty()) man.inputs.push_back(chip_path);

    // WDM transmission spectra, one column per channel
    {
      const std::string path = out_dir + "/wdm_spectrum.csv";
      std::ofstream f(path, std::ios::binary);
      f << "# wavelength_nm";
      for (int ch = 0; ch < cfg.wdm.channel_count(); ++ch) f << ",ch" << ch;
      f << "\n";
      const double lo = cfg.wdm.channel_centers_nm.front() - cfg.wdm.fsr_nm / 2;
      const double hi = cfg.wdm.channel_centers_nm.back() + cfg.wdm.fsr_nm / 2;
      for (double lam = lo; lam <= hi + 1e-9; lam += 0.01) {
        f << fmt(lam);
        for (int ch = 0; ch < cfg.wdm.channel_count(); ++ch)
          f << "," << fmt(cfg.wdm.channel_transmission(ch, lam));
        f << "\n";
      }
      man.outputs.push_back(path);
    }

    // MRR transmission vs wavelength per voltage step (second ring, matching
    // the characterization convention)
    {
      const std::string path = out_dir + "/mrr_voltage_sweep.csv";
      std::ofstream f(path, std::ios::binary);
      const MRRModel& ring = cfg.rings.at(std::min(1, cfg.ring_count() - 1));
      f << "# wavelength_nm";
      for (double v = 0.0; v <= ring.max_voltage_mv + 1e-9; v += sweep_step)
        f << ",V" << static_cast<int>(v) << "mV";
      f << "\n";
      const double center = ring.resonance_nm(ring.max_voltage_mv / 2);
      for (double lam = center - 1.5; lam <= center + 1.5 + 1e-9; lam += 0.002) {
        f << fmt(lam);
        for (double v = 0.0; v <= ring.max_voltage_mv + 1e-9; v += sweep_step)
          f << "," << fmt(ring.transmission(lam, v));
        f << "\n";
      }
      man.outputs.push_back(path);
    }

    // weight-voltage LUT of every ring
    for (int w = 0; w < cfg.d_w; ++w)
      for (int t = 0; t < cfg.d_t; ++t)
        for (int s = 0; s < cfg.d_s; ++s) {
          const std::string path = out_dir + "/lut_w" + std::to_string(w) + "_t" +
                                   std::to_string(t) + "_s" + std::to_string(s) + ".csv";
          write_lut_csv(path, cfg.lut(w, t, s));
          man.outputs.push_back(path);
        }
    std::cout << "wrote " << man.outputs.size() << " characterization files to " << out_dir
              << "\n";
  });
}

// --------------------------------------------------------------------------
// convolve
// --------------------------------------------------------------------------

int cmd_convolve(const std::string& image_path, const std::string& kernel_spec,
                 const std::string& chip_path, double sigma, std::uint64_t seed,
                 const std::string& out_path) {
  RunManifest m;
  m.command = "convolve";
  m.config_path = chip_path;
  m.seed = seed;
  m.inputs = {image_path};
  return run_command(std::move(m), out_path + ".manifest.json", [&](RunManifest& man) {
    ChipConfig cfg = load_chip_or_default(chip_path);
    cfg.noise.sigma = sigma;
    cfg.noise.seed = seed;
    const DataTensor img = read_pgm(image_path);
    const KernelTensor k = load_kernel(kernel_spec);
    const ExecutionPlan plan = compile_kernel(k, cfg);
    const DataTensor out = execute_plan(plan, img, cfg);
    const auto [offset, scale] = write_pgm_rescaled(out_path, out);
    man.outputs.push_back(out_path);
    man.extra.emplace_back("pgm_offset", offset);
    man.extra.emplace_back("pgm_scale", scale);
    std::cout << "convolved " << img.cols() << "x" << img.rows() << " -> " << out.cols() << "x"
              << out.rows() << " with " << plan.calls.size() << " chip call(s)\n";
  });
}

// --------------------------------------------------------------------------
// memreport
// --------------------------------------------------------------------------

std::vector<int> parse_dims(const std::string& s) {
  std::vector<int> dims;
  std::string cur;
  for (char c : s) {
    if (c == 'x' || c == 'X') {
      dims.push_back(std::stoi(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) dims.push_back(std::stoi(cur));
  return dims;
}

int cmd_memreport(const std::string& input_shape, const std::string& kernel_shape) {
  RunManifest m;
  m.command = "memreport";
  return run_command(std::move(m), "", [&](RunManifest&) {
    const auto in = parse_dims(input_shape);   // RxC or RxCxCin
    const auto ks = parse_dims(kernel_shape);  // RxC[xCin[xCout]]
    if (in.size() < 2 || in.size() > 3 || ks.size() < 2 || ks.size() > 4)
      throw UsageError("shapes: input RxC[xCin], kernel RxC[xCin[xCout]]");
    const int cin = in.size() == 3 ? in[2] : 1;
    const int kcin = ks.size() >= 3 ? ks[2] : cin;
    const int kcout = ks.size() == 4 ? ks[3] : 1;
    if (kcin != cin) throw UsageError("kernel input channels must match the tensor");

    DataTensor x({in[0], in[1]}, cin);
    // deterministic fill so the embedded GeMM self-check is meaningful
    SplitMix rng(1);
    for (double& v : x.raw()) v = rng.next_double();
    KernelTensor k({ks[0], ks[1]}, kcin, kcout);
    for (double& v : k.raw()) v = rng.uniform(-1, 1);

    const MemoryReport rep = im2col_accounting(x, k);
    std::printf("input tensor        [%dx%d, %d]  %ld elements\n", in[0], in[1], cin,
                rep.input_elements);
    std::printf("im2col matrix       [%ld, %ldx%d]  %ld elements\n",
                static_cast<long>(in[0]) * in[1], rep.duplication_factor, cin,
                rep.im2col_elements);
    std::printf("duplication factor  %ld\n", rep.duplication_factor);
    std::printf("flow equivalent     %d symbol delay stage(s) per output port (%d total for %d port(s))\n",
                rep.delay_stages_per_port, rep.delay_stages_per_port * kcout, kcout);
  });
}

// --------------------------------------------------------------------------
// plan
// --------------------------------------------------------------------------

int cmd_plan(const std::string& kernel_spec, const std::string& chip_path,
             const std::string& out_path, bool describe) {
  RunManifest m;
  m.command = "plan";
  m.config_path = chip_path;
  return run_command(std::move(m), out_path.empty() ? "" : out_path + ".manifest.json",
                     [&](RunManifest& man) {
                       const ChipConfig cfg = load_chip_or_default(chip_path);
                       const KernelTensor k = load_kernel(kernel_spec);
                       const ExecutionPlan plan = compile_kernel(k, cfg);
                       if (describe || out_path.empty()) std::cout << describe_plan(plan);
                       if (!out_path.empty()) {
                         write_text_file(out_path, plan_to_json_text(plan));
                         man.outputs.push_back(out_path);
                       }
                     });
}

// --------------------------------------------------------------------------
// train / eval / sweep
// --------------------------------------------------------------------------

int cmd_train(const std::string& out_path, std::uint64_t seed, int epochs, double lr,
              double noise_aug, const std::string& curve_path) {
  RunManifest m;
  m.command = "train";
  m.seed = seed;
  return run_command(std::move(m), out_path + ".manifest.json", [&](RunManifest& man) {
    const DatasetSplit data = canonical_dataset(seed);
    TrainHyperparams hp;
    hp.seed = seed;
    hp.epochs = epochs;
    hp.learning_rate = lr;
    hp.feature_noise_std = noise_aug;
    const TrainResult r = train(data.train, hp);
    save_checkpoint(out_path, r.spec);
    man.outputs.push_back(out_path);
    if (!curve_path.empty()) {
      std::ofstream f(curve_path, std::ios::binary);
      f << "# epoch,loss,train_accuracy\n";
      for (const auto& p : r.curve)
        f << p.epoch << "," << fmt(p.loss) << "," << fmt(p.train_accuracy) << "\n";
      man.outputs.push_back(curve_path);
    }
    const ChipConfig cfg = default_chip();
    const double acc = evaluate_accuracy(r.spec, data.test, cfg, Backend::digital);
    std::printf("trained %d epochs; final loss %.4f; held-out accuracy %.1f%%\n", epochs,
                r.curve.back().loss, 100.0 * acc);
  });
}

int cmd_eval(const std::string& ckpt, const std::string& chip_path, const std::string& backend,
             int segments, double sigma, std::uint64_t seed, const std::string& out_path) {
  RunManifest m;
  m.command = "eval";
  m.config_path = chip_path;
  m.seed = seed;
  m.inputs = {ckpt};
  return run_command(
      std::move(m), out_path.empty() ? "" : out_path + ".manifest.json", [&](RunManifest& man) {
        if (!fs::exists(ckpt))
          throw UsageError("checkpoint '" + ckpt + "' not found; run `ptfp train` first");
        const NetworkSpec spec = load_checkpoint(ckpt);
        ChipConfig cfg = load_chip_or_default(chip_path);
        cfg.noise.sigma = sigma;
        cfg.noise.seed = seed;
        const Backend be = backend == "chip" ? Backend::chip : Backend::digital;
        const DatasetSplit data = canonical_dataset(spec.seed);
        const auto eval_set = sample_segments(data.test, segments, seed);

        const Mat cm = confusion_matrix(spec, eval_set, cfg, be, seed);
        long correct = 0;
        for (int c = 0; c < cm.rows; ++c) correct += static_cast<long>(cm(c, c));
        std::printf("accuracy %ld/%zu = %.1f%% (%s backend, sigma=%g)\n", correct,
                    eval_set.size(), 100.0 * correct / eval_set.size(), backend.c_str(), sigma);
        if (!out_path.empty()) {
          write_confusion_csv(out_path, cm);
          man.outputs.push_back(out_path);
        }
      });
}

int cmd_sweep(const std::string& ckpt, const std::string& chip_path, std::vector<double> sigmas,
              int trials, int segments, std::uint64_t seed, const std::string& out_path) {
  RunManifest m;
  m.command = "sweep";
  m.config_path = chip_path;
  m.seed = seed;
  m.inputs = {ckpt};
  return run_command(std::move(m), out_path + ".manifest.json", [&](RunManifest& man) {
    if (!fs::exists(ckpt))
      throw UsageError("checkpoint '" + ckpt + "' not found; run `ptfp train` first");
    const NetworkSpec spec = load_checkpoint(ckpt);
    const ChipConfig cfg = load_chip_or_default(chip_path);
    const DatasetSplit data = canonical_dataset(spec.seed);
    const auto eval_set = sample_segments(data.test, segments, seed);
    std::sort(sigmas.begin(), sigmas.end());
    const auto curve = noise_accuracy_sweep(spec, eval_set, cfg, sigmas, trials, seed);
    std::ofstream f(out_path, std::ios::binary);
    f << "# sigma,mean_accuracy,p5,p95\n";
    for (const auto& p : curve) {
      f << fmt(p.sigma) << "," << fmt(p.mean_accuracy) << "," << fmt(p.p5) << "," << fmt(p.p95)
        << "\n";
      std::printf("sigma %-6g mean %.4f  [%.4f, %.4f]\n", p.sigma, p.mean_accuracy, p.p5, p.p95);
    }
    man.outputs.push_back(out_path);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ptfp: photonic tensor-flow processor simulator and kernel compiler"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  auto* c_char = app.add_subcommand("characterize", "dump WDM/MRR spectra and weight LUTs");
  std::string chip_path, out_dir = "characterization";
  double sweep_step = 200.0;
  c_char->add_option("--chip", chip_path, "chip description JSON (default: built-in chip)");
  c_char->add_option("--out-dir", out_dir, "output directory");
  c_char->add_option("--sweep-step-mv", sweep_step, "voltage step for the spectrum sweep");

  auto* c_conv = app.add_subcommand("convolve", "run one kernel over a PGM image on the chip");
  std::string image_path, kernel_spec = "sobel-h", conv_chip, conv_out = "convolved.pgm";
  double sigma = 0.0;
  std::uint64_t seed = 0;
  c_conv->add_option("--image", image_path, "input PGM (P5) image")->required();
  c_conv->add_option("--kernel", kernel_spec,
                     "kernel name (" + named_kernel_list() + ") or JSON file");
  c_conv->add_option("--chip", conv_chip, "chip description JSON");
  c_conv->add_option("--sigma", sigma, "additive Gaussian noise std");
  c_conv->add_option("--seed", seed, "noise seed");
  c_conv->add_option("--out", conv_out, "output PGM path");

  auto* c_mem = app.add_subcommand("memreport", "GeMM im2col memory vs flow-approach report");
  std::string in_shape, k_shape;
  c_mem->add_option("--input-shape", in_shape, "input tensor RxC or RxCxCin")->required();
  c_mem->add_option("--kernel-shape", k_shape, "kernel RxC[xCin[xCout]]")->required();

  auto* c_plan = app.add_subcommand("plan", "compile a kernel and inspect the chip call table");
  std::string plan_kernel = "sobel-h", plan_chip, plan_out;
  bool describe = false;
  c_plan->add_option("--kernel", plan_kernel, "kernel name or JSON file");
  c_plan->add_option("--chip", plan_chip, "chip description JSON");
  c_plan->add_option("--out", plan_out, "write the plan as JSON");
  c_plan->add_flag("--describe", describe, "print the call table");

  auto* c_train = app.add_subcommand("train", "train the action-recognition network (digital)");
  std::string ckpt_out = "checkpoint.bin", curve_out;
  std::uint64_t train_seed = 7;
  int epochs = 20;
  double lr = 0.02, noise_aug = 0.12;
  c_train->add_option("--out", ckpt_out, "checkpoint output path");
  c_train->add_option("--seed", train_seed, "master seed (dataset + init + shuffle)");
  c_train->add_option("--epochs", epochs, "training epochs");
  c_train->add_option("--lr", lr, "learning rate");
  c_train->add_option("--noise-aug", noise_aug, "emulated chip sigma during training");
  c_train->add_option("--curve", curve_out, "training curve CSV path");

  auto* c_eval = app.add_subcommand("eval", "evaluate a checkpoint on held-out segments");
  std::string eval_ckpt = "checkpoint.bin", eval_chip, eval_backend = "chip", eval_out;
  int eval_segments = 96;
  double eval_sigma = 0.0;
  std::uint64_t eval_seed = 1;
  c_eval->add_option("--ckpt", eval_ckpt, "checkpoint path");
  c_eval->add_option("--chip", eval_chip, "chip description JSON");
  c_eval->add_option("--backend", eval_backend, "chip | digital")
      ->check(CLI::IsMember({"chip", "digital"}));
  c_eval->add_option("--segments", eval_segments, "number of held-out segments");
  c_eval->add_option("--sigma", eval_sigma, "additive Gaussian noise std");
  c_eval->add_option("--seed", eval_seed, "evaluation seed");
  c_eval->add_option("--out", eval_out, "confusion matrix CSV path");

  auto* c_sweep = app.add_subcommand("sweep", "noise-accuracy sweep on the chip backend");
  std::string sweep_ckpt = "checkpoint.bin", sweep_chip, sweep_out = "sweep.csv";
  std::vector<double> sweep_sigmas = {0.0, 0.05, 0.1, 0.2, 0.3, 0.5};
  int trials = 20, sweep_segments = 96;
  std::uint64_t sweep_seed = 1;
  c_sweep->add_option("--ckpt", sweep_ckpt, "checkpoint path");
  c_sweep->add_option("--chip", sweep_chip, "chip description JSON");
  c_sweep->add_option("--sigmas", sweep_sigmas, "noise levels (ascending)")->delimiter(',');
  c_sweep->add_option("--trials", trials, "independent trials per sigma");
  c_sweep->add_option("--segments", sweep_segments, "segments per trial");
  c_sweep->add_option("--seed", sweep_seed, "sweep seed");
  c_sweep->add_option("--out", sweep_out, "sweep CSV path");

  CLI11_PARSE(app, argc, argv);

  if (c_char->parsed()) return cmd_characterize(chip_path, out_dir, sweep_step);
  if (c_conv->parsed())
    return cmd_convolve(image_path, kernel_spec, conv_chip, sigma, seed, conv_out);
  if (c_mem->parsed()) return cmd_memreport(in_shape, k_shape);
  if (c_plan->parsed()) return cmd_plan(plan_kernel, plan_chip, plan_out, describe);
  if (c_train->parsed()) return cmd_train(ckpt_out, train_seed, epochs, lr, noise_aug, curve_out);
  if (c_eval->parsed())
    return cmd_eval(eval_ckpt, eval_chip, eval_backend, eval_segments, eval_sigma, eval_seed,
                    eval_out);
  if (c_sweep->parsed())
    return cmd_sweep(sweep_ckpt, sweep_chip, sweep_sigmas, trials, sweep_segments, sweep_seed,
                     sweep_out);
  return 0;
}
