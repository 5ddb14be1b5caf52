#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "ptfp/io.hpp"
#include "ptfp/network.hpp"
#include "ptfp/oracle.hpp"
#include "ptfp/rng.hpp"

using namespace ptfp;

namespace {

const ChipConfig& shared_chip() {
  static const ChipConfig cfg = default_chip();
  return cfg;
}

}  // namespace

TEST_CASE("synthetic dataset is seeded, balanced and in range") {
  const auto a = synth_dataset(25, 42);
  const auto b = synth_dataset(25, 42);
  REQUIRE(a.size() == 25);
  int per_class[5] = {0, 0, 0, 0, 0};
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].label == b[i].label);
    per_class[a[i].label]++;
    REQUIRE(a[i].frames.size() == 5);
    for (size_t f = 0; f < 5; ++f) {
      CHECK(a[i].frames[f].raw() == b[i].frames[f].raw());
      double lo = 1.0, hi = 0.0;
      for (double v : a[i].frames[f].raw()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      CHECK(hi > lo);  // frames are not constant
    }
  }
  for (int c = 0; c < 5; ++c) CHECK(per_class[c] == 5);
}

TEST_CASE("conv_layer_forward digital on a zero frame is zero pre-bias") {
  NetworkSpec spec = NetworkSpec::make(1);
  const DataTensor zero({24, 24}, 1);
  const DataTensor y = conv_layer_forward(spec.conv1, std::vector<double>(4, 0.0), zero,
                                          shared_chip(), Backend::digital);
  for (double v : y.raw()) CHECK(v == 0.0);
}

TEST_CASE("conv_layer_forward chip matches digital at sigma 0") {
  NetworkSpec spec = NetworkSpec::make(2);
  SplitMix rng(3);
  DataTensor frame({24, 24}, 1);
  for (double& v : frame.raw()) v = rng.next_double();
  const DataTensor dig =
      conv_layer_forward(spec.conv1, spec.bias1, frame, shared_chip(), Backend::digital);
  const DataTensor chip =
      conv_layer_forward(spec.conv1, spec.bias1, frame, shared_chip(), Backend::chip);
  REQUIRE(chip.raw().size() == dig.raw().size());
  for (size_t i = 0; i < chip.raw().size(); ++i)
    CHECK(std::fabs(chip.raw()[i] - dig.raw()[i]) <= 1e-9 * std::max(1.0, std::fabs(dig.raw()[i])));
}

TEST_CASE("conv_layer_forward chip noise scales with the plan") {
  NetworkSpec spec = NetworkSpec::make(2);
  SplitMix rng(4);
  DataTensor frame({24, 24}, 1);
  for (double& v : frame.raw()) v = rng.next_double();
  ChipConfig noisy = default_chip();
  noisy.noise.sigma = 0.1;
  const DataTensor clean =
      conv_layer_forward(spec.conv1, spec.bias1, frame, shared_chip(), Backend::digital);

  // linear pre-activation residual: bias/ReLU would clip the comparison
  const std::vector<double> zero_bias(4, 0.0);
  const DataTensor clean_lin =
      conv_layer_forward(spec.conv1, zero_bias, frame, shared_chip(), Backend::digital);
  double var = 0.0;
  long count = 0;
  const int trials = 40;
  for (int trial = 0; trial < trials; ++trial) {
    const DataTensor out = conv_layer_forward(spec.conv1, zero_bias, frame, noisy, Backend::chip,
                                              nullptr, derive_seed(1000, trial));
    for (size_t i = 0; i < out.raw().size(); ++i) {
      // ReLU clips negatives; only use samples far enough above zero
      if (clean_lin.raw()[i] > 0.5) {
        const double d = out.raw()[i] - clean_lin.raw()[i];
        var += d * d;
        ++count;
      }
    }
  }
  REQUIRE(count > 100);
  const double sd = std::sqrt(var / count);
  // plus and minus passes add d_t photodetector draws each, scaled by the
  // per-pass kernel normalization
  const auto [plus, minus] = split_signs(spec.conv1);
  double expect_var = 0.0;
  for (const KernelTensor* part : {&plus, &minus}) {
    double scale = part->max_abs();
    expect_var += 3.0 * 0.1 * 0.1 * scale * scale;
  }
  const double expect_sd = std::sqrt(expect_var);
  CHECK(sd == doctest::Approx(expect_sd).epsilon(0.15));
  (void)clean;
}

TEST_CASE("rnn_forward zero features with zero bias give a zero state") {
  NetworkSpec spec = NetworkSpec::make(5);
  std::fill(spec.b_h.begin(), spec.b_h.end(), 0.0);
  std::vector<std::vector<double>> feats(5, std::vector<double>(spec.feature_dim(), 0.0));
  const auto h = rnn_forward(spec, feats);
  for (double v : h) CHECK(v == 0.0);
}

TEST_CASE("rnn_forward degenerate single frame") {
  NetworkSpec spec = NetworkSpec::make(6);
  std::fill(spec.w_h.a.begin(), spec.w_h.a.end(), 0.0);
  SplitMix rng(7);
  std::vector<double> f(spec.feature_dim());
  for (double& v : f) v = rng.uniform(-1, 1);
  const auto h = rnn_forward(spec, {f});
  for (int i = 0; i < spec.hidden; ++i) {
    double acc = spec.b_h[i];
    for (int j = 0; j < spec.feature_dim(); ++j) acc += spec.w_x(i, j) * f[j];
    CHECK(h[i] == doctest::Approx(std::tanh(acc)).epsilon(1e-12));
  }
}

TEST_CASE("rnn_forward equals an independent step-by-step loop") {
  NetworkSpec spec = NetworkSpec::make(8);
  SplitMix rng(9);
  std::vector<std::vector<double>> feats(5, std::vector<double>(spec.feature_dim()));
  for (auto& f : feats)
    for (double& v : f) v = rng.uniform(-0.5, 0.5);
  const auto got = rnn_forward(spec, feats);

  std::vector<double> h(spec.hidden, 0.0);
  for (const auto& f : feats) {
    std::vector<double> nh(spec.hidden);
    for (int i = 0; i < spec.hidden; ++i) {
      double u = spec.b_h[i];
      for (size_t j = 0; j < f.size(); ++j) u += spec.w_x(i, static_cast<int>(j)) * f[j];
      for (int j = 0; j < spec.hidden; ++j) u += spec.w_h(i, j) * h[j];
      nh[i] = std::tanh(u);
    }
    h = nh;
  }
  for (int i = 0; i < spec.hidden; ++i) CHECK(got[i] == doctest::Approx(h[i]).epsilon(1e-12));
}

TEST_CASE("rnn_forward rejects non-finite features") {
  NetworkSpec spec = NetworkSpec::make(10);
  std::vector<std::vector<double>> feats(1, std::vector<double>(spec.feature_dim(), 0.0));
  feats[0][3] = std::nan("");
  CHECK_THROWS_AS(rnn_forward(spec, feats), NumericError);
}

TEST_CASE("classify requires a trained network") {
  NetworkSpec spec = NetworkSpec::make(11);
  const auto seg = synth_dataset(1, 1)[0];
  CHECK_THROWS_AS(classify(spec, seg, shared_chip(), Backend::digital), UsageError);
}

TEST_CASE("training memorizes a single segment deterministically") {
  const auto data = synth_dataset(1, 77);
  TrainHyperparams hp;
  hp.epochs = 30;
  hp.learning_rate = 0.05;
  hp.feature_noise_std = 0.0;
  hp.seed = 5;
  const TrainResult a = train(data, hp);
  CHECK(a.curve.back().train_accuracy == 1.0);
  const TrainResult b = train(data, hp);
  CHECK(a.spec.conv1.raw() == b.spec.conv1.raw());
  CHECK(a.spec.w_x.a == b.spec.w_x.a);
  CHECK(a.spec.w_fc.a == b.spec.w_fc.a);

  const Classification c = classify(a.spec, data[0], shared_chip(), Backend::digital);
  CHECK(c.label == data[0].label);
  double sum = 0.0;
  for (double s : c.scores) sum += s;
  CHECK(std::fabs(sum - 1.0) <= 1e-12);
}

TEST_CASE("checkpoint save/load round trip") {
  const auto data = synth_dataset(5, 3);
  TrainHyperparams hp;
  hp.epochs = 2;
  const TrainResult r = train(data, hp);
  const std::string path = "test_checkpoint.bin";
  save_checkpoint(path, r.spec);
  const NetworkSpec back = load_checkpoint(path);
  CHECK(back.trained);
  CHECK(back.conv1.raw() == r.spec.conv1.raw());
  CHECK(back.conv2.raw() == r.spec.conv2.raw());
  CHECK(back.w_x.a == r.spec.w_x.a);
  CHECK(back.w_h.a == r.spec.w_h.a);
  CHECK(back.w_fc.a == r.spec.w_fc.a);
  CHECK(back.b_fc == r.spec.b_fc);
  // byte-identical re-save
  save_checkpoint("test_checkpoint2.bin", back);
  CHECK(read_text_file(path) == read_text_file("test_checkpoint2.bin"));
  std::remove(path.c_str());
  std::remove("test_checkpoint2.bin");
}

TEST_CASE("chip and digital backends agree at sigma 0 after training") {
  const auto data = synth_dataset(10, 21);
  TrainHyperparams hp;
  hp.epochs = 4;
  const TrainResult r = train(data, hp);
  const ChipPlans plans = compile_network(r.spec, shared_chip());
  for (const auto& seg : data) {
    const Classification dig = classify(r.spec, seg, shared_chip(), Backend::digital);
    const Classification chip = classify(r.spec, seg, shared_chip(), Backend::chip, &plans);
    CHECK(dig.label == chip.label);
    for (int c = 0; c < 5; ++c)
      CHECK(std::fabs(dig.scores[c] - chip.scores[c]) <= 1e-9);
  }
}

TEST_CASE("noise sweep format and sigma-0 baseline") {
  const auto data = synth_dataset(10, 31);
  TrainHyperparams hp;
  hp.epochs = 4;
  const TrainResult r = train(data, hp);
  const auto test = synth_dataset(10, 32);
  const double digital = evaluate_accuracy(r.spec, test, shared_chip(), Backend::digital);
  const auto curve = noise_accuracy_sweep(r.spec, test, shared_chip(), {0.0, 0.3}, 3, 17);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].sigma == 0.0);
  CHECK(curve[0].mean_accuracy == digital);
  CHECK(curve[0].p5 == curve[0].p95);  // deterministic at sigma 0
  CHECK(curve[1].p5 <= curve[1].mean_accuracy + 1e-12);
  CHECK(curve[1].p95 >= curve[1].mean_accuracy - 1e-12);
}

TEST_CASE("confusion matrix counts every segment once") {
  const auto data = synth_dataset(15, 41);
  TrainHyperparams hp;
  hp.epochs = 3;
  const TrainResult r = train(data, hp);
  const Mat m = confusion_matrix(r.spec, data, shared_chip(), Backend::digital);
  double total = 0.0;
  for (double v : m.a) total += v;
  CHECK(total == 15.0);
}
