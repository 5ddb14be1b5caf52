#include <doctest.h>

#include <cmath>

#include "ptfp/chip.hpp"
#include "ptfp/rng.hpp"

using namespace ptfp;

namespace {

const ChipConfig& shared_chip() {
  static const ChipConfig cfg = default_chip();
  return cfg;
}

std::vector<double> voltages_for(const ChipConfig& cfg, const std::vector<double>& weights) {
  std::vector<double> v(cfg.ring_count());
  for (int i = 0; i < cfg.ring_count(); ++i) v[i] = cfg.luts()[i].voltage_for_weight(weights[i]);
  return v;
}

std::vector<Waveform> random_inputs(const ChipConfig& cfg, SplitMix& rng, int n) {
  std::vector<Waveform> ins;
  for (int w = 0; w < cfg.d_w; ++w) {
    Waveform x = Waveform::zeros(n, cfg.symbol_period_s(), cfg.oversampling);
    for (double& v : x.samples()) v = rng.next_double();
    ins.push_back(std::move(x));
  }
  return ins;
}

// independent evaluation of y_s[n] = sum_t sum_w W[w,t,s] x_w[n-t]
double double_sum(const ChipConfig& cfg, const std::vector<double>& weights,
                  const std::vector<Waveform>& ins, int s, int n) {
  double acc = 0.0;
  for (int t = 0; t < cfg.d_t; ++t)
    for (int w = 0; w < cfg.d_w; ++w) {
      const int m = n - t;
      if (m < 0 || m >= ins[w].n_symbols()) continue;
      acc += weights[(w * cfg.d_t + t) * cfg.d_s + s] * ins[w].symbol_value(m);
    }
  return acc;
}

}  // namespace

TEST_CASE("chip_forward equals the brute-force double sum") {
  const ChipConfig& cfg = shared_chip();
  SplitMix rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> weights(cfg.ring_count());
    for (double& w : weights) w = rng.next_double();
    const auto ins = random_inputs(cfg, rng, 40);
    ForwardOptions opt;
    const auto volts = voltages_for(cfg, weights);
    opt.voltages_mv = volts;
    const ChipOutput out = chip_forward(cfg, ins, opt);
    REQUIRE(static_cast<int>(out.ports.size()) == cfg.d_s);
    REQUIRE(out.ports[0].n_symbols() == 40 + cfg.d_t - 1);
    for (int n = 0; n < out.ports[0].n_symbols(); ++n) {
      const double want = double_sum(cfg, out.effective_weights, ins, 0, n);
      CHECK(std::fabs(out.ports[0].symbol_value(n) - want) <=
            1e-9 * std::max(1.0, std::fabs(want)));
    }
    // requested weights survive the LUT round trip
    for (int i = 0; i < cfg.ring_count(); ++i)
      CHECK(out.effective_weights[i] == doctest::Approx(weights[i]).epsilon(1e-9));
  }
}

TEST_CASE("all-dark weights give an all-zero output") {
  const ChipConfig& cfg = shared_chip();
  SplitMix rng(3);
  const auto ins = random_inputs(cfg, rng, 16);
  ForwardOptions opt;
  const auto volts = voltages_for(cfg, std::vector<double>(cfg.ring_count(), 0.0));
  opt.voltages_mv = volts;
  const ChipOutput out = chip_forward(cfg, ins, opt);
  for (double v : out.ports[0].samples()) CHECK(v == 0.0);
}

TEST_CASE("chip_forward is linear at sigma 0") {
  const ChipConfig& cfg = shared_chip();
  SplitMix rng(31);
  std::vector<double> weights(cfg.ring_count());
  for (double& w : weights) w = rng.next_double();
  const auto volts = voltages_for(cfg, weights);
  ForwardOptions opt;
  opt.voltages_mv = volts;

  const auto xs = random_inputs(cfg, rng, 24);
  const auto ys = random_inputs(cfg, rng, 24);
  const double a = 0.37, b = 0.21;  // keep a*x + b*y within intensity range
  std::vector<Waveform> mix = xs;
  for (int w = 0; w < cfg.d_w; ++w)
    for (long i = 0; i < mix[w].n_samples(); ++i)
      mix[w].samples()[i] = a * xs[w].samples()[i] + b * ys[w].samples()[i];

  const auto om = chip_forward(cfg, mix, opt);
  const auto ox = chip_forward(cfg, xs, opt);
  const auto oy = chip_forward(cfg, ys, opt);
  for (long i = 0; i < om.ports[0].n_samples(); ++i) {
    const double want = a * ox.ports[0].samples()[i] + b * oy.ports[0].samples()[i];
    CHECK(std::fabs(om.ports[0].samples()[i] - want) <= 1e-12 * std::max(1.0, std::fabs(want)));
  }
}

TEST_CASE("serial reference and parallel kernel agree") {
  const ChipConfig& cfg = shared_chip();
  SplitMix rng(77);
  std::vector<double> weights(cfg.ring_count());
  for (double& w : weights) w = rng.next_double();
  const auto volts = voltages_for(cfg, weights);

  for (double sigma : {0.0, 0.05}) {
    ChipConfig noisy = cfg;
    noisy.noise.sigma = sigma;
    noisy.noise.seed = 99;
    const auto ins = random_inputs(noisy, rng, 50);
    ForwardOptions opt;
    opt.voltages_mv = volts;
    const auto a = chip_forward(noisy, ins, opt);
    const auto b = chip_forward_serial(noisy, ins, opt);
    REQUIRE(a.ports[0].n_samples() == b.ports[0].n_samples());
    for (long i = 0; i < a.ports[0].n_samples(); ++i)
      CHECK(std::fabs(a.ports[0].samples()[i] - b.ports[0].samples()[i]) <=
            1e-12 * std::max(1.0, std::fabs(b.ports[0].samples()[i])));
  }
}

TEST_CASE("fractional skews shift branches and both implementations agree") {
  ChipConfig cfg = default_chip();
  cfg.oversampling = 8;
  cfg.output_skews = {0.0, 0.25, -0.125};
  cfg.input_skews = {0.0, 0.125, 0.0, -0.25};
  SplitMix rng(13);
  std::vector<double> weights(cfg.ring_count());
  for (double& w : weights) w = rng.next_double();
  const auto volts = voltages_for(cfg, weights);
  std::vector<Waveform> ins;
  for (int w = 0; w < cfg.d_w; ++w) {
    Waveform x = Waveform::zeros(30, cfg.symbol_period_s(), cfg.oversampling);
    for (double& v : x.samples()) v = rng.next_double();
    ins.push_back(std::move(x));
  }
  ForwardOptions opt;
  opt.voltages_mv = volts;
  const auto a = chip_forward(cfg, ins, opt);
  const auto b = chip_forward_serial(cfg, ins, opt);
  for (long i = 0; i < a.ports[0].n_samples(); ++i)
    CHECK(std::fabs(a.ports[0].samples()[i] - b.ports[0].samples()[i]) <=
          1e-12 * std::max(1.0, std::fabs(b.ports[0].samples()[i])));
}

TEST_CASE("noise is unbiased across seeds") {
  ChipConfig cfg = default_chip();
  cfg.noise.sigma = 0.1;
  std::vector<double> weights(cfg.ring_count(), 0.5);
  const auto volts = voltages_for(cfg, weights);
  std::vector<Waveform> ins;
  for (int w = 0; w < cfg.d_w; ++w) {
    Waveform x = Waveform::zeros(4, cfg.symbol_period_s());
    for (double& v : x.samples()) v = 0.5;
    ins.push_back(std::move(x));
  }
  ForwardOptions noiseless;
  noiseless.voltages_mv = volts;
  {
    ChipConfig quiet = cfg;
    quiet.noise.sigma = 0.0;
    const double clean = chip_forward(quiet, ins, noiseless).ports[0].symbol_value(3);
    const int trials = 10000;
    double mean = 0.0;
    for (int i = 0; i < trials; ++i) {
      ForwardOptions opt;
      opt.voltages_mv = volts;
      opt.noise_seed = derive_seed(5, i);
      mean += chip_forward(cfg, ins, opt).ports[0].symbol_value(3);
    }
    mean /= trials;
    // port noise std = sigma * sqrt(d_t); allow 3 standard errors
    const double tol = 3.0 * cfg.noise.sigma * std::sqrt(static_cast<double>(cfg.d_t)) /
                       std::sqrt(static_cast<double>(trials));
    CHECK(std::fabs(mean - clean) <= tol);
  }
}

TEST_CASE("chip_forward validates input count") {
  const ChipConfig& cfg = shared_chip();
  std::vector<Waveform> ins(cfg.d_w - 1, Waveform::zeros(8, cfg.symbol_period_s()));
  CHECK_THROWS_AS(chip_forward(cfg, ins), ShapeError);
}

TEST_CASE("synchronize_outputs returns zero corrections for an ideal chip") {
  ChipConfig cfg = default_chip();
  cfg.oversampling = 8;
  SplitMix rng(55);
  Waveform probe = Waveform::zeros(64, cfg.symbol_period_s(), cfg.oversampling);
  for (int n = 0; n < 64; ++n)
    for (int o = 0; o < 8; ++o) probe.samples()[n * 8 + o] = rng.next_double();
  const SyncResult res = synchronize_outputs(cfg, probe);
  REQUIRE(static_cast<int>(res.corrections.size()) == cfg.d_t);
  for (int t = 0; t < cfg.d_t; ++t) {
    CHECK(std::fabs(res.corrections[t]) <= 1e-9);
    CHECK(res.measured_delays[t] == doctest::Approx(t).epsilon(1e-9));
  }
}

TEST_CASE("synchronize_outputs recovers injected fractional skews") {
  ChipConfig cfg = default_chip();
  cfg.oversampling = 8;
  cfg.output_skews = {0.0, 0.3, -0.2};
  SplitMix rng(56);
  Waveform probe = Waveform::zeros(128, cfg.symbol_period_s(), cfg.oversampling);
  for (int n = 0; n < 128; ++n) {
    const double v = rng.next_double();
    for (int o = 0; o < 8; ++o) probe.samples()[n * 8 + o] = v;
  }
  const SyncResult res = synchronize_outputs(cfg, probe);
  for (int t = 0; t < cfg.d_t; ++t)
    CHECK(std::fabs(res.corrections[t] + cfg.output_skews[t]) <= 0.1);

  // applying the corrections restores one-symbol tap spacing
  ChipConfig fixed = cfg;
  for (int t = 0; t < cfg.d_t; ++t) fixed.output_skews[t] += res.corrections[t];
  const SyncResult res2 = synchronize_outputs(fixed, probe);
  for (int t = 1; t < cfg.d_t; ++t) {
    const double spacing = res2.measured_delays[t] - res2.measured_delays[t - 1];
    CHECK(std::fabs(spacing - 1.0) <= 0.1);
  }
}

TEST_CASE("synchronize_outputs rejects flat probes") {
  ChipConfig cfg = default_chip();
  Waveform flat = Waveform::zeros(32, cfg.symbol_period_s());
  for (double& v : flat.samples()) v = 0.7;
  CHECK_THROWS_AS(synchronize_outputs(cfg, flat), SyncError);
}

TEST_CASE("throughput arithmetic") {
  ChipConfig cfg = default_chip();
  CHECK(throughput_ops_per_s(cfg) == 480e9);

  ChipConfig tiny;
  tiny.d_w = tiny.d_t = tiny.d_s = 1;
  tiny.symbol_rate_baud = 1.0;
  CHECK(throughput_ops_per_s(tiny) == 2.0);

  ChipConfig big;
  big.d_w = 8;
  big.d_t = 5;
  big.d_s = 4;
  big.symbol_rate_baud = 20e9;
  CHECK(throughput_ops_per_s(big) == doctest::Approx(6.4e12));
}

TEST_CASE("compute density") {
  ChipConfig cfg = default_chip();
  CHECK(compute_density(cfg, 1.0) == 480e9);
  CHECK(compute_density(cfg, reference_footprint_mm2()) == doctest::Approx(588e9).epsilon(0.005));

  ChipConfig big;
  big.d_w = 8;
  big.d_t = 5;
  big.d_s = 4;
  big.symbol_rate_baud = 20e9;
  CHECK(compute_density(big, 2.0) == doctest::Approx(3.2e12));

  CHECK_THROWS_AS(compute_density(cfg, 0.0), ArgumentError);
  CHECK_THROWS_AS(compute_density(cfg, -1.0), ArgumentError);
}

TEST_CASE("crosstalk is off by default and small when enabled") {
  SplitMix rng(91);
  std::vector<double> weights(shared_chip().ring_count());
  for (double& w : weights) w = 0.2 + 0.6 * rng.next_double();

  ChipConfig ideal = default_chip();
  ChipConfig xt = default_chip();
  xt.model_crosstalk = true;
  const auto ins = random_inputs(ideal, rng, 24);
  ForwardOptions opt;
  const auto volts = voltages_for(ideal, weights);
  opt.voltages_mv = volts;
  const auto a = chip_forward(ideal, ins, opt);
  const auto b = chip_forward(xt, ins, opt);
  double worst = 0.0;
  bool any_diff = false;
  for (long i = 0; i < a.ports[0].n_samples(); ++i) {
    const double va = a.ports[0].samples()[i];
    const double vb = b.ports[0].samples()[i];
    if (va != vb) any_diff = true;
    if (va > 0.1) worst = std::max(worst, std::fabs(vb - va) / va);
  }
  CHECK(any_diff);        // the overlap term does something
  CHECK(worst < 0.05);    // 2 nm spacing with 0.1 nm linewidth: a small perturbation
}

TEST_CASE("coupler imbalance and channel loss scale branch weights") {
  ChipConfig cfg = default_chip();
  cfg.coupler_imbalance = {0.9, 1.0, 1.1};
  cfg.wdm_channel_loss_db = {0.5, 0.0, 0.0, 0.0};
  SplitMix rng(92);
  std::vector<double> weights(cfg.ring_count());
  for (double& w : weights) w = rng.next_double();
  const auto ins = random_inputs(cfg, rng, 16);
  ForwardOptions opt;
  const auto volts = voltages_for(cfg, weights);
  opt.voltages_mv = volts;
  const auto out = chip_forward(cfg, ins, opt);
  // effective weights reflect the configured gains
  for (int w = 0; w < cfg.d_w; ++w)
    for (int t = 0; t < cfg.d_t; ++t) {
      const double gain = (w == 0 ? std::pow(10.0, -0.05) : 1.0) * cfg.coupler_imbalance[t];
      const double got = out.effective_weights[cfg.ring_index(w, t, 0)];
      CHECK(got == doctest::Approx(weights[cfg.ring_index(w, t, 0)] * gain).epsilon(1e-9));
    }
  // serial path applies the same imperfections
  const auto ref = chip_forward_serial(cfg, ins, opt);
  for (long i = 0; i < out.ports[0].n_samples(); ++i)
    CHECK(out.ports[0].samples()[i] ==
          doctest::Approx(ref.ports[0].samples()[i]).epsilon(1e-12));
}

TEST_CASE("config validation catches bad shapes") {
  ChipConfig cfg = default_chip();
  cfg.voltages_mv.pop_back();
  CHECK_THROWS_AS(cfg.validate(), ShapeError);

  ChipConfig off = default_chip();
  off.operating_wavelengths_nm[0] = 1551.8;  // between channels
  CHECK_THROWS_AS(off.validate(), ArgumentError);
}
