#include <doctest.h>

#include <cmath>

#include "ptfp/compiler.hpp"
#include "ptfp/io.hpp"
#include "ptfp/oracle.hpp"
#include "ptfp/rng.hpp"

using namespace ptfp;

namespace {

const ChipConfig& shared_chip() {
  static const ChipConfig cfg = default_chip();
  return cfg;
}

KernelTensor kernel_1d(const std::vector<double>& taps, int cin = 1, int cout = 1) {
  KernelTensor k({1, static_cast<int>(taps.size())}, cin, cout);
  for (int o = 0; o < cout; ++o)
    for (int i = 0; i < cin; ++i)
      for (size_t c = 0; c < taps.size(); ++c) k.at(o, i, 0, c) = taps[c];
  return k;
}

DataTensor random_image(SplitMix& rng, int rows, int cols, int channels = 1) {
  DataTensor t({rows, cols}, channels);
  for (double& v : t.raw()) v = rng.next_double();
  return t;
}

KernelTensor random_kernel(SplitMix& rng, int krows, int kcols, int cin, int cout,
                           bool nonneg = false) {
  KernelTensor k({krows, kcols}, cin, cout);
  for (double& v : k.raw()) v = nonneg ? rng.next_double() : rng.uniform(-1.0, 1.0);
  return k;
}

void check_close(const DataTensor& got, const DataTensor& want, double tol) {
  REQUIRE(got.shape() == want.shape());
  REQUIRE(got.channels() == want.channels());
  for (size_t i = 0; i < got.raw().size(); ++i)
    CHECK(std::fabs(got.raw()[i] - want.raw()[i]) <= tol * std::max(1.0, std::fabs(want.raw()[i])));
}

}  // namespace

TEST_CASE("split_signs splits [-1,0,1]") {
  const KernelTensor k = kernel_1d({-1, 0, 1});
  const auto [plus, minus] = split_signs(k);
  CHECK(plus.raw() == std::vector<double>{0, 0, 1});
  CHECK(minus.raw() == std::vector<double>{1, 0, 0});
}

TEST_CASE("split_signs of a Sobel kernel has three nonzeros per pass") {
  const auto [plus, minus] = split_signs(named_kernel("sobel-h"));
  int np = 0, nm = 0;
  for (double v : plus.raw()) np += v != 0.0;
  for (double v : minus.raw()) nm += v != 0.0;
  CHECK(np == 3);
  CHECK(nm == 3);
}

TEST_CASE("split_signs produces disjoint non-negative supports") {
  SplitMix rng(8);
  const KernelTensor k = random_kernel(rng, 3, 3, 2, 2);
  const auto [plus, minus] = split_signs(k);
  for (size_t i = 0; i < k.raw().size(); ++i) {
    CHECK(plus.raw()[i] >= 0.0);
    CHECK(minus.raw()[i] >= 0.0);
    CHECK(std::min(plus.raw()[i], minus.raw()[i]) == 0.0);
    CHECK(plus.raw()[i] - minus.raw()[i] == k.raw()[i]);
  }
}

TEST_CASE("normalize_weights scales into [0,1]") {
  const auto [unit, scale] = normalize_weights(kernel_1d({0, 0, 2}));
  CHECK(scale == 2.0);
  CHECK(unit.raw() == std::vector<double>{0, 0, 1});

  const auto [ub, sb] = normalize_weights(named_kernel("blur"));
  CHECK(sb == doctest::Approx(1.0 / 9));
  for (double v : ub.raw()) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("normalize_weights round trip") {
  SplitMix rng(9);
  const KernelTensor k = random_kernel(rng, 3, 3, 2, 3);
  const auto [unit, scale] = normalize_weights(k);
  for (size_t i = 0; i < k.raw().size(); ++i)
    CHECK(std::fabs(unit.raw()[i] * scale - k.raw()[i]) <= 1e-12);
}

TEST_CASE("all-zero kernel compiles to an empty plan with zero output") {
  const KernelTensor k({1, 3}, 1, 1);
  const ExecutionPlan plan = compile_kernel(k, shared_chip());
  CHECK(plan.calls.empty());
  SplitMix rng(10);
  const DataTensor x = random_image(rng, 1, 8);
  const DataTensor y = execute_plan(plan, x, shared_chip());
  for (double v : y.raw()) CHECK(v == 0.0);
}

TEST_CASE("1-D [-1,0,1] kernel on a step input matches the oracle") {
  const KernelTensor k = kernel_1d({-1, 0, 1});
  const ExecutionPlan plan = compile_kernel(k, shared_chip());
  CHECK(plan.calls.size() == 2);  // one plus and one minus pass

  DataTensor step({1, 16}, 1);
  for (int c = 8; c < 16; ++c) step.at(0, 0, c) = 1.0;
  const DataTensor y = execute_plan(plan, step, shared_chip());
  const DataTensor want = oracle_tensor_conv(step, k);
  check_close(y, want, 1e-9);
}

TEST_CASE("row-shift plan: identity-center kernel reproduces the interior") {
  const ExecutionPlan plan = plan_row_shift_2d(named_kernel("identity"), shared_chip());
  SplitMix rng(12);
  const DataTensor img = random_image(rng, 8, 8);
  const DataTensor y = execute_plan(plan, img, shared_chip());
  REQUIRE(y.rows() == 6);
  REQUIRE(y.cols() == 6);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c)
      CHECK(y.at(0, r, c) == doctest::Approx(img.at(0, r + 1, c + 1)).epsilon(1e-9));
}

TEST_CASE("vertical Sobel extracts horizontal edges") {
  DataTensor img({10, 10}, 1);
  for (int r = 5; r < 10; ++r)
    for (int c = 0; c < 10; ++c) img.at(0, r, c) = 1.0;  // horizontal stripe boundary at row 5
  const ExecutionPlan plan = plan_row_shift_2d(named_kernel("sobel-v"), shared_chip());
  const DataTensor y = execute_plan(plan, img, shared_chip());
  for (int r = 0; r < y.rows(); ++r)
    for (int c = 0; c < y.cols(); ++c) {
      const bool near_edge = r + 1 >= 4 && r + 1 <= 5;  // kernel spans rows r..r+2
      if (near_edge)
        CHECK(std::fabs(y.at(0, r, c)) > 1.0);
      else
        CHECK(std::fabs(y.at(0, r, c)) <= 1e-9);
    }
}

TEST_CASE("random 3x3 row-shift plans match the 2-D oracle") {
  SplitMix rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const KernelTensor k = random_kernel(rng, 3, 3, 1, 1);
    const ExecutionPlan plan = plan_row_shift_2d(k, shared_chip());
    const DataTensor img = random_image(rng, 8, 8);
    check_close(execute_plan(plan, img, shared_chip()), oracle_tensor_conv(img, k), 1e-9);
  }
}

TEST_CASE("decomposition counts match the chip recall rule") {
  SplitMix rng(14);
  // single-sign [3x3, 1, 4] -> 4 calls
  const KernelTensor k14 = random_kernel(rng, 3, 3, 1, 4, /*nonneg=*/true);
  CHECK(compile_kernel(k14, shared_chip()).calls.size() == 4);
  // single-sign [3x3, 4, 8] -> 32 calls
  const KernelTensor k48 = random_kernel(rng, 3, 3, 4, 8, /*nonneg=*/true);
  CHECK(compile_kernel(k48, shared_chip()).calls.size() == 32);
  // trivial identity kernel -> 1 call
  const ExecutionPlan ident = compile_kernel(kernel_1d({1}), shared_chip());
  CHECK(ident.calls.size() == 1);
  SplitMix rng2(15);
  const DataTensor x = random_image(rng2, 1, 6);
  check_close(execute_plan(ident, x, shared_chip()), x, 1e-9);
}

TEST_CASE("capacity error names the required taps when tiling is disabled") {
  const KernelTensor wide = kernel_1d({1, 2, 3, 4, 5});
  CompileOptions opt;
  opt.allow_tap_tiling = false;
  try {
    compile_kernel(wide, shared_chip(), opt);
    FAIL("expected CapacityError");
  } catch (const CapacityError& e) {
    CHECK(e.required_taps == 5);
    CHECK(std::string(e.what()).find("d_t") != std::string::npos);
  }
}

TEST_CASE("tap tiling handles kernels wider than d_t") {
  SplitMix rng(16);
  const KernelTensor wide = random_kernel(rng, 1, 5, 1, 1, /*nonneg=*/true);
  const ExecutionPlan plan = compile_kernel(wide, shared_chip());
  CHECK(plan.calls.size() == 2);  // dense single-sign kernel: 2 tap segments
  const DataTensor x = random_image(rng, 1, 12);
  check_close(execute_plan(plan, x, shared_chip()), oracle_tensor_conv(x, wide), 1e-9);

  // 2-D kernel wider than d_t
  const KernelTensor wide2 = random_kernel(rng, 2, 4, 1, 1);
  const DataTensor img = random_image(rng, 6, 9);
  check_close(execute_plan(compile_kernel(wide2, shared_chip()), img, shared_chip()),
              oracle_tensor_conv(img, wide2), 1e-9);
}

TEST_CASE("row groups handle kernels taller than d_w") {
  SplitMix rng(17);
  const KernelTensor tall = random_kernel(rng, 6, 3, 1, 1);
  const ExecutionPlan plan = compile_kernel(tall, shared_chip());
  const DataTensor img = random_image(rng, 9, 7);
  check_close(execute_plan(plan, img, shared_chip()), oracle_tensor_conv(img, tall), 1e-9);
}

TEST_CASE("wavelength-parallel mode groups input channels") {
  SplitMix rng(18);
  // C_in = 6 > d_w = 4: two channel groups per (sign, out) pass
  const KernelTensor k = random_kernel(rng, 1, 3, 6, 2, /*nonneg=*/true);
  const ExecutionPlan plan = compile_kernel(k, shared_chip());
  CHECK(plan.calls.size() == 4);  // 2 outputs x 2 groups
  const DataTensor x = random_image(rng, 1, 10, 6);
  check_close(execute_plan(plan, x, shared_chip()), oracle_tensor_conv(x, k), 1e-9);
}

TEST_CASE("sobel-h responds only at a vertical edge") {
  DataTensor img({8, 8}, 1);
  for (int r = 0; r < 8; ++r)
    for (int c = 4; c < 8; ++c) img.at(0, r, c) = 1.0;
  const ExecutionPlan plan = compile_kernel(named_kernel("sobel-h"), shared_chip());
  const DataTensor y = execute_plan(plan, img, shared_chip());
  for (int r = 0; r < y.rows(); ++r)
    for (int c = 0; c < y.cols(); ++c) {
      const bool at_edge = c + 1 >= 3 && c + 1 <= 4;
      if (at_edge)
        CHECK(std::fabs(y.at(0, r, c)) > 1.0);
      else
        CHECK(std::fabs(y.at(0, r, c)) <= 1e-9);
    }
}

TEST_CASE("sharpen equals identity plus horizontal Sobel") {
  SplitMix rng(19);
  const DataTensor img = random_image(rng, 8, 8);
  const ChipConfig& cfg = shared_chip();
  const DataTensor sharp = execute_plan(compile_kernel(named_kernel("sharpen"), cfg), img, cfg);
  const DataTensor ident = oracle_tensor_conv(img, named_kernel("identity"));
  const DataTensor edges = oracle_tensor_conv(img, named_kernel("sobel-h"));
  for (size_t i = 0; i < sharp.raw().size(); ++i)
    CHECK(sharp.raw()[i] ==
          doctest::Approx(ident.raw()[i] + edges.raw()[i]).epsilon(1e-9));
}

TEST_CASE("randomized end-to-end equivalence with the oracle") {
  SplitMix rng(20);
  const ChipConfig& cfg = shared_chip();
  for (int trial = 0; trial < 50; ++trial) {
    const int cin = 1 + static_cast<int>(rng.below(4));
    const int cout = 1 + static_cast<int>(rng.below(4));
    const bool two_d = rng.below(2) == 0;
    const int krows = two_d ? 3 : 1;
    const int rows = two_d ? 3 + static_cast<int>(rng.below(6)) : 1;
    const int cols = 3 + static_cast<int>(rng.below(6));
    const DataTensor x = random_image(rng, rows, cols, cin);
    const KernelTensor k = random_kernel(rng, krows, 3, cin, cout);
    const ExecutionPlan plan = compile_kernel(k, cfg);
    check_close(execute_plan(plan, x, cfg), oracle_tensor_conv(x, k), 1e-9);
  }
}

TEST_CASE("plan slot coverage reconstructs the kernel") {
  SplitMix rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const int cin = 1 + static_cast<int>(rng.below(4));
    const int cout = 1 + static_cast<int>(rng.below(3));
    const bool two_d = rng.below(2) == 0;
    const int krows = two_d ? 1 + static_cast<int>(rng.below(5)) : 1;
    const int kcols = 1 + static_cast<int>(rng.below(5));
    const KernelTensor k = random_kernel(rng, krows, kcols, cin, cout);
    const ExecutionPlan plan = compile_kernel(k, shared_chip());
    const KernelTensor back = reconstruct_kernel(plan);
    for (size_t i = 0; i < k.raw().size(); ++i)
      CHECK(std::fabs(back.raw()[i] - k.raw()[i]) <= 1e-12 * std::max(1.0, std::fabs(k.raw()[i])));
  }
}

TEST_CASE("call-count formula matches plan enumeration") {
  SplitMix rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    ChipConfig cfg = default_chip();  // dims vary below; LUTs rebuilt
    cfg.d_w = 1 + static_cast<int>(rng.below(4));
    cfg.d_t = 1 + static_cast<int>(rng.below(4));
    cfg.operating_wavelengths_nm.resize(cfg.d_w);
    for (int w = 0; w < cfg.d_w; ++w)
      cfg.operating_wavelengths_nm[w] = 1550.8 + 2.0 * w;
    cfg.rings.clear();
    cfg.voltages_mv.clear();
    for (int idx = 0; idx < cfg.ring_count(); ++idx) {
      MRRModel m;
      m.base_resonance_nm = cfg.operating_wavelengths_nm[idx / (cfg.d_t * cfg.d_s)] - 0.5;
      cfg.rings.push_back(m);
    }
    cfg.calibrate();

    const int cin = 1 + static_cast<int>(rng.below(4));
    const int cout = 1 + static_cast<int>(rng.below(3));
    const bool two_d = rng.below(2) == 0;
    const int krows = two_d ? 1 + static_cast<int>(rng.below(4)) : 1;
    const int kcols = 1 + static_cast<int>(rng.below(5));
    KernelTensor k = random_kernel(rng, krows, kcols, cin, cout);
    // sprinkle structural zeros so sign passes and blocks drop out
    for (double& v : k.raw())
      if (rng.below(4) == 0) v = 0.0;
    const ExecutionPlan plan = compile_kernel(k, cfg);
    CHECK(static_cast<long>(plan.calls.size()) == expected_call_count(k, cfg));
  }
}

TEST_CASE("compiled plans scale linearly with the kernel") {
  SplitMix rng(24);
  const ChipConfig& cfg = shared_chip();
  const KernelTensor k = random_kernel(rng, 3, 3, 1, 2);
  const DataTensor x = random_image(rng, 7, 7);
  const double c = 2.75;
  KernelTensor ck = k;
  for (double& v : ck.raw()) v *= c;
  const DataTensor y1 = execute_plan(compile_kernel(ck, cfg), x, cfg);
  DataTensor y2 = execute_plan(compile_kernel(k, cfg), x, cfg);
  for (double& v : y2.raw()) v *= c;
  check_close(y1, y2, 1e-9);
}

TEST_CASE("per-call optical weights stay inside [0,1]") {
  SplitMix rng(25);
  const KernelTensor k = random_kernel(rng, 3, 3, 2, 2);
  const ExecutionPlan plan = compile_kernel(k, shared_chip());
  for (const auto& call : plan.calls) {
    double max_unit = 0.0;
    for (double w : call.unit_weights) {
      CHECK(w >= 0.0);
      CHECK(w <= 1.0 + 1e-12);
      max_unit = std::max(max_unit, w);
    }
    CHECK(max_unit <= 1.0 + 1e-12);
  }
}

TEST_CASE("execute_plan validates inputs") {
  const ExecutionPlan plan = compile_kernel(named_kernel("blur"), shared_chip());
  DataTensor wrong_channels({8, 8}, 2);
  CHECK_THROWS_AS(execute_plan(plan, wrong_channels, shared_chip()), ShapeError);
  DataTensor too_big({8, 8}, 1);
  too_big.at(0, 0, 0) = 1.5;
  CHECK_THROWS_AS(execute_plan(plan, too_big, shared_chip()), EncodingError);
}

TEST_CASE("plan JSON round trip preserves execution") {
  SplitMix rng(26);
  const ChipConfig& cfg = shared_chip();
  const KernelTensor k = random_kernel(rng, 3, 3, 1, 2);
  const ExecutionPlan plan = compile_kernel(k, cfg);
  const ExecutionPlan back = plan_from_json_text(plan_to_json_text(plan));
  REQUIRE(back.calls.size() == plan.calls.size());
  const DataTensor x = random_image(rng, 6, 6);
  check_close(execute_plan(back, x, cfg), execute_plan(plan, x, cfg), 1e-12);
  CHECK(describe_plan(plan).find("chip call") != std::string::npos);
}
