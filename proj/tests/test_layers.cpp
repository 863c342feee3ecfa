#include <gtest/gtest.h>

#include <cmath>

#include "hcrn/error.hpp"
#include "hcrn/layers.hpp"
#include "oracles/gradcheck.hpp"
#include "oracles/oracles.hpp"

namespace hcrn {
namespace {

using gradcheck::compare;
using gradcheck::numeric_gradient;
using gradcheck::probe;
using oracle::random_tensor;

constexpr double kGradTol = 1e-6;
constexpr int kSeeds = 20;

// Values bounded away from zero so finite differences never straddle a ReLU
// or max-pool decision boundary.
Tensor away_from_kinks(Rng& rng, Shape shape) {
  Tensor t = random_tensor(rng, std::move(shape));
  for (double& v : t.values()) v += v < 0 ? -0.05 : 0.05;
  return t;
}

TEST(Conv2d, IdentityKernel) {
  Rng rng(1);
  const Tensor in = random_tensor(rng, {4, 5, 1});
  const Tensor out = conv2d_forward(in, Tensor::full({1, 1, 1, 1}, 1.0), Tensor({1}));
  EXPECT_EQ(out, in);
}

TEST(Conv2d, OnesKernelSumsWindow) {
  const Tensor out = conv2d_forward(Tensor::full({5, 5, 1}, 1.0), Tensor::full({3, 3, 1, 1}, 1.0),
                                    Tensor({1}));
  EXPECT_EQ(out.shape(), (Shape{3, 3, 1}));
  for (double v : out.values()) EXPECT_EQ(v, 9.0);
}

TEST(Conv2d, MatchesLoopOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Tensor in = random_tensor(rng, {6, 6, 2});
    const Tensor k = random_tensor(rng, {3, 3, 2, 4});
    const Tensor b = random_tensor(rng, {4});
    const Tensor got = conv2d_forward(in, k, b);
    const Tensor want = oracle::conv2d(in, k, b);
    ASSERT_EQ(got.shape(), want.shape());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(Conv2d, Errors) {
  EXPECT_THROW(conv2d_forward(Tensor({2, 2, 1}), Tensor({3, 3, 1, 1}), Tensor({1})),
               DimensionError);
  EXPECT_THROW(conv2d_forward(Tensor({4, 4, 2}), Tensor({3, 3, 1, 1}), Tensor({1})),
               DimensionError);
  EXPECT_THROW(conv2d_backward(Tensor({4, 4, 1}), Tensor({3, 3, 1, 1}), Tensor({3, 3, 1})),
               DimensionError);
}

TEST(Conv2d, LinearInIntegerInputs) {
  Rng rng(8);
  Tensor in({5, 6, 2}), k({3, 3, 2, 3});
  for (double& v : in.values()) v = static_cast<double>(rng.between(-5, 5));
  for (double& v : k.values()) v = static_cast<double>(rng.between(-5, 5));
  const Tensor zero_bias({3});
  for (double alpha : {2.0, -3.0, 7.0}) {
    EXPECT_EQ(conv2d_forward(scale(in, alpha), k, zero_bias),
              scale(conv2d_forward(in, k, zero_bias), alpha));
  }
}

TEST(Conv2dBackward, ZeroUpstreamAndBiasSum) {
  Rng rng(2);
  const Tensor in = random_tensor(rng, {5, 5, 1});
  const Tensor k = random_tensor(rng, {3, 3, 1, 2});
  Conv2dGrads zero = conv2d_backward(in, k, Tensor({3, 3, 2}));
  for (const Tensor* t : {&zero.input, &zero.kernels, &zero.bias}) {
    for (double v : t->values()) EXPECT_EQ(v, 0.0);
  }
  const Tensor go = random_tensor(rng, {3, 3, 2});
  const Conv2dGrads g = conv2d_backward(in, k, go);
  for (std::size_t o = 0; o < 2; ++o) {
    double s = 0.0;
    for (std::size_t y = 0; y < 3; ++y)
      for (std::size_t x = 0; x < 3; ++x) s += go.at({y, x, o});
    EXPECT_NEAR(g.bias[o], s, 1e-14);
  }
}

TEST(Conv2dBackward, FiniteDifferences) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(100 + seed);
    Tensor in = random_tensor(rng, {5, 5, 1});
    Tensor k = random_tensor(rng, {3, 3, 1, 2});
    Tensor b = random_tensor(rng, {2});
    const Tensor w = random_tensor(rng, {3, 3, 2});
    const Conv2dGrads g = conv2d_backward(in, k, w);
    auto f = [&] { return probe(conv2d_forward(in, k, b), w); };
    EXPECT_LT(compare(g.input, numeric_gradient(f, in)).max_relative_error, kGradTol);
    EXPECT_LT(compare(g.kernels, numeric_gradient(f, k)).max_relative_error, kGradTol);
    EXPECT_LT(compare(g.bias, numeric_gradient(f, b)).max_relative_error, kGradTol);
  }
}

TEST(MaxPool, HandCases) {
  const PoolResult r = maxpool2x2_forward(Tensor({2, 2, 1}, {1, 2, 3, 4}));
  EXPECT_EQ(r.output, Tensor({1, 1, 1}, {4}));
  EXPECT_EQ(r.argmax, std::vector<std::size_t>{3});
  EXPECT_THROW(maxpool2x2_forward(Tensor({1, 4, 1})), DimensionError);
}

TEST(MaxPool, ConstantInputRoutesToFirstPosition) {
  const Tensor in = Tensor::full({4, 4, 2}, 0.5);
  const PoolResult r = maxpool2x2_forward(in);
  for (double v : r.output.values()) EXPECT_EQ(v, 0.5);
  const Tensor g = maxpool2x2_backward(in.shape(), r.argmax, Tensor::full({2, 2, 2}, 1.0));
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t x = 0; x < 4; ++x)
      for (std::size_t c = 0; c < 2; ++c)
        EXPECT_EQ(g.at({y, x, c}), (y % 2 == 0 && x % 2 == 0) ? 1.0 : 0.0);
}

TEST(MaxPool, OddExtentsDropTrailingRowAndColumn) {
  Rng rng(4);
  const Tensor in = random_tensor(rng, {5, 7, 1});
  const PoolResult r = maxpool2x2_forward(in);
  EXPECT_EQ(r.output.shape(), (Shape{2, 3, 1}));
}

TEST(MaxPool, MatchesScanOracleAndIsMonotone) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Tensor in = random_tensor(rng, {8, 8, 3});
    const Tensor out = maxpool2x2_forward(in).output;
    EXPECT_EQ(out, oracle::maxpool2x2(in));
    Tensor bigger = in;
    for (double& v : bigger.values()) v += rng.uniform(0.0, 0.5);
    const Tensor out2 = maxpool2x2_forward(bigger).output;
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_GE(out2[i], out[i]);
  }
}

TEST(MaxPool, FiniteDifferences) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(200 + seed);
    Tensor in = random_tensor(rng, {6, 5, 2});
    const Tensor w = random_tensor(rng, {3, 2, 2});
    const PoolResult r = maxpool2x2_forward(in);
    const Tensor g = maxpool2x2_backward(in.shape(), r.argmax, w);
    auto f = [&] { return probe(maxpool2x2_forward(in).output, w); };
    EXPECT_LT(compare(g, numeric_gradient(f, in)).max_relative_error, kGradTol);
  }
}

TEST(Relu, FiniteDifferences) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(300 + seed);
    Tensor in = away_from_kinks(rng, {11});
    const Tensor w = random_tensor(rng, {11});
    const Tensor g = relu_backward(in, w);
    auto f = [&] { return probe(relu_forward(in), w); };
    EXPECT_LT(compare(g, numeric_gradient(f, in)).max_relative_error, kGradTol);
  }
}

TEST(Dense, IdentityAndRelu) {
  Rng rng(5);
  const Tensor x = random_tensor(rng, {3});
  const Tensor eye = Tensor::matrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  EXPECT_EQ(dense_forward(x, eye, Tensor({3}), Activation::kNone), x);
  const Tensor neg = dense_forward(Tensor::vector({1, 1}), Tensor::matrix(2, 2, {-1, -2, -3, -4}),
                                   Tensor({2}), Activation::kRelu);
  EXPECT_EQ(neg, Tensor({2}));
  EXPECT_THROW(dense_forward(x, Tensor({2, 4}), Tensor({2}), Activation::kNone), DimensionError);
}

TEST(Dense, MatchesLoopOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Tensor x = random_tensor(rng, {13});
    const Tensor w = random_tensor(rng, {7, 13});
    const Tensor b = random_tensor(rng, {7});
    for (Activation act : {Activation::kNone, Activation::kRelu}) {
      const Tensor got = dense_forward(x, w, b, act);
      const Tensor want = oracle::dense(x, w, b, act == Activation::kRelu);
      for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
    }
  }
}

TEST(Dense, FiniteDifferences) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    for (Activation act : {Activation::kNone, Activation::kRelu}) {
      Rng rng(400 + seed);
      Tensor x = random_tensor(rng, {6});
      Tensor wt = random_tensor(rng, {4, 6});
      Tensor b = random_tensor(rng, {4});
      const Tensor probe_w = random_tensor(rng, {4});
      const Tensor out = dense_forward(x, wt, b, act);
      const DenseGrads g = dense_backward(x, wt, out, probe_w, act);
      auto f = [&] { return probe(dense_forward(x, wt, b, act), probe_w); };
      EXPECT_LT(compare(g.input, numeric_gradient(f, x)).max_relative_error, kGradTol);
      EXPECT_LT(compare(g.weights, numeric_gradient(f, wt)).max_relative_error, kGradTol);
      EXPECT_LT(compare(g.bias, numeric_gradient(f, b)).max_relative_error, kGradTol);
    }
  }
}

TEST(Dropout, ZeroProbabilityAndInferenceAreIdentity) {
  Rng rng(6);
  const Tensor x = random_tensor(rng, {50});
  EXPECT_EQ(dropout_apply(x, 0.0, rng, true).output, x);
  EXPECT_EQ(dropout_apply(x, 0.0, rng, false).output, x);
  const std::uint64_t before = rng.seed_state();
  const DropoutResult r = dropout_apply(x, 0.5, rng, false);
  EXPECT_EQ(r.output, x);
  EXPECT_EQ(rng.seed_state(), before);
  for (double m : r.mask.mask.values()) EXPECT_EQ(m, 1.0);
}

TEST(Dropout, RejectsBadProbability) {
  Rng rng(0);
  EXPECT_THROW(dropout_apply(Tensor({3}), 1.0, rng, true), ConfigError);
  EXPECT_THROW(dropout_apply(Tensor({3}), -0.1, rng, true), ConfigError);
  EXPECT_THROW(LayerSpec::dropout("d", 1.0), ConfigError);
}

TEST(Dropout, MaskValuesAndSurvivorFraction) {
  Rng rng(7);
  const std::size_t n = 100000;
  const Tensor x = Tensor::full({n}, 1.0);
  const DropoutResult r = dropout_apply(x, 0.5, rng, true);
  std::size_t survivors = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = r.mask.mask[i];
    ASSERT_TRUE(m == 0.0 || m == 2.0);
    survivors += m != 0.0;
    total += r.output[i];
  }
  const double frac = static_cast<double>(survivors) / n;
  EXPECT_LT(std::abs(frac - 0.5), 3.0 * std::sqrt(0.25 / n));
  EXPECT_LT(std::abs(total / n - 1.0), 0.02);
}

TEST(Dropout, PreservesExpectationOverManyMasks) {
  Rng rng(8);
  const Tensor x = random_tensor(rng, {20}, 0.5, 1.5);
  Tensor mean({20});
  const int masks = 10000;
  for (int m = 0; m < masks; ++m) add_in_place(mean, dropout_apply(x, 0.25, rng, true).output);
  double deviation = 0.0;
  for (std::size_t i = 0; i < 20; ++i) deviation += std::abs(mean[i] / masks - x[i]) / x[i];
  EXPECT_LT(deviation / 20.0, 0.02);
}

TEST(Dropout, FixedMaskFiniteDifferences) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(500 + seed);
    Tensor x = random_tensor(rng, {15});
    const Tensor w = random_tensor(rng, {15});
    const std::uint64_t mask_seed = rng.next_u64();
    Rng mask_rng(mask_seed);
    const DropoutResult r = dropout_apply(x, 0.4, mask_rng, true);
    const Tensor g = dropout_backward(r.mask, w);
    auto f = [&] {
      Rng replay(mask_seed);
      return probe(dropout_apply(x, 0.4, replay, true).output, w);
    };
    EXPECT_LT(compare(g, numeric_gradient(f, x)).max_relative_error, kGradTol);
  }
}

TEST(MergeMul, NeutralAndAnnihilating) {
  Rng rng(9);
  const Tensor a = random_tensor(rng, {64});
  EXPECT_EQ(merge_mul_forward(a, Tensor::full({64}, 1.0)), a);
  EXPECT_EQ(merge_mul_forward(a, Tensor({64})), Tensor({64}));
  EXPECT_THROW(merge_mul_forward(a, Tensor({32})), DimensionError);
}

TEST(MergeMul, FiniteDifferences) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(600 + seed);
    Tensor a = random_tensor(rng, {64});
    Tensor b = random_tensor(rng, {64});
    const Tensor w = random_tensor(rng, {64});
    const MergeGrads g = merge_mul_backward(a, b, w);
    auto f = [&] { return probe(merge_mul_forward(a, b), w); };
    // The probe is linear in each operand, so a wide step adds no truncation
    // error and keeps roundoff below the 1e-8 bound.
    EXPECT_LT(compare(g.a, numeric_gradient(f, a, 1e-1)).max_relative_error, 1e-8);
    EXPECT_LT(compare(g.b, numeric_gradient(f, b, 1e-1)).max_relative_error, 1e-8);
  }
}

TEST(Softmax, KnownValues) {
  const Tensor u = softmax(Tensor({4}));
  for (double v : u.values()) EXPECT_EQ(v, 0.25);
  const Tensor p = softmax(Tensor::vector({1, 2, 3, 4}));
  // High-precision evaluation of exp(k) / sum exp(j).
  const double want[] = {0.0320586032800850, 0.0871443187420326, 0.236882818089910,
                         0.643914259887972};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(p[k], want[k], 1e-5);
}

TEST(Softmax, ShiftInvariantAndOverflowSafe) {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor x = random_tensor(rng, {5}, -5, 5);
    const Tensor shifted = add(x, Tensor::full({5}, rng.uniform(-50, 50)));
    const Tensor p = softmax(x), q = softmax(shifted);
    double total = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      EXPECT_NEAR(p[k], q[k], 1e-12);
      EXPECT_GE(p[k], 0.0);
      total += p[k];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_EQ(argmax(p), argmax(x));
  }
  const Tensor big = softmax(Tensor::vector({1000, 1001}));
  EXPECT_TRUE(std::isfinite(big[0]) && std::isfinite(big[1]));
}

TEST(Softmax, FiniteDifferences) {
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(700 + seed);
    Tensor x = random_tensor(rng, {4}, -2, 2);
    const Tensor w = random_tensor(rng, {4});
    const Tensor g = softmax_backward(softmax(x), w);
    auto f = [&] { return probe(softmax(x), w); };
    EXPECT_LT(compare(g, numeric_gradient(f, x)).max_relative_error, kGradTol);
  }
}

TEST(LayerSpec, ValidatesHyperparameters) {
  EXPECT_THROW(LayerSpec::conv2d("c", 0, 1, 1), ConfigError);
  EXPECT_THROW(LayerSpec::dense("d", 0, 3, Activation::kNone), ConfigError);
  EXPECT_THROW(LayerSpec::lstm("l", 3, 0, false), ConfigError);
  EXPECT_NO_THROW(LayerSpec::dropout("d", 0.0));
}

}  // namespace
}  // namespace hcrn
