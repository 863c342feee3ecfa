#include <gtest/gtest.h>

#include <cmath>

#include "hcrn/adadelta.hpp"
#include "hcrn/error.hpp"
#include "hcrn/layers.hpp"
#include "hcrn/loss.hpp"
#include "oracles/gradcheck.hpp"
#include "oracles/oracles.hpp"

namespace hcrn {
namespace {

using oracle::random_tensor;

Tensor onehot_rows(std::size_t classes, std::initializer_list<std::size_t> labels) {
  Tensor t({labels.size(), classes});
  std::size_t r = 0;
  for (std::size_t l : labels) t.at({r++, l}) = 1.0;
  return t;
}

Tensor softmax_rows(const Tensor& logits) {
  Tensor out(logits.shape());
  const std::size_t c = logits.extent(1);
  for (std::size_t r = 0; r < logits.extent(0); ++r) {
    const Tensor p = softmax(slice_leading(logits, r));
    std::copy(p.values().begin(), p.values().end(), out.data() + r * c);
  }
  return out;
}

TEST(CrossEntropy, CertainPredictionHasZeroLoss) {
  const LossReport r = cross_entropy(onehot_rows(4, {2}), onehot_rows(4, {2}));
  EXPECT_EQ(r.loss, 0.0);
  for (double g : r.grad_logits.values()) EXPECT_EQ(g, 0.0);
}

TEST(CrossEntropy, UniformIsLogC) {
  const LossReport r = cross_entropy(Tensor::full({1, 4}, 0.25), onehot_rows(4, {1}));
  EXPECT_NEAR(r.loss, 1.386294361119891, 1e-12);
}

TEST(CrossEntropy, ClampsZeroProbability) {
  const LossReport r = cross_entropy(onehot_rows(4, {0}), onehot_rows(4, {3}));
  EXPECT_NEAR(r.loss, -std::log(1e-12), 1e-9);
  EXPECT_TRUE(std::isfinite(r.loss));
}

TEST(CrossEntropy, MatchesScalarOracle) {
  Rng rng(12);
  const Tensor probs = softmax_rows(random_tensor(rng, {3, 4}, -2, 2));
  const Tensor labels = onehot_rows(4, {0, 3, 1});
  const LossReport r = cross_entropy(probs, labels);
  double want = 0.0;
  const std::size_t truth[] = {0, 3, 1};
  for (std::size_t row = 0; row < 3; ++row) want += -std::log(probs.at({row, truth[row]}));
  EXPECT_NEAR(r.loss, want / 3.0, 1e-12);
  for (std::size_t row = 0; row < 3; ++row)
    for (std::size_t k = 0; k < 4; ++k)
      EXPECT_NEAR(r.grad_logits.at({row, k}),
                  (probs.at({row, k}) - (k == truth[row] ? 1.0 : 0.0)) / 3.0, 1e-15);
}

TEST(CrossEntropy, MalformedLabelNamesRow) {
  Tensor labels = onehot_rows(4, {0, 1});
  labels.at({1, 2}) = 1.0;
  try {
    cross_entropy(Tensor::full({2, 4}, 0.25), labels);
    FAIL();
  } catch (const LabelError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
  Tensor empty_row({1, 4});
  EXPECT_THROW(cross_entropy(Tensor::full({1, 4}, 0.25), empty_row), LabelError);
}

TEST(CrossEntropy, FusedGradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(1000 + seed);
    Tensor logits = random_tensor(rng, {3, 4}, -2, 2);
    const Tensor labels = onehot_rows(4, {rng.below(4), rng.below(4), rng.below(4)});
    const LossReport r = cross_entropy(softmax_rows(logits), labels);
    auto f = [&] { return cross_entropy(softmax_rows(logits), labels).loss; };
    EXPECT_LT(gradcheck::compare(r.grad_logits, gradcheck::numeric_gradient(f, logits))
                  .max_relative_error,
              1e-6);
  }
}

TEST(Adadelta, FirstStepHandValue) {
  Tensor p = Tensor::vector({0.0});
  AdadeltaState s = AdadeltaState::fresh(p.shape());
  adadelta_step(p, Tensor::vector({1.0}), s);
  EXPECT_NEAR(s.eg2[0], 0.05, 1e-15);
  EXPECT_NEAR(p[0], -0.0044721, 1e-7);
}

TEST(Adadelta, ZeroGradientOnlyDecaysAccumulators) {
  Tensor p = Tensor::vector({1.0, -2.0});
  AdadeltaState s = AdadeltaState::fresh(p.shape());
  s.eg2 = Tensor::vector({0.4, 0.2});
  s.edx2 = Tensor::vector({0.1, 0.3});
  adadelta_step(p, Tensor({2}), s);
  EXPECT_EQ(p, Tensor::vector({1.0, -2.0}));
  EXPECT_NEAR(s.eg2[0], 0.95 * 0.4, 1e-16);
  EXPECT_NEAR(s.eg2[1], 0.95 * 0.2, 1e-16);
  EXPECT_NEAR(s.edx2[0], 0.95 * 0.1, 1e-16);
  EXPECT_NEAR(s.edx2[1], 0.95 * 0.3, 1e-16);
}

TEST(Adadelta, ShapeMismatch) {
  Tensor p({3});
  AdadeltaState s = AdadeltaState::fresh(p.shape());
  EXPECT_THROW(adadelta_step(p, Tensor({2}), s), DimensionError);
}

TEST(Adadelta, MatchesScalarOracleOverManySteps) {
  Rng rng(55);
  Tensor p = random_tensor(rng, {3});
  std::vector<double> q(p.values().begin(), p.values().end());
  AdadeltaState s = AdadeltaState::fresh(p.shape());
  oracle::AdadeltaScalar ref(3, 0.95, 1e-6, 1.0);
  for (int step = 0; step < 100; ++step) {
    const Tensor g = random_tensor(rng, {3});
    adadelta_step(p, g, s);
    ref.step(q, std::vector<double>(g.values().begin(), g.values().end()));
  }
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(p[i], q[i], 1e-12);
    EXPECT_NEAR(s.eg2[i], ref.eg2[i], 1e-12);
    EXPECT_NEAR(s.edx2[i], ref.edx2[i], 1e-12);
  }
}

TEST(Adadelta, UpdateOpposesGradientAndAccumulatorsStayNonnegative) {
  Rng rng(56);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor p = random_tensor(rng, {6});
    AdadeltaState s = AdadeltaState::fresh(p.shape());
    for (int step = 0; step < 40; ++step) {
      Tensor g = random_tensor(rng, {6}, -10, 10);
      if (step % 7 == 0) g[step % 6] = 0.0;
      const Tensor before = p;
      adadelta_step(p, g, s);
      for (std::size_t i = 0; i < 6; ++i) {
        const double d = p[i] - before[i];
        if (g[i] > 0) {
          ASSERT_LT(d, 0.0);
        } else if (g[i] < 0) {
          ASSERT_GT(d, 0.0);
        } else {
          ASSERT_EQ(d, 0.0);
        }
        ASSERT_GE(s.eg2[i], 0.0);
        ASSERT_GE(s.edx2[i], 0.0);
      }
    }
  }
}

TEST(Adadelta, StepSizeInvariantToGradientScale) {
  auto last_step = [](double g) {
    Tensor p({1});
    AdadeltaState s = AdadeltaState::fresh(p.shape(), {0.95, 1e-12, 1.0});
    double prev = 0.0, delta = 0.0;
    for (int step = 0; step < 200; ++step) {
      adadelta_step(p, Tensor::vector({g}), s);
      delta = p[0] - prev;
      prev = p[0];
    }
    return std::abs(delta);
  };
  const double small = last_step(0.01), large = last_step(10.0);
  EXPECT_LT(std::abs(small - large) / large, 0.01);
}

}  // namespace
}  // namespace hcrn
