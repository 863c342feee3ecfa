#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hcrn/kernels.hpp"
#include "hcrn/rng.hpp"

namespace hcrn::kernels {
namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

std::vector<const KernelTable*> simd_tables() {
  std::vector<const KernelTable*> out;
  for (Backend b : {Backend::kAvx2, Backend::kNeon}) {
    if (auto t = table_for(b)) out.push_back(*t);
  }
  return out;
}

// Lengths straddle every vector width and remainder path.
constexpr std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 130, 1001};

TEST(Kernels, ActiveTableIsUsable) {
  const KernelTable& t = active();
  ASSERT_NE(t.name, nullptr);
  std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  EXPECT_EQ(t.dot(a.data(), b.data(), 3), 32.0);
}

TEST(Kernels, SelectRoundTrip) {
  const KernelTable* before = &active();
  ASSERT_TRUE(select(Backend::kScalar));
  EXPECT_STREQ(active().name, "scalar");
  for (Backend b : {Backend::kAvx2, Backend::kNeon, Backend::kScalar}) {
    if (auto t = table_for(b); t && *t == before) select(b);
  }
  EXPECT_EQ(&active(), before);
  EXPECT_EQ(parse_backend("avx2"), Backend::kAvx2);
  EXPECT_FALSE(parse_backend("sse9").has_value());
}

TEST(Kernels, SimdElementwiseIsBitExact) {
  const KernelTable& ref = scalar_table();
  auto tables = simd_tables();
  if (tables.empty()) GTEST_SKIP() << "no SIMD backend on this host";
  Rng rng(17);
  for (const KernelTable* t : tables) {
    for (std::size_t n : kLengths) {
      const auto a = random_vector(rng, n), b = random_vector(rng, n);
      std::vector<double> want(n), got(n);
      ref.add(a.data(), b.data(), want.data(), n);
      t->add(a.data(), b.data(), got.data(), n);
      ASSERT_EQ(got, want) << t->name << " add n=" << n;
      ref.sub(a.data(), b.data(), want.data(), n);
      t->sub(a.data(), b.data(), got.data(), n);
      ASSERT_EQ(got, want) << t->name << " sub n=" << n;
      ref.mul(a.data(), b.data(), want.data(), n);
      t->mul(a.data(), b.data(), got.data(), n);
      ASSERT_EQ(got, want) << t->name << " mul n=" << n;

      want = b;
      got = b;
      ref.axpy(0.37, a.data(), want.data(), n);
      t->axpy(0.37, a.data(), got.data(), n);
      ASSERT_EQ(got, want) << t->name << " axpy n=" << n;

      want = a;
      got = a;
      ref.scale(-1.5, want.data(), n);
      t->scale(-1.5, got.data(), n);
      ASSERT_EQ(got, want) << t->name << " scale n=" << n;
    }
  }
}

TEST(Kernels, SimdAdadeltaIsBitExact) {
  auto tables = simd_tables();
  if (tables.empty()) GTEST_SKIP() << "no SIMD backend on this host";
  Rng rng(23);
  for (const KernelTable* t : tables) {
    for (std::size_t n : kLengths) {
      auto p_ref = random_vector(rng, n);
      auto p_simd = p_ref;
      std::vector<double> e1(n, 0.0), d1(n, 0.0), e2(n, 0.0), d2(n, 0.0);
      for (int step = 0; step < 25; ++step) {
        const auto g = random_vector(rng, n);
        scalar_table().adadelta(p_ref.data(), g.data(), e1.data(), d1.data(), n, 0.95, 1e-6, 1.0);
        t->adadelta(p_simd.data(), g.data(), e2.data(), d2.data(), n, 0.95, 1e-6, 1.0);
      }
      ASSERT_EQ(p_simd, p_ref) << t->name << " n=" << n;
      ASSERT_EQ(e2, e1);
      ASSERT_EQ(d2, d1);
    }
  }
}

TEST(Kernels, SimdDotAgreesToRounding) {
  auto tables = simd_tables();
  if (tables.empty()) GTEST_SKIP() << "no SIMD backend on this host";
  Rng rng(29);
  for (const KernelTable* t : tables) {
    for (std::size_t n : kLengths) {
      const auto a = random_vector(rng, n), b = random_vector(rng, n);
      double magnitude = 0.0;
      for (std::size_t i = 0; i < n; ++i) magnitude += std::abs(a[i] * b[i]);
      const double want = scalar_table().dot(a.data(), b.data(), n);
      const double got = t->dot(a.data(), b.data(), n);
      ASSERT_LE(std::abs(got - want), 1e-14 * (magnitude + 1.0)) << t->name << " n=" << n;
    }
  }
}

}  // namespace
}  // namespace hcrn::kernels
