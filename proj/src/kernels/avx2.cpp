// Compiled with -mavx2 and -ffp-contract=off; only reached after a runtime
// CPU check.
#include <immintrin.h>

#include <cmath>

#include "backends.hpp"

namespace hcrn::kernels::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                             _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4),
                                             _mm256_loadu_pd(b + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                             _mm256_loadu_pd(b + i)));
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc0);
  const __m128d hi = _mm256_extractf128_pd(acc0, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  double acc = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i,
                     _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

template <typename VecOp, typename ScalarOp>
void binary(const double* a, const double* b, double* out, std::size_t n,
            VecOp vop, ScalarOp sop) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, vop(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = sop(a[i], b[i]);
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_add_pd(x, y); },
         [](double x, double y) { return x + y; });
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_sub_pd(x, y); },
         [](double x, double y) { return x - y; });
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_mul_pd(x, y); },
         [](double x, double y) { return x * y; });
}

void scale(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

void adadelta(double* param, const double* grad, double* eg2, double* edx2,
              std::size_t n, double rho, double eps, double lr) {
  const double keep = 1.0 - rho;
  const __m256d vrho = _mm256_set1_pd(rho);
  const __m256d vkeep = _mm256_set1_pd(keep);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    const __m256d e = _mm256_add_pd(_mm256_mul_pd(vrho, _mm256_loadu_pd(eg2 + i)),
                                    _mm256_mul_pd(vkeep, _mm256_mul_pd(g, g)));
    const __m256d ratio =
        _mm256_div_pd(_mm256_sqrt_pd(_mm256_add_pd(_mm256_loadu_pd(edx2 + i), veps)),
                      _mm256_sqrt_pd(_mm256_add_pd(e, veps)));
    const __m256d delta = _mm256_mul_pd(_mm256_xor_pd(ratio, sign), g);
    _mm256_storeu_pd(eg2 + i, e);
    _mm256_storeu_pd(
        edx2 + i,
        _mm256_add_pd(_mm256_mul_pd(vrho, _mm256_loadu_pd(edx2 + i)),
                      _mm256_mul_pd(vkeep, _mm256_mul_pd(delta, delta))));
    _mm256_storeu_pd(param + i, _mm256_add_pd(_mm256_loadu_pd(param + i),
                                              _mm256_mul_pd(vlr, delta)));
  }
  for (; i < n; ++i) {
    const double g = grad[i];
    const double e = rho * eg2[i] + keep * (g * g);
    const double delta = -(std::sqrt(edx2[i] + eps) / std::sqrt(e + eps)) * g;
    eg2[i] = e;
    edx2[i] = rho * edx2[i] + keep * (delta * delta);
    param[i] = param[i] + lr * delta;
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", dot, axpy, add, sub, mul, scale,
                                 adadelta};
  return table;
}

}  // namespace hcrn::kernels::detail
