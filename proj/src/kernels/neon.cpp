// AArch64 only; NEON is part of the base ISA there so no runtime probe.
#include <arm_neon.h>

#include <cmath>

#include "backends.hpp"

namespace hcrn::kernels::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void scale(double alpha, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), va));
  for (; i < n; ++i) x[i] *= alpha;
}

void adadelta(double* param, const double* grad, double* eg2, double* edx2,
              std::size_t n, double rho, double eps, double lr) {
  const double keep = 1.0 - rho;
  const float64x2_t vrho = vdupq_n_f64(rho);
  const float64x2_t vkeep = vdupq_n_f64(keep);
  const float64x2_t veps = vdupq_n_f64(eps);
  const float64x2_t vlr = vdupq_n_f64(lr);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t g = vld1q_f64(grad + i);
    const float64x2_t e = vaddq_f64(vmulq_f64(vrho, vld1q_f64(eg2 + i)),
                                    vmulq_f64(vkeep, vmulq_f64(g, g)));
    const float64x2_t ratio = vdivq_f64(vsqrtq_f64(vaddq_f64(vld1q_f64(edx2 + i), veps)),
                                        vsqrtq_f64(vaddq_f64(e, veps)));
    const float64x2_t delta = vmulq_f64(vnegq_f64(ratio), g);
    vst1q_f64(eg2 + i, e);
    vst1q_f64(edx2 + i, vaddq_f64(vmulq_f64(vrho, vld1q_f64(edx2 + i)),
                                  vmulq_f64(vkeep, vmulq_f64(delta, delta))));
    vst1q_f64(param + i, vaddq_f64(vld1q_f64(param + i), vmulq_f64(vlr, delta)));
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

const KernelTable& neon_table() {
  static const KernelTable table{"neon", dot, axpy, add, sub, mul, scale,
                                 adadelta};
  return table;
}

}  // namespace hcrn::kernels::detail
