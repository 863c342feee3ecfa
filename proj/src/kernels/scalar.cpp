#include <cmath>

#include "hcrn/kernels.hpp"

namespace hcrn::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

// Operation order here is mirrored exactly by the SIMD backends.
void adadelta(double* param, const double* grad, double* eg2, double* edx2,
              std::size_t n, double rho, double eps, double lr) {
  const double keep = 1.0 - rho;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    const double e = rho * eg2[i] + keep * (g * g);
    const double delta = -(std::sqrt(edx2[i] + eps) / std::sqrt(e + eps)) * g;
    eg2[i] = e;
    edx2[i] = rho * edx2[i] + keep * (delta * delta);
    param[i] = param[i] + lr * delta;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", dot, axpy, add, sub, mul, scale,
                                 adadelta};
  return table;
}

}  // namespace hcrn::kernels
