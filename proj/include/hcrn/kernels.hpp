#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace hcrn::kernels {

/// Inner-loop primitives every layer is written against. Each backend fills
/// one table; the active table is chosen once at startup from CPU features
/// and the HCRN_KERNELS environment variable ("scalar", "avx2", "neon").
///
/// Elementwise entries (axpy, add, sub, mul, scale, adadelta) produce results
/// bit-identical to the scalar backend. dot reassociates its sum and agrees
/// with the scalar backend to rounding.
struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  /// x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  /// One Adadelta update over n parameters; see loss-optim for the rule.
  void (*adadelta)(double* param, const double* grad, double* eg2,
                   double* edx2, std::size_t n, double rho, double eps,
                   double lr);
};

enum class Backend { kScalar, kAvx2, kNeon };

const KernelTable& scalar_table();

/// Backend table if it was compiled in and the CPU supports it.
std::optional<const KernelTable*> table_for(Backend backend);

/// The table used by every layer.
const KernelTable& active();

/// Forces a backend. Returns false (and changes nothing) when unavailable.
bool select(Backend backend);

std::optional<Backend> parse_backend(std::string_view name);

}  // namespace hcrn::kernels
