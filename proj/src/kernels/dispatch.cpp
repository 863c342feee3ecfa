#include <atomic>
#include <cstdlib>
#include <string>

#include "backends.hpp"

namespace hcrn::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(HCRN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const char* forced = std::getenv("HCRN_KERNELS");
  if (forced != nullptr) {
    if (auto backend = parse_backend(forced)) {
      if (auto table = table_for(*backend)) return *table;
    }
  }
#if defined(HCRN_HAVE_NEON)
  return &detail::neon_table();
#else
  if (cpu_has_avx2()) return *table_for(Backend::kAvx2);
  return &scalar_table();
#endif
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

std::optional<const KernelTable*> table_for(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return &scalar_table();
    case Backend::kAvx2:
#if defined(HCRN_HAVE_AVX2)
      if (cpu_has_avx2()) return &detail::avx2_table();
#endif
      return std::nullopt;
    case Backend::kNeon:
#if defined(HCRN_HAVE_NEON)
      return &detail::neon_table();
#else
      return std::nullopt;
#endif
  }
  return std::nullopt;
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

bool select(Backend backend) {
  auto table = table_for(backend);
  if (!table) return false;
  active_slot().store(*table, std::memory_order_release);
  return true;
}

std::optional<Backend> parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::kScalar;
  if (name == "avx2") return Backend::kAvx2;
  if (name == "neon") return Backend::kNeon;
  return std::nullopt;
}

}  // namespace hcrn::kernels
