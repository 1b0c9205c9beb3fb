#include <atomic>
#include <cstdlib>
#include <string>

#include "larche/kernels.hpp"

namespace larche::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* pick_default() {
  if (const char* env = std::getenv("LARCHE_SIMD")) {
    if (std::string(env) == "scalar") return &detail::kScalarTable;
  }
  if (const Table* t = avx2()) return t;
  return &detail::kScalarTable;
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> t{pick_default()};
  return t;
}

}  // namespace

const Table& scalar() { return detail::kScalarTable; }

const Table* avx2() {
  static const bool ok = cpu_has_avx2();
  return ok ? detail::avx2_table() : nullptr;
}

const Table& active() { return *current().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  if (name == "scalar") {
    current().store(&detail::kScalarTable, std::memory_order_release);
    return true;
  }
  if (name == "avx2") {
    if (const Table* t = avx2()) {
      current().store(t, std::memory_order_release);
      return true;
    }
  }
  return false;
}

}  // namespace larche::kernels
