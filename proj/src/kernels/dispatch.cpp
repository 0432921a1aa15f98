#include <cstdlib>
#include <string>

#include "occm/kernels.hpp"

namespace occm::kernels {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(OCCM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& table(Isa isa) {
#if defined(OCCM_HAVE_AVX2)
  if (isa == Isa::avx2 && isa_available(Isa::avx2)) return detail::avx2_table();
#endif
  (void)isa;
  return detail::scalar_table();
}

namespace {
Isa detect() {
  if (const char* env = std::getenv("OCCM_SIMD")) {
    if (std::string(env) == "scalar") return Isa::scalar;
  }
  return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}
}  // namespace

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

}  // namespace occm::kernels
