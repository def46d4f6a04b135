#include <cstdlib>
#include <string_view>

#include "lorentz/error.hpp"
#include "lorentz/kernels.hpp"

namespace lorentz::kernels {

#if defined(LORENTZ_HAVE_AVX2)
const KernelTable& avx2_kernels_unchecked();
#endif

const KernelTable* avx2_kernels() {
#if defined(LORENTZ_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_kernels_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("LORENTZ_LAB_KERNEL");
    const std::string_view want = env ? env : "auto";
    if (want == "scalar") return &scalar_kernels();
    if (want == "avx2") {
      if (const auto* k = avx2_kernels()) return k;
      throw ConfigError("LORENTZ_LAB_KERNEL=avx2 but AVX2 is unavailable");
    }
    if (want != "auto") throw ConfigError("unknown LORENTZ_LAB_KERNEL value");
    if (const auto* k = avx2_kernels()) return k;
    return &scalar_kernels();
  }();
  return *chosen;
}

}  // namespace lorentz::kernels
