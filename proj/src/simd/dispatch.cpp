#include <cstdlib>
#include <string_view>

#include "tdho/simd/kernels.hpp"

namespace tdho::simd {

#if defined(TDHO_BUILD_AVX2)
namespace detail {
const Kernels& avx2_table();
}
#endif

const Kernels* avx2_kernels() {
#if defined(TDHO_BUILD_AVX2)
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") != 0;
    }();
    return supported ? &detail::avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const Kernels& active_kernels() {
    static const Kernels* chosen = [] {
        if (const char* env = std::getenv("TDHO_SIMD"); env && std::string_view(env) == "scalar") {
            return &scalar_kernels();
        }
        if (const Kernels* k = avx2_kernels()) return k;
        return &scalar_kernels();
    }();
    return *chosen;
}

}  // namespace tdho::simd
