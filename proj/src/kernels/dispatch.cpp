#include "geoflow/error.hpp"
#include "geoflow/kernels.hpp"

#include <cstdlib>
#include <string>

namespace geoflow::kernels {
namespace {

bool cpu_supports(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
#if defined(GEOFLOW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& select() {
    if (const char* env = std::getenv("GEOFLOW_KERNELS")) {
        const std::string want(env);
        if (want == "scalar") return scalar::table;
#if defined(GEOFLOW_HAVE_AVX2)
        if (want == "avx2" && cpu_supports(Isa::Avx2)) return avx2::table;
#endif
    }
#if defined(GEOFLOW_HAVE_AVX2)
    if (cpu_supports(Isa::Avx2)) return avx2::table;
#endif
    return scalar::table;
}

}  // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

const KernelTable& active() {
    static const KernelTable& chosen = select();
    return chosen;
}

const KernelTable& table(Isa isa) {
    if (!cpu_supports(isa)) {
        throw Error(ErrorCode::InvalidParameter, "kernel ISA not available: " + std::string(to_string(isa)));
    }
#if defined(GEOFLOW_HAVE_AVX2)
    if (isa == Isa::Avx2) return avx2::table;
#endif
    return scalar::table;
}

std::vector<Isa> available() {
    std::vector<Isa> out{Isa::Scalar};
    if (cpu_supports(Isa::Avx2)) out.push_back(Isa::Avx2);
    return out;
}

}  // namespace geoflow::kernels
