#pragma once

// Data-parallel inner loops over flat coordinate arrays.
//
// A loop of N points in R^3 is stored as 3N interleaved doubles
// (x0 y0 z0 x1 y1 z1 ...). "Periodic stride-3" kernels treat index k+3 of the
// last point as index k of the first one, i.e. they act on the closed curve.
//
// Every kernel has a scalar reference implementation. Vector variants are
// selected once at runtime and must agree with the reference: elementwise
// kernels bit-for-bit, reductions to a few ulps (summation order differs).

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace geoflow::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
    Isa isa;

    /// sum_k a[k]^2
    double (*sum_sq)(std::span<const double> a);
    /// sum_k (a[k] - b[k])^2
    double (*sum_sq_diff)(std::span<const double> a, std::span<const double> b);
    /// sum_k (a[k+3] - a[k])^2, periodic stride-3
    double (*sum_sq_forward_diff)(std::span<const double> a);
    /// sum_k ((a-b)[k+3] - (a-b)[k])^2, periodic stride-3
    double (*sum_sq_forward_diff_of_difference)(std::span<const double> a, std::span<const double> b);
    /// out[k] = scale * (a[k+3] - 2 a[k] + a[k-3]), periodic stride-3
    void (*second_difference)(std::span<const double> a, std::span<double> out, double scale);
    /// out[k] = scale * (a[k+3] - a[k-3]), periodic stride-3
    void (*central_difference)(std::span<const double> a, std::span<double> out, double scale);
    /// out[k] = x[k] + alpha * y[k]
    void (*axpy)(std::span<const double> x, double alpha, std::span<const double> y, std::span<double> out);
};

/// Kernels used by the library. Chosen on first call from GEOFLOW_KERNELS
/// (`scalar` or `avx2`) if set and supported, otherwise the widest ISA the CPU reports.
const KernelTable& active();

/// Table for a specific ISA; throws geoflow::Error if it is not available here.
const KernelTable& table(Isa isa);

/// ISAs compiled in and supported by the running CPU. Always contains Scalar.
std::vector<Isa> available();

namespace scalar {
extern const KernelTable table;
}

#if defined(GEOFLOW_HAVE_AVX2)
namespace avx2 {
extern const KernelTable table;
}
#endif

}  // namespace geoflow::kernels
