#include "geoflow/kernels.hpp"

#include <cassert>

namespace geoflow::kernels::scalar {
namespace {

double sum_sq(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

double sum_sq_forward_diff(std::span<const double> a) {
    const std::size_t n = a.size();
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double d = a[(k + 3) % n] - a[k];
        s += d * d;
    }
    return s;
}

double sum_sq_forward_diff_of_difference(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const std::size_t n = a.size();
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t kn = (k + 3) % n;
        const double d = (a[kn] - b[kn]) - (a[k] - b[k]);
        s += d * d;
    }
    return s;
}

void second_difference(std::span<const double> a, std::span<double> out, double scale) {
    const std::size_t n = a.size();
    assert(out.size() == n);
    for (std::size_t k = 0; k < n; ++k) {
        const double next = a[(k + 3) % n];
        const double prev = a[(k + n - 3) % n];
        out[k] = scale * ((next - a[k]) - (a[k] - prev));
    }
}

void central_difference(std::span<const double> a, std::span<double> out, double scale) {
    const std::size_t n = a.size();
    assert(out.size() == n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = scale * (a[(k + 3) % n] - a[(k + n - 3) % n]);
    }
}

void axpy(std::span<const double> x, double alpha, std::span<const double> y, std::span<double> out) {
    assert(x.size() == y.size() && x.size() == out.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] + alpha * y[k];
}

}  // namespace

const KernelTable table{
    Isa::Scalar,
    &sum_sq,
    &sum_sq_diff,
    &sum_sq_forward_diff,
    &sum_sq_forward_diff_of_difference,
    &second_difference,
    &central_difference,
    &axpy,
};

}  // namespace geoflow::kernels::scalar
