// AVX2 variants. Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include "geoflow/kernels.hpp"

#include <immintrin.h>

#include <cassert>

namespace geoflow::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    const __m128d swapped = _mm_unpackhi_pd(pair, pair);
    return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

double sum_sq(std::span<const double> a) {
    const std::size_t n = a.size();
    const double* p = a.data();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        const __m256d v0 = _mm256_loadu_pd(p + k);
        const __m256d v1 = _mm256_loadu_pd(p + k + 4);
        acc0 = _mm256_fmadd_pd(v0, v0, acc0);
        acc1 = _mm256_fmadd_pd(v1, v1, acc1);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; k < n; ++k) s += p[k] * p[k];
    return s;
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const std::size_t n = a.size();
    const double* pa = a.data();
    const double* pb = b.data();
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pa + k), _mm256_loadu_pd(pb + k));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; k < n; ++k) {
        const double d = pa[k] - pb[k];
        s += d * d;
    }
    return s;
}

double sum_sq_forward_diff(std::span<const double> a) {
    const std::size_t n = a.size();
    if (n < 3) return 0.0;
    const double* p = a.data();
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    // k + 3 stays in range for k < n - 3; the last point wraps to the first.
    for (; k + 4 <= n - 3; k += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(p + k + 3), _mm256_loadu_pd(p + k));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; k < n; ++k) {
        const double d = p[(k + 3) % n] - p[k];
        s += d * d;
    }
    return s;
}

double sum_sq_forward_diff_of_difference(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const std::size_t n = a.size();
    if (n < 3) return 0.0;
    const double* pa = a.data();
    const double* pb = b.data();
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n - 3; k += 4) {
        const __m256d next = _mm256_sub_pd(_mm256_loadu_pd(pa + k + 3), _mm256_loadu_pd(pb + k + 3));
        const __m256d cur = _mm256_sub_pd(_mm256_loadu_pd(pa + k), _mm256_loadu_pd(pb + k));
        const __m256d d = _mm256_sub_pd(next, cur);
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; k < n; ++k) {
        const std::size_t kn = (k + 3) % n;
        const double d = (pa[kn] - pb[kn]) - (pa[k] - pb[k]);
        s += d * d;
    }
    return s;
}

// Elementwise kernels avoid FMA so they round exactly like the scalar reference.

void second_difference(std::span<const double> a, std::span<double> out, double scale) {
    const std::size_t n = a.size();
    assert(out.size() == n);
    if (n < 3) return;
    const double* p = a.data();
    double* o = out.data();
    auto edge = [&](std::size_t k) {
        const double next = p[(k + 3) % n];
        const double prev = p[(k + n - 3) % n];
        o[k] = scale * ((next - p[k]) - (p[k] - prev));
    };
    for (std::size_t k = 0; k < 3 && k < n; ++k) edge(k);
    const __m256d vs = _mm256_set1_pd(scale);
    std::size_t k = 3;
    for (; k + 4 <= n - 3; k += 4) {
        const __m256d c = _mm256_loadu_pd(p + k);
        const __m256d next = _mm256_loadu_pd(p + k + 3);
        const __m256d prev = _mm256_loadu_pd(p + k - 3);
        const __m256d d = _mm256_sub_pd(_mm256_sub_pd(next, c), _mm256_sub_pd(c, prev));
        _mm256_storeu_pd(o + k, _mm256_mul_pd(vs, d));
    }
    for (; k < n; ++k) edge(k);
}

void central_difference(std::span<const double> a, std::span<double> out, double scale) {
    const std::size_t n = a.size();
    assert(out.size() == n);
    if (n < 3) return;
    const double* p = a.data();
    double* o = out.data();
    auto edge = [&](std::size_t k) { o[k] = scale * (p[(k + 3) % n] - p[(k + n - 3) % n]); };
    for (std::size_t k = 0; k < 3 && k < n; ++k) edge(k);
    const __m256d vs = _mm256_set1_pd(scale);
    std::size_t k = 3;
    for (; k + 4 <= n - 3; k += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(p + k + 3), _mm256_loadu_pd(p + k - 3));
        _mm256_storeu_pd(o + k, _mm256_mul_pd(vs, d));
    }
    for (; k < n; ++k) edge(k);
}

void axpy(std::span<const double> x, double alpha, std::span<const double> y, std::span<double> out) {
    assert(x.size() == y.size() && x.size() == out.size());
    const std::size_t n = x.size();
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(y.data() + k));
        _mm256_storeu_pd(out.data() + k, _mm256_add_pd(_mm256_loadu_pd(x.data() + k), prod));
    }
    for (; k < n; ++k) out[k] = x[k] + alpha * y[k];
}

}  // namespace

const KernelTable table{
    Isa::Avx2,
    &sum_sq,
    &sum_sq_diff,
    &sum_sq_forward_diff,
    &sum_sq_forward_diff_of_difference,
    &second_difference,
    &central_difference,
    &axpy,
};

}  // namespace geoflow::kernels::avx2
