// AVX2 kernel variants. This translation unit is compiled with -mavx2 and
// must only be reached through the runtime dispatch in kernels.cpp.

#include "vlab/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace vlab::kernels {

namespace {

constexpr std::size_t kLeaf = 64;

void axpy_avx2(double* y, const double* x, double a, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        __m256d vx = _mm256_loadu_pd(x + i);
        vy = _mm256_add_pd(vy, _mm256_mul_pd(va, vx));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double* x, double a, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void mul_avx2(double* out, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void add_scaled_avx2(double* out, const double* x, double a, const double* y,
                     std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_add_pd(
            _mm256_loadu_pd(x + i),
            _mm256_mul_pd(va, _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(out + i, v);
    }
    for (; i < n; ++i) out[i] = x[i] + a * y[i];
}

void add_sq_avx2(double* acc, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        __m256d va = _mm256_loadu_pd(acc + i);
        _mm256_storeu_pd(acc + i, _mm256_add_pd(va, _mm256_mul_pd(vx, vx)));
    }
    for (; i < n; ++i) acc[i] += x[i] * x[i];
}

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

template <class Leaf>
double pairwise(const Leaf& leaf, std::size_t begin, std::size_t n) {
    if (n <= kLeaf) return leaf(begin, n);
    const std::size_t half = n / 2;
    return pairwise(leaf, begin, half) + pairwise(leaf, begin + half, n - half);
}

double sum_avx2(const double* x, std::size_t n) {
    return pairwise(
        [x](std::size_t b, std::size_t m) {
            __m256d acc = _mm256_setzero_pd();
            std::size_t i = 0;
            for (; i + 4 <= m; i += 4)
                acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + b + i));
            double s = hsum(acc);
            for (; i < m; ++i) s += x[b + i];
            return s;
        },
        0, n);
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    return pairwise(
        [x, y](std::size_t b, std::size_t m) {
            __m256d acc = _mm256_setzero_pd();
            std::size_t i = 0;
            for (; i + 4 <= m; i += 4)
                acc = _mm256_add_pd(acc,
                                    _mm256_mul_pd(_mm256_loadu_pd(x + b + i),
                                                  _mm256_loadu_pd(y + b + i)));
            double s = hsum(acc);
            for (; i < m; ++i) s += x[b + i] * y[b + i];
            return s;
        },
        0, n);
}

double sum_sq_avx2(const double* x, std::size_t n) {
    return dot_avx2(x, x, n);
}

double max_abs_avx2(const double* x, std::size_t n) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d vmax = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        vmax = _mm256_max_pd(vmax,
                             _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(x + i)));
    double m = 0.0;
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vmax);
    for (double v : lanes) m = std::max(m, v);
    for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

void complex_scale_avx2(double* c, const double* r, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        // Two complex values <-> four doubles; duplicate r pairwise.
        __m128d rr = _mm_loadu_pd(r + i);
        __m256d factor = _mm256_permute4x64_pd(_mm256_castpd128_pd256(rr),
                                               0b01010000);
        __m256d v = _mm256_loadu_pd(c + 2 * i);
        _mm256_storeu_pd(c + 2 * i, _mm256_mul_pd(v, factor));
    }
    for (; i < n; ++i) {
        c[2 * i] *= r[i];
        c[2 * i + 1] *= r[i];
    }
}

double complex_norm_weighted_avx2(const double* c, const double* w,
                                  std::size_t n) {
    return pairwise(
        [c, w](std::size_t b, std::size_t m) {
            double s = 0.0;
            std::size_t i = 0;
            for (; i + 2 <= m; i += 2) {
                __m256d v = _mm256_loadu_pd(c + 2 * (b + i));
                __m256d sq = _mm256_mul_pd(v, v);
                // sq = [re0^2, im0^2, re1^2, im1^2]
                __m128d lo = _mm256_castpd256_pd128(sq);
                __m128d hi = _mm256_extractf128_pd(sq, 1);
                const double n0 = _mm_cvtsd_f64(lo) +
                                  _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
                const double n1 = _mm_cvtsd_f64(hi) +
                                  _mm_cvtsd_f64(_mm_unpackhi_pd(hi, hi));
                s += w[b + i] * n0 + w[b + i + 1] * n1;
            }
            for (; i < m; ++i) {
                const double re = c[2 * (b + i)];
                const double im = c[2 * (b + i) + 1];
                s += w[b + i] * (re * re + im * im);
            }
            return s;
        },
        0, n);
}

const Ops kAvx2Ops = {
    "avx2",
    axpy_avx2,
    scale_avx2,
    mul_avx2,
    add_scaled_avx2,
    add_sq_avx2,
    sum_avx2,
    dot_avx2,
    sum_sq_avx2,
    max_abs_avx2,
    complex_scale_avx2,
    complex_norm_weighted_avx2,
};

} // namespace

const Ops* avx2_ops_table() { return &kAvx2Ops; }

} // namespace vlab::kernels
