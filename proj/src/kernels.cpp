#include "vlab/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

namespace vlab::kernels {

namespace {

constexpr std::size_t kLeaf = 64; // pairwise-reduction leaf size

void axpy_scalar(double* y, const double* x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double* x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void mul_scalar(double* out, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void add_scaled_scalar(double* out, const double* x, double a, const double* y,
                       std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + a * y[i];
}

void add_sq_scalar(double* acc, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i] * x[i];
}

template <class Leaf>
double pairwise(const Leaf& leaf, std::size_t begin, std::size_t n) {
    if (n <= kLeaf) return leaf(begin, n);
    const std::size_t half = n / 2;
    return pairwise(leaf, begin, half) + pairwise(leaf, begin + half, n - half);
}

double sum_scalar(const double* x, std::size_t n) {
    return pairwise(
        [x](std::size_t b, std::size_t m) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += x[b + i];
            return s;
        },
        0, n);
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    return pairwise(
        [x, y](std::size_t b, std::size_t m) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += x[b + i] * y[b + i];
            return s;
        },
        0, n);
}

double sum_sq_scalar(const double* x, std::size_t n) {
    return pairwise(
        [x](std::size_t b, std::size_t m) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += x[b + i] * x[b + i];
            return s;
        },
        0, n);
}

double max_abs_scalar(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

void complex_scale_scalar(double* c, const double* r, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        c[2 * i] *= r[i];
        c[2 * i + 1] *= r[i];
    }
}

double complex_norm_weighted_scalar(const double* c, const double* w,
                                    std::size_t n) {
    return pairwise(
        [c, w](std::size_t b, std::size_t m) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double re = c[2 * (b + i)];
                const double im = c[2 * (b + i) + 1];
                s += w[b + i] * (re * re + im * im);
            }
            return s;
        },
        0, n);
}

const Ops kScalarOps = {
    "scalar",
    axpy_scalar,
    scale_scalar,
    mul_scalar,
    add_scaled_scalar,
    add_sq_scalar,
    sum_scalar,
    dot_scalar,
    sum_sq_scalar,
    max_abs_scalar,
    complex_scale_scalar,
    complex_norm_weighted_scalar,
};

const Ops* select() {
    const Ops* avx2 = avx2_ops();
    if (const char* env = std::getenv("VLAB_KERNELS")) {
        const std::string want(env);
        if (want == "scalar") return &kScalarOps;
        if (want == "avx2" && avx2) return avx2;
        // Unknown or unavailable request: fall through to auto-detection.
    }
    return avx2 ? avx2 : &kScalarOps;
}

} // namespace

const Ops& scalar_ops() { return kScalarOps; }

#if defined(VLAB_WITH_AVX2)
const Ops* avx2_ops_table(); // defined in kernels_avx2.cpp
#endif

const Ops* avx2_ops() {
#if defined(VLAB_WITH_AVX2)
    if (__builtin_cpu_supports("avx2")) return avx2_ops_table();
#endif
    return nullptr;
}

const Ops& active() {
    static const Ops* ops = select();
    return *ops;
}

} // namespace vlab::kernels
