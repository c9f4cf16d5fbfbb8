#pragma once

#include <cstddef>

// Data-parallel inner loops shared by the field and spectral code paths.
// Every operation has a scalar reference implementation and (on x86-64)
// an AVX2 variant; the active table is picked once at startup from CPU
// capabilities. Set VLAB_KERNELS=scalar|avx2 to force a table.
//
// Reductions use a fixed pairwise tree so results are reproducible from
// run to run for a given table, independent of field size alignment.

namespace vlab::kernels {

struct Ops {
    const char* name;

    // y[i] += a * x[i]
    void (*axpy)(double* y, const double* x, double a, std::size_t n);
    // x[i] *= a
    void (*scale)(double* x, double a, std::size_t n);
    // out[i] = a[i] * b[i]
    void (*mul)(double* out, const double* a, const double* b, std::size_t n);
    // out[i] = x[i] + a * y[i]
    void (*add_scaled)(double* out, const double* x, double a, const double* y,
                       std::size_t n);
    // acc[i] += x[i] * x[i]
    void (*add_sq)(double* acc, const double* x, std::size_t n);

    double (*sum)(const double* x, std::size_t n);
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*sum_sq)(const double* x, std::size_t n);
    double (*max_abs)(const double* x, std::size_t n);

    // Interleaved complex c[2i],c[2i+1] scaled by the real factor r[i].
    void (*complex_scale)(double* c, const double* r, std::size_t n);
    // sum_i w[i] * (c[2i]^2 + c[2i+1]^2)
    double (*complex_norm_weighted)(const double* c, const double* w,
                                    std::size_t n);
};

/// Table selected at startup (CPU detection + VLAB_KERNELS override).
const Ops& active();

/// Scalar reference table, always available.
const Ops& scalar_ops();

/// AVX2 table, or nullptr when unsupported by the build or the CPU.
const Ops* avx2_ops();

} // namespace vlab::kernels
