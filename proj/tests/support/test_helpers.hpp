#pragma once

#include "vlab/field.hpp"
#include "vlab/grid.hpp"

#include <cmath>
#include <random>

namespace vlab::testing {

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// Smooth random field: seeded white noise pushed through a spectral
/// Gaussian lowpass, so derivatives are well resolved.
inline ScalarField random_smooth_field(const Grid& grid, std::uint64_t seed,
                                       double cutoff_fraction = 0.125) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ScalarField f(grid);
    for (std::size_t p = 0; p < f.size(); ++p) f[p] = normal(rng);
    Spectral ws(grid);
    const double k_cut = std::numbers::pi / grid.half_length() *
                         (grid.points_per_dim() * cutoff_fraction);
    ws.gaussian_lowpass(f, k_cut);
    return f;
}

inline VectorField random_smooth_vector(const Grid& grid, int m, std::uint64_t seed) {
    VectorField u(grid, m);
    for (int i = 0; i < m; ++i)
        u.component(i) = random_smooth_field(grid, seed + static_cast<std::uint64_t>(i));
    return u;
}

/// Radial Gaussian bump of the given width centered at a grid point, using
/// the torus metric so it wraps cleanly.
inline ScalarField gaussian_bump(const Grid& grid, const std::array<int, 3>& center,
                                 double width) {
    ScalarField f(grid);
    for (std::size_t p = 0; p < f.size(); ++p) {
        const double d = grid.torus_distance(p, center);
        f[p] = std::exp(-d * d / (width * width));
    }
    return f;
}

} // namespace vlab::testing
