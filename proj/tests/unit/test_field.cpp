#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_helpers.hpp"
#include "vlab/field.hpp"

#include <cmath>
#include <numbers>

using namespace vlab;
using vlab::testing::gaussian_bump;
using vlab::testing::random_smooth_vector;
using vlab::testing::rel_err;

TEST_CASE("mass: zero, constants, additivity over components") {
    const Grid g = Grid::make(1, 64, 4.0);

    VectorField zero(g, 2);
    CHECK(mass(zero) == 0.0);

    const double a = 0.7;
    VectorField constant(g, 2);
    for (int i = 0; i < 2; ++i)
        for (std::size_t p = 0; p < g.total_points(); ++p) constant.component(i)[p] = a;
    CHECK(mass(constant) == doctest::Approx(2.0 * a * a * 2.0 * g.half_length()));

    const auto u = random_smooth_vector(g, 2, 5);
    const double sum = integrate_sq(u.component(0)) + integrate_sq(u.component(1));
    CHECK(rel_err(mass(u), sum) < 1e-13);
}

TEST_CASE("project_mass contracts") {
    const Grid g = Grid::make(1, 64, 4.0);
    auto u = random_smooth_vector(g, 2, 9);

    const double c = 1.5;
    auto v = project_mass(u, c);
    CHECK(rel_err(mass(v), c * c) < 1e-12);

    // Already on the sphere: the scale factor is 1 and values are unchanged.
    auto w = project_mass(v, c);
    for (int i = 0; i < 2; ++i)
        for (std::size_t p = 0; p < g.total_points(); ++p)
            CHECK(w.component(i)[p] == doctest::Approx(v.component(i)[p]).epsilon(1e-14));

    // mass(u) = 1, c = 2 doubles the field.
    auto unit = project_mass(u, 1.0);
    auto doubled = project_mass(unit, 2.0);
    for (std::size_t p = 0; p < g.total_points(); ++p)
        CHECK(doubled.component(0)[p] ==
              doctest::Approx(2.0 * unit.component(0)[p]).epsilon(1e-13));
    CHECK(mass(doubled) == doctest::Approx(4.0).epsilon(1e-12));

    // Idempotence is exact: the second projection sees mass c^2 and scales by
    // a factor that is 1 to the last ulp.
    auto once = project_mass(u, c);
    auto twice = project_mass(once, c);
    for (std::size_t p = 0; p < g.total_points(); ++p)
        CHECK(std::abs(twice.component(0)[p] - once.component(0)[p]) <=
              1e-15 * std::abs(once.component(0)[p]));

    VectorField zero(g, 1);
    CHECK_THROWS_AS(project_mass(zero, 1.0), std::invalid_argument);
}

TEST_CASE("dilate: identity, Gaussian closed form, mass preservation") {
    const Grid g = Grid::make(1, 512, 16.0);
    auto gauss = ScalarField::sample(
        g, [](const std::array<double, 3>& x) { return std::exp(-x[0] * x[0]); });
    VectorField u(g, {std::vector<ScalarField>{gauss}});

    auto same = dilate(u, 1.0);
    for (std::size_t p = 0; p < g.total_points(); ++p)
        CHECK(same.component(0)[p] == doctest::Approx(u.component(0)[p]).epsilon(1e-12));

    // lambda = 2: sqrt(2) e^{-4x^2} pointwise in the bulk. The interpolant of
    // u is 2L-periodic, so u(2x) carries images with period 2L/lambda = L and
    // the closed form near the box edge is the wrapped sum.
    auto half = dilate(u, 2.0);
    for (std::size_t p = 0; p < g.total_points(); ++p) {
        const double x = g.point(p)[0];
        double expected = 0.0;
        for (int z = -1; z <= 1; ++z) {
            const double xx = x - g.half_length() * z;
            expected += std::sqrt(2.0) * std::exp(-4.0 * xx * xx);
        }
        CHECK(std::abs(half.component(0)[p] - expected) < 1e-8);
        if (std::abs(x) <= 0.5 * g.half_length())
            CHECK(std::abs(half.component(0)[p] -
                           std::sqrt(2.0) * std::exp(-4.0 * x * x)) < 1e-8);
    }

    for (double lambda : {0.5, 0.75, 1.25, 1.5}) {
        auto d = dilate(u, lambda);
        CHECK(rel_err(mass(d), mass(u)) < 1e-6);
    }

    // Round trip within interpolation tolerance.
    auto round = dilate(dilate(u, 1.7), 1.0 / 1.7);
    for (std::size_t p = 0; p < g.total_points(); ++p)
        CHECK(std::abs(round.component(0)[p] - u.component(0)[p]) < 1e-6);

    CHECK_THROWS_AS(dilate(u, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(dilate(u, -1.0), std::invalid_argument);
}

TEST_CASE("dilate flags resolution risk instead of failing") {
    const Grid g = Grid::make(1, 32, 4.0);
    // A field that already fills the spectrum: shrinking it must warn.
    auto spiky = ScalarField::sample(g, [&](const std::array<double, 3>& x) {
        return std::cos(std::numbers::pi / g.spacing() * 0.9 * x[0]);
    });
    VectorField u(g, {std::vector<ScalarField>{spiky}});
    DilationDiagnostics diag;
    (void)dilate(u, 8.0, &diag);
    CHECK(diag.warned);
    CHECK(diag.risk_fraction > 1e-8);

    // A resolved Gaussian at moderate lambda stays quiet.
    const Grid fine = Grid::make(1, 256, 16.0);
    auto gauss = ScalarField::sample(
        fine, [](const std::array<double, 3>& x) { return std::exp(-x[0] * x[0]); });
    VectorField v(fine, {std::vector<ScalarField>{gauss}});
    DilationDiagnostics quiet;
    (void)dilate(v, 1.5, &quiet);
    CHECK_FALSE(quiet.warned);
}

TEST_CASE("dilate in 2d scales mass-preservingly") {
    const Grid g = Grid::make(2, 64, 8.0);
    auto bump = gaussian_bump(g, {32, 32, 0}, 1.5);
    VectorField u(g, {std::vector<ScalarField>{bump}});
    auto d = dilate(u, 1.3);
    CHECK(rel_err(mass(d), mass(u)) < 1e-6);
}

TEST_CASE("lattice_shift: identity, inverse, exact mass") {
    const Grid g = Grid::make(1, 64, 4.0); // h = 1/8, so 1/h = 8 cells per unit
    const auto u = random_smooth_vector(g, 2, 31);

    auto same = lattice_shift(u, {0, 0, 0});
    for (std::size_t p = 0; p < g.total_points(); ++p)
        CHECK(same.component(0)[p] == u.component(0)[p]);

    auto fwd = lattice_shift(u, {3, 0, 0});
    auto back = lattice_shift(fwd, {-3, 0, 0});
    for (int i = 0; i < 2; ++i)
        for (std::size_t p = 0; p < g.total_points(); ++p)
            CHECK(back.component(i)[p] == u.component(i)[p]);

    CHECK(mass(fwd) == mass(u)); // permutation of samples, bitwise equal sums
    CHECK(rel_err(total_grad_norm_sq(fwd), total_grad_norm_sq(u)) < 1e-12);

    const Grid bad = Grid::make(1, 50, 4.0); // h = 4/25, 1/h not integral
    VectorField v(bad, 1);
    v.component(0)[0] = 1.0;
    CHECK_THROWS_AS(lattice_shift(v, {1, 0, 0}), std::invalid_argument);
}

TEST_CASE("split: plateau cases and disjoint supports") {
    const Grid g = Grid::make(1, 256, 16.0);
    const std::array<int, 3> center = {128, 0, 0}; // x = 0

    // Field supported well inside B(center, R0): v = u, w = 0.
    auto narrow = gaussian_bump(g, center, 0.5);
    VectorField u_in(g, {std::vector<ScalarField>{narrow}});
    auto pair_in = split(u_in, center, 3.0, 7.0);
    for (std::size_t p = 0; p < g.total_points(); ++p) {
        if (g.torus_distance(p, center) <= 3.0)
            CHECK(pair_in.v.component(0)[p] == u_in.component(0)[p]);
        CHECK(std::abs(pair_in.w.component(0)[p]) <= std::exp(-7.0 * 7.0 / 0.25));
    }
    CHECK(rel_err(mass(pair_in.v), mass(u_in)) < 1e-10);

    // Field supported beyond 2*Rn: w = u, v = 0.
    const std::array<int, 3> antipode = {0, 0, 0}; // x = -16, torus-far from 0
    auto far = gaussian_bump(g, antipode, 0.5);
    VectorField u_out(g, {std::vector<ScalarField>{far}});
    auto pair_out = split(u_out, center, 3.0, 7.0);
    CHECK(rel_err(mass(pair_out.w), mass(u_out)) < 1e-10);
    CHECK(mass(pair_out.v) < 1e-20);

    // Two bumps: masses add up to the total up to the bump tails.
    ScalarField two(g);
    for (std::size_t p = 0; p < g.total_points(); ++p)
        two[p] = narrow[p] + far[p];
    VectorField u2(g, {std::vector<ScalarField>{two}});
    auto pair2 = split(u2, center, 3.0, 7.0);
    CHECK(rel_err(mass(pair2.v) + mass(pair2.w), mass(u2)) < 1e-8);

    // Exact disjointness at every point, and |v|,|w| <= |u|.
    for (std::size_t p = 0; p < g.total_points(); ++p) {
        CHECK(pair2.v.component(0)[p] * pair2.w.component(0)[p] == 0.0);
        CHECK(std::abs(pair2.v.component(0)[p]) <= std::abs(two[p]));
        CHECK(std::abs(pair2.w.component(0)[p]) <= std::abs(two[p]));
    }

    // Mass defect is bounded by the annulus mass reported by split.
    CHECK(mass(pair2.v) + mass(pair2.w) <= mass(u2) + pair2.annulus_mass + 1e-12);

    CHECK_THROWS_AS(split(u2, center, 4.0, 7.0), std::invalid_argument);  // 2R0 >= Rn
    CHECK_THROWS_AS(split(u2, center, 3.0, 17.0), std::invalid_argument); // Rn >= L
    CHECK_THROWS_AS(split(u2, center, 0.0, 7.0), std::invalid_argument);
}

TEST_CASE("split supports vanish where the ramps say so") {
    const Grid g = Grid::make(2, 32, 8.0);
    const auto u = random_smooth_vector(g, 2, 77);
    const std::array<int, 3> center = {16, 16, 0};
    auto pair = split(u, center, 1.5, 3.5);
    for (std::size_t p = 0; p < g.total_points(); ++p) {
        const double d = g.torus_distance(p, center);
        for (int i = 0; i < 2; ++i) {
            if (d >= 2 * 1.5) CHECK(pair.v.component(i)[p] == 0.0);
            if (d <= 3.5) CHECK(pair.w.component(i)[p] == 0.0);
            CHECK(pair.v.component(i)[p] * pair.w.component(i)[p] == 0.0);
        }
    }
}
