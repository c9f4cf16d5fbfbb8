#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vlab/kernels.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace vlab;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

// Sizes straddling the SIMD width and the pairwise leaf.
const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 31, 63, 64,
                              65, 100, 127, 128, 1000, 4096, 4099};

} // namespace

TEST_CASE("scalar reductions match a long-double reference") {
    auto& ops = kernels::scalar_ops();
    for (std::size_t n : kSizes) {
        auto x = random_vec(n, 11 + n);
        long double ref = 0.0L;
        for (double v : x) ref += static_cast<long double>(v);
        const double got = ops.sum(x.data(), n);
        CHECK(std::abs(got - static_cast<double>(ref)) <=
              1e-13 * (1.0 + std::abs(static_cast<double>(ref))) + 1e-13 * n);
    }
}

TEST_CASE("avx2 variants agree with the scalar reference") {
    const kernels::Ops* avx2 = kernels::avx2_ops();
    if (!avx2) return; // not an AVX2 machine; dispatch falls back to scalar
    auto& ref = kernels::scalar_ops();

    for (std::size_t n : kSizes) {
        auto x = random_vec(n, 101 + n);
        auto y = random_vec(n, 202 + n);
        const double a = 0.37;

        SUBCASE("maps") {
            auto y1 = y, y2 = y;
            ref.axpy(y1.data(), x.data(), a, n);
            avx2->axpy(y2.data(), x.data(), a, n);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * (1.0 + std::abs(y1[i])));

            auto s1 = x, s2 = x;
            ref.scale(s1.data(), a, n);
            avx2->scale(s2.data(), a, n);
            for (std::size_t i = 0; i < n; ++i) CHECK(s1[i] == s2[i]);

            std::vector<double> o1(n), o2(n);
            ref.mul(o1.data(), x.data(), y.data(), n);
            avx2->mul(o2.data(), x.data(), y.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(o1[i] == o2[i]);

            ref.add_scaled(o1.data(), x.data(), a, y.data(), n);
            avx2->add_scaled(o2.data(), x.data(), a, y.data(), n);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(std::abs(o1[i] - o2[i]) <= 1e-15 * (1.0 + std::abs(o1[i])));

            auto a1 = y, a2 = y;
            ref.add_sq(a1.data(), x.data(), n);
            avx2->add_sq(a2.data(), x.data(), n);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(std::abs(a1[i] - a2[i]) <= 1e-15 * (1.0 + std::abs(a1[i])));
        }

        SUBCASE("reductions") {
            const double tol = 1e-13 * (1.0 + static_cast<double>(n));
            CHECK(std::abs(ref.sum(x.data(), n) - avx2->sum(x.data(), n)) <= tol);
            CHECK(std::abs(ref.dot(x.data(), y.data(), n) -
                           avx2->dot(x.data(), y.data(), n)) <= tol);
            CHECK(std::abs(ref.sum_sq(x.data(), n) - avx2->sum_sq(x.data(), n)) <= tol);
            CHECK(ref.max_abs(x.data(), n) == avx2->max_abs(x.data(), n));
        }

        SUBCASE("complex") {
            auto c = random_vec(2 * n, 303 + n);
            auto w = random_vec(n, 404 + n);
            for (auto& v : w) v = std::abs(v);

            auto c1 = c, c2 = c;
            ref.complex_scale(c1.data(), w.data(), n);
            avx2->complex_scale(c2.data(), w.data(), n);
            for (std::size_t i = 0; i < 2 * n; ++i) CHECK(c1[i] == c2[i]);

            const double n1 = ref.complex_norm_weighted(c.data(), w.data(), n);
            const double n2 = avx2->complex_norm_weighted(c.data(), w.data(), n);
            CHECK(std::abs(n1 - n2) <= 1e-13 * (1.0 + std::abs(n1)));
        }
    }
}

TEST_CASE("active table is one of the known tables") {
    auto& ops = kernels::active();
    const std::string name = ops.name;
    CHECK((name == "scalar" || name == "avx2"));
    // Sanity: the active ops compute.
    std::vector<double> x = {1.0, 2.0, 3.0};
    CHECK(ops.sum(x.data(), 3) == doctest::Approx(6.0));
}
