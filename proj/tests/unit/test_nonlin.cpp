#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vlab/nonlin.hpp"

#include <cmath>
#include <random>

using namespace vlab;

namespace {

NonlinearitySpec default_family() {
    return NonlinearitySpec::paper_example(2, 1.0, 1.0, 1.0, {{1.0, 1.0}});
}

AssumptionConstants default_constants() {
    AssumptionConstants c;
    c.A = 3.0;
    c.B = 8.0;
    c.Delta = 0.5;
    c.S = 1.0;
    c.R = 1.0;
    c.t = 0.0;
    c.alpha = {2.0, 2.0};
    c.A_prime = 2.0;
    c.B_prime = 4.0;
    c.beta = 1.0;
    c.ell = 2.0;
    c.sigma = 2.0;
    c.alpha_quot = 2.0;
    return c;
}

struct RandomPoints {
    std::mt19937_64 rng;
    std::uniform_real_distribution<double> unit{-1.0, 1.0};

    std::array<double, 1> x(double r_max) {
        return {r_max * std::abs(unit(rng))};
    }
    std::vector<double> s(int m, double s_max) {
        std::vector<double> out(static_cast<std::size_t>(m));
        for (auto& v : out) v = s_max * unit(rng);
        return out;
    }
};

} // namespace

TEST_CASE("eval_F: zero, hand value, theta-superquadraticity") {
    const auto spec = NonlinearitySpec::paper_example(2, 1.0, 1.0, 0.0, {{1.0, 1.0}});
    const std::array<double, 1> origin = {0.0};

    const std::vector<double> zero = {0.0, 0.0};
    CHECK(eval_F(spec, origin, zero) == 0.0);

    // p(0)|s|^2 + q(0)|s1|^2|s2|^2 = 1*2 + 1*1 = 3 at s = (1,1).
    const std::vector<double> ones = {1.0, 1.0};
    CHECK(eval_F(spec, origin, ones) == doctest::Approx(3.0).epsilon(1e-14));

    const auto family = default_family();
    RandomPoints pts{std::mt19937_64(42)};
    for (int it = 0; it < 10000; ++it) {
        const auto x = pts.x(32.0);
        const auto s = pts.s(2, 4.0);
        const double f = eval_F(family, x, s);
        const std::vector<double> s2 = {2.0 * s[0], 2.0 * s[1]};
        CHECK(eval_F(family, x, s2) >= 4.0 * f - 1e-12 * (1.0 + std::abs(f)));
        CHECK(f >= 0.0);
    }
}

TEST_CASE("eval_dF matches central finite differences") {
    const auto family = default_family();
    RandomPoints pts{std::mt19937_64(7)};
    const double step = 1e-5;
    std::vector<double> d(2);
    for (int it = 0; it < 10000; ++it) {
        const auto x = pts.x(16.0);
        auto s = pts.s(2, 4.0);
        eval_dF(family, x, s, d);
        for (int i = 0; i < 2; ++i) {
            auto hi = s, lo = s;
            hi[static_cast<std::size_t>(i)] += step;
            lo[static_cast<std::size_t>(i)] -= step;
            const double fd = (eval_F(family, x, hi) - eval_F(family, x, lo)) / (2 * step);
            CHECK(std::abs(d[static_cast<std::size_t>(i)] - fd) <=
                  1e-6 * (1.0 + std::abs(fd)));
        }
    }
}

TEST_CASE("eval_dF: zero at the origin and odd in each component") {
    const auto family = default_family();
    std::vector<double> d(2);
    const std::array<double, 1> x = {1.3};

    eval_dF(family, x, std::vector<double>{0.0, 0.0}, d);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == 0.0);

    RandomPoints pts{std::mt19937_64(11)};
    std::vector<double> dm(2);
    for (int it = 0; it < 1000; ++it) {
        const auto s = pts.s(2, 3.0);
        const std::vector<double> ms = {-s[0], -s[1]};
        eval_dF(family, x, s, d);
        eval_dF(family, x, ms, dm);
        for (int i = 0; i < 2; ++i)
            CHECK(dm[static_cast<std::size_t>(i)] ==
                  doctest::Approx(-d[static_cast<std::size_t>(i)]).epsilon(1e-13));
    }
}

TEST_CASE("eval_Finf: domination, x-independence, decay quotient") {
    const auto family = default_family();
    RandomPoints pts{std::mt19937_64(23)};
    std::vector<double> d(2);
    for (int it = 0; it < 10000; ++it) {
        const auto x = pts.x(32.0);
        const auto s = pts.s(2, 4.0);
        CHECK(eval_Finf(family, x, s) <= eval_F(family, x, s) + 1e-15);
    }

    const std::vector<double> s = {0.7, -1.2};
    const std::array<double, 1> x1 = {2.0};
    const std::array<double, 1> x2 = {5.0}; // "x + z": Finf is x-independent
    CHECK(eval_Finf(family, x1, s) == eval_Finf(family, x2, s));

    // (F - Finf) / (|s|^2 + |s|^{alpha+2}) at r = 20 is below e^{-20} scale.
    const std::array<double, 1> far = {20.0};
    const double sn2 = s[0] * s[0] + s[1] * s[1];
    const double quot = (eval_F(family, far, s) - eval_Finf(family, far, s)) /
                        (sn2 + std::pow(std::sqrt(sn2), 4.0));
    CHECK(std::abs(quot) <= 1e-8);

    // dFinf matches finite differences of Finf as well.
    const double step = 1e-5;
    eval_dFinf(family, far, s, d);
    for (int i = 0; i < 2; ++i) {
        auto hi = s, lo = s;
        hi[static_cast<std::size_t>(i)] += step;
        lo[static_cast<std::size_t>(i)] -= step;
        const double fd =
            (eval_Finf(family, far, hi) - eval_Finf(family, far, lo)) / (2 * step);
        CHECK(std::abs(d[static_cast<std::size_t>(i)] - fd) <= 1e-6 * (1.0 + std::abs(fd)));
    }
}

TEST_CASE("A5 scaling with sigma = min coupling degree, A6 strict at the origin") {
    const auto family = default_family();
    CHECK(family.min_coupling_degree() == doctest::Approx(2.0));
    RandomPoints pts{std::mt19937_64(31)};
    for (int it = 0; it < 2000; ++it) {
        const auto x = pts.x(8.0);
        const auto s = pts.s(2, 3.0);
        const double finf = eval_Finf(family, x, s);
        for (double theta : {1.0, 2.0, 4.0, 8.0}) {
            const std::vector<double> ts = {theta * s[0], theta * s[1]};
            CHECK(eval_Finf(family, x, ts) >=
                  std::pow(theta, 4.0) * finf - 1e-12 * (1.0 + std::abs(finf)));
        }
    }
    // Strictly dominated at r = 0 for nonzero s when p0 > 0.
    const std::array<double, 1> origin = {0.0};
    const std::vector<double> s = {0.5, 0.5};
    CHECK(eval_F(family, origin, s) - eval_Finf(family, origin, s) > 0.0);
}

TEST_CASE("coupled-power family evaluates the classical form") {
    const auto spec = NonlinearitySpec::coupled_power(2, 2.0, 0.5);
    const std::array<double, 1> x = {3.0};
    const std::vector<double> s = {1.0, 2.0};
    // 1/4 (1 + 16) + (0.5/2) * 1 * 4 = 4.25 + 1 = 5.25
    CHECK(eval_F(spec, x, s) == doctest::Approx(5.25).epsilon(1e-14));
    CHECK(eval_Finf(spec, x, s) == eval_F(spec, x, s));
    CHECK(spec.max_coupling_degree() == doctest::Approx(2.0));

    std::vector<double> d(2);
    eval_dF(spec, x, s, d);
    // d1 = s1^3 + beta s1 s2^2 = 1 + 0.5*4 = 3; d2 = 8 + 0.5*2*... = 8 + 1 = 9? no:
    // d2 = s2^3 + beta s2 s1^2 = 8 + 0.5*2*1 = 9.
    CHECK(d[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(d[1] == doctest::Approx(9.0).epsilon(1e-14));
}

TEST_CASE("check_assumptions: default family passes with margins") {
    const auto report =
        check_assumptions(default_family(), default_constants(), 1, SamplePlan{20000});
    for (const auto& r : report.results) {
        INFO(r.name, " margin ", r.margin);
        CHECK(r.pass);
        CHECK(r.margin >= -1e-12);
    }
    CHECK(report.all_pass);
    CHECK(report.strict_fraction > 0.5);

    // Theta = 1 makes the A2 margin an exact zero.
    for (const auto& r : report.results)
        if (r.name == "A2") CHECK(r.margin == 0.0);
}

TEST_CASE("check_assumptions: negative coupling violates A0 with a witness") {
    const auto bad = NonlinearitySpec::coupled_power(2, 2.0, -10.0);
    AssumptionConstants c = default_constants();
    const auto report = check_assumptions(bad, c, 1, SamplePlan{20000});
    CHECK_FALSE(report.all_pass);
    bool lower_violated = false;
    for (const auto& r : report.results)
        if (r.name == "A0-lower" && !r.pass) {
            lower_violated = true;
            CHECK(r.margin < 0.0);
            // The witness reproduces the violation.
            const std::array<double, 3>& wx = r.witness_x;
            CHECK(eval_F(bad, std::span<const double>(wx.data(), 1), r.witness_s) ==
                  doctest::Approx(r.margin));
        }
    CHECK(lower_violated);
}

TEST_CASE("constants validation catches structural violations") {
    const int n = 1;
    auto good = default_constants();
    CHECK_NOTHROW(good.check(n));

    auto bad = good;
    bad.ell = 4.0; // not < 4/N
    CHECK_THROWS_AS(bad.check(n), std::invalid_argument);

    bad = good;
    bad.beta = 2.5; // not < ell
    CHECK_THROWS_AS(bad.check(n), std::invalid_argument);

    bad = good;
    bad.t = 2.0; // not < 2
    CHECK_THROWS_AS(bad.check(n), std::invalid_argument);

    bad = good;
    bad.t = 1.5; // violates t < N(1 - alpha/2) + 2 = 1 for alpha = 4
    CHECK_THROWS_AS(bad.check(n), std::invalid_argument);

    bad = good;
    bad.sigma = 4.0;
    CHECK_THROWS_AS(bad.check(n), std::invalid_argument);
}

TEST_CASE("spec construction rejects malformed families") {
    CHECK_THROWS_AS(NonlinearitySpec::paper_example(2, -1.0, 1.0, 1.0, {{1.0, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(NonlinearitySpec::paper_example(2, 1.0, 1.0, 1.0, {{1.0}}),
                    std::invalid_argument); // arity mismatch
    CHECK_THROWS_AS(NonlinearitySpec::paper_example(2, 1.0, 1.0, 1.0, {{1.0, 0.0}}),
                    std::invalid_argument); // nonpositive exponent
    CHECK_THROWS_AS(NonlinearitySpec::coupled_power(3, 2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(NonlinearitySpec::coupled_power(2, 1.0, 0.0), std::invalid_argument);

    // Supercritical degree is allowed at construction; it is recorded, and
    // the sampled checker is the place that flags it.
    const auto super = NonlinearitySpec::paper_example(1, 0.0, 1.0, 0.0, {{5.0}});
    CHECK_FALSE(super.subcritical(1));
    const auto sub = default_family();
    CHECK(sub.subcritical(1));
}

TEST_CASE("three-component coupling terms generalize the family") {
    // Coupling monomial |s1|^{1.5} |s2|^{1.25} |s3|^{1.25}, degree 2 < 4 at N=1.
    const auto spec =
        NonlinearitySpec::paper_example(3, 1.0, 1.0, 0.5, {{0.5, 0.25, 0.25}});
    CHECK(spec.max_coupling_degree() == doctest::Approx(1.0));
    const std::array<double, 1> x = {0.5};
    const std::vector<double> s = {1.0, -2.0, 0.5};

    // Derivatives still match finite differences.
    std::vector<double> d(3);
    eval_dF(spec, x, s, d);
    const double step = 1e-6;
    for (int i = 0; i < 3; ++i) {
        auto hi = s, lo = s;
        hi[static_cast<std::size_t>(i)] += step;
        lo[static_cast<std::size_t>(i)] -= step;
        const double fd = (eval_F(spec, x, hi) - eval_F(spec, x, lo)) / (2 * step);
        CHECK(std::abs(d[static_cast<std::size_t>(i)] - fd) <= 1e-5 * (1.0 + std::abs(fd)));
    }
    CHECK(eval_Finf(spec, x, s) <= eval_F(spec, x, s));
}

TEST_CASE("supercritical spec fails the A0 upper bound under sampling") {
    // Degree-5 coupling at N=1 exceeds every admissible ell < 4.
    const auto super = NonlinearitySpec::paper_example(1, 0.0, 1.0, 0.0, {{5.0}});
    AssumptionConstants c = default_constants();
    c.alpha = {2.0};
    const auto report = check_assumptions(super, c, 1, SamplePlan{20000});
    bool upper_failed = false;
    for (const auto& r : report.results)
        if (r.name == "A0-upper") upper_failed = !r.pass;
    CHECK(upper_failed);
    CHECK_FALSE(report.all_pass);
}
