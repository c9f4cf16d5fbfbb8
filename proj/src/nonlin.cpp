#include "vlab/nonlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace vlab {

namespace {

// |v|^e with a fast path for small integer exponents.
double pow_abs(double v, double e) {
    const double a = std::abs(v);
    const double r = std::round(e);
    if (e == r && r >= 0.0 && r <= 8.0) {
        double acc = 1.0;
        for (int i = 0; i < static_cast<int>(r); ++i) acc *= a;
        return acc;
    }
    return std::pow(a, e);
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double norm(std::span<const double> s) {
    double n2 = 0.0;
    for (double v : s) n2 += v * v;
    return std::sqrt(n2);
}

} // namespace

NonlinearitySpec NonlinearitySpec::paper_example(
    int m, double p0, double q_inf, double q1,
    std::vector<std::vector<double>> couplings, ProfileDecay decay, double decay_t) {
    if (m < 1) throw std::invalid_argument("NonlinearitySpec: m must be >= 1");
    if (p0 < 0.0 || q_inf < 0.0 || q1 < 0.0)
        throw std::invalid_argument("NonlinearitySpec: profile amplitudes must be >= 0");
    if (decay == ProfileDecay::power && !(decay_t > 0.0))
        throw std::invalid_argument("NonlinearitySpec: power decay needs t > 0");
    for (const auto& term : couplings) {
        if (static_cast<int>(term.size()) != m)
            throw std::invalid_argument("NonlinearitySpec: coupling term arity != m");
        for (double l : term)
            if (!(l > 0.0))
                throw std::invalid_argument("NonlinearitySpec: coupling exponents must be > 0");
    }
    NonlinearitySpec spec;
    spec.kind_ = Kind::paper_example;
    spec.m_ = m;
    spec.p0_ = p0;
    spec.q_inf_ = q_inf;
    spec.q1_ = q1;
    spec.decay_ = decay;
    spec.decay_t_ = decay_t;
    spec.couplings_ = std::move(couplings);
    return spec;
}

NonlinearitySpec NonlinearitySpec::coupled_power(int m, double p, double beta) {
    if (m < 1 || m > 2)
        throw std::invalid_argument("NonlinearitySpec: coupled-power supports m in {1,2}");
    if (!(p > 1.0))
        throw std::invalid_argument("NonlinearitySpec: coupled-power needs p > 1");
    NonlinearitySpec spec;
    spec.kind_ = Kind::coupled_power;
    spec.m_ = m;
    spec.power_p_ = p;
    spec.power_beta_ = beta;
    return spec;
}

double NonlinearitySpec::max_coupling_degree() const {
    if (kind_ == Kind::coupled_power) return 2.0 * power_p_ - 2.0;
    double deg = 0.0;
    for (const auto& term : couplings_) {
        double d = 0.0;
        for (double l : term) d += l;
        deg = std::max(deg, d);
    }
    return deg;
}

double NonlinearitySpec::min_coupling_degree() const {
    if (kind_ == Kind::coupled_power) return 2.0 * power_p_ - 2.0;
    double deg = std::numeric_limits<double>::infinity();
    for (const auto& term : couplings_) {
        double d = 0.0;
        for (double l : term) d += l;
        deg = std::min(deg, d);
    }
    return couplings_.empty() ? 0.0 : deg;
}

bool NonlinearitySpec::subcritical(int dim) const {
    return max_coupling_degree() < 4.0 / dim;
}

double NonlinearitySpec::profile_p(double r) const {
    if (decay_ == ProfileDecay::exponential) return p0_ * std::exp(-r);
    return p0_ * std::pow(1.0 + r, -decay_t_);
}

double NonlinearitySpec::profile_q(double r) const {
    if (decay_ == ProfileDecay::exponential) return q_inf_ + q1_ * std::exp(-r);
    return q_inf_ + q1_ * std::pow(1.0 + r, -decay_t_);
}

double NonlinearitySpec::F(double r, std::span<const double> s) const {
    if (kind_ == Kind::coupled_power) {
        const double p = power_p_;
        double val = pow_abs(s[0], 2.0 * p) / (2.0 * p);
        if (m_ == 2) {
            val += pow_abs(s[1], 2.0 * p) / (2.0 * p);
            val += power_beta_ / p * pow_abs(s[0], p) * pow_abs(s[1], p);
        }
        return val;
    }
    double s2 = 0.0;
    for (double v : s) s2 += v * v;
    double coupling = 0.0;
    for (const auto& term : couplings_) {
        double prod = 1.0;
        for (int i = 0; i < m_; ++i) prod *= pow_abs(s[i], term[i] + 1.0);
        coupling += prod;
    }
    return profile_p(r) * s2 + profile_q(r) * coupling;
}

void NonlinearitySpec::dF(double r, std::span<const double> s, std::span<double> out) const {
    if (kind_ == Kind::coupled_power) {
        const double p = power_p_;
        out[0] = pow_abs(s[0], 2.0 * p - 2.0) * s[0];
        if (m_ == 2) {
            out[1] = pow_abs(s[1], 2.0 * p - 2.0) * s[1];
            const double b = power_beta_;
            out[0] += b * pow_abs(s[0], p - 2.0) * s[0] * pow_abs(s[1], p);
            out[1] += b * pow_abs(s[1], p - 2.0) * s[1] * pow_abs(s[0], p);
        }
        return;
    }
    const double p = profile_p(r);
    const double q = profile_q(r);
    for (int i = 0; i < m_; ++i) out[i] = 2.0 * p * s[i];
    for (const auto& term : couplings_) {
        for (int i = 0; i < m_; ++i) {
            // d/ds_i |s_i|^{l+1} = (l+1)|s_i|^{l-1} s_i = (l+1)|s_i|^l sign(s_i)
            double d = (term[i] + 1.0) * pow_abs(s[i], term[i]) * sign_of(s[i]);
            for (int k = 0; k < m_; ++k)
                if (k != i) d *= pow_abs(s[k], term[k] + 1.0);
            out[i] += q * d;
        }
    }
}

double NonlinearitySpec::Finf(std::span<const double> s) const {
    if (kind_ == Kind::coupled_power) return F(0.0, s);
    double coupling = 0.0;
    for (const auto& term : couplings_) {
        double prod = 1.0;
        for (int i = 0; i < m_; ++i) prod *= pow_abs(s[i], term[i] + 1.0);
        coupling += prod;
    }
    return q_inf_ * coupling;
}

void NonlinearitySpec::dFinf(std::span<const double> s, std::span<double> out) const {
    if (kind_ == Kind::coupled_power) {
        dF(0.0, s, out);
        return;
    }
    for (int i = 0; i < m_; ++i) out[i] = 0.0;
    for (const auto& term : couplings_) {
        for (int i = 0; i < m_; ++i) {
            double d = (term[i] + 1.0) * pow_abs(s[i], term[i]) * sign_of(s[i]);
            for (int k = 0; k < m_; ++k)
                if (k != i) d *= pow_abs(s[k], term[k] + 1.0);
            out[i] += q_inf_ * d;
        }
    }
}

namespace {

double radius_of(std::span<const double> x) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return std::sqrt(r2);
}

} // namespace

double eval_F(const NonlinearitySpec& spec, std::span<const double> x,
              std::span<const double> s) {
    return spec.F(radius_of(x), s);
}

void eval_dF(const NonlinearitySpec& spec, std::span<const double> x,
             std::span<const double> s, std::span<double> out) {
    spec.dF(radius_of(x), s, out);
}

double eval_Finf(const NonlinearitySpec& spec, std::span<const double>,
                 std::span<const double> s) {
    return spec.Finf(s);
}

void eval_dFinf(const NonlinearitySpec& spec, std::span<const double>,
                std::span<const double> s, std::span<double> out) {
    spec.dFinf(s, out);
}

void AssumptionConstants::check(int dim) const {
    const double crit = 4.0 / dim;
    if (!(A > 0.0) || !(B > 0.0))
        throw std::invalid_argument("AssumptionConstants: A, B must be positive");
    if (!(ell > 0.0) || !(ell < crit))
        throw std::invalid_argument("AssumptionConstants: need 0 < ell < 4/N");
    if (!(beta > 0.0) || !(beta < ell))
        throw std::invalid_argument("AssumptionConstants: need 0 < beta < ell");
    if (!(t >= 0.0) || !(t < 2.0))
        throw std::invalid_argument("AssumptionConstants: need t in [0,2)");
    if (alpha.empty())
        throw std::invalid_argument("AssumptionConstants: alpha list is empty");
    double alpha_sum = 0.0;
    for (double a : alpha) {
        if (!(a > 0.0))
            throw std::invalid_argument("AssumptionConstants: alpha_i must be positive");
        alpha_sum += a;
    }
    if (!(t < dim * (1.0 - alpha_sum / 2.0) + 2.0))
        throw std::invalid_argument("AssumptionConstants: need t < N(1 - alpha/2) + 2");
    if (!(Delta > 0.0) || !(S > 0.0) || !(R > 0.0))
        throw std::invalid_argument("AssumptionConstants: Delta, S, R must be positive");
    if (!(sigma >= 0.0) || !(sigma < crit))
        throw std::invalid_argument("AssumptionConstants: need sigma in [0, 4/N)");
    if (!(A_prime > 0.0) || !(B_prime > 0.0))
        throw std::invalid_argument("AssumptionConstants: A', B' must be positive");
    if (!(alpha_quot > 0.0) || !(alpha_quot < crit))
        throw std::invalid_argument("AssumptionConstants: need alpha_quot in (0, 4/N)");
}

namespace {

struct Sampler {
    std::mt19937_64 rng;
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    int dim;
    int m;

    // Random point with |x| uniform in [r_lo, r_hi], random direction.
    std::array<double, 3> point(double r_lo, double r_hi) {
        const double r = r_lo + (r_hi - r_lo) * unit(rng);
        std::array<double, 3> x = {0.0, 0.0, 0.0};
        double n2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            x[a] = 2.0 * unit(rng) - 1.0;
            n2 += x[a] * x[a];
        }
        const double n = std::sqrt(n2);
        if (n > 0.0)
            for (int a = 0; a < dim; ++a) x[a] *= r / n;
        else
            x[0] = r;
        return x;
    }

    // Components uniform in [-s_max, s_max].
    std::vector<double> svec(double s_max) {
        std::vector<double> s(static_cast<std::size_t>(m));
        for (auto& v : s) v = s_max * (2.0 * unit(rng) - 1.0);
        return s;
    }

    // Vector with |s| < s_cap.
    std::vector<double> svec_in_ball(double s_cap) {
        for (;;) {
            auto s = svec(s_cap);
            if (norm(s) < s_cap) return s;
        }
    }
};

struct MarginTracker {
    double margin = std::numeric_limits<double>::infinity();
    std::array<double, 3> x = {0.0, 0.0, 0.0};
    std::vector<double> s;
    double theta = 1.0;

    void update(double candidate, const std::array<double, 3>& xx,
                const std::vector<double>& ss, double th = 1.0) {
        if (candidate < margin) {
            margin = candidate;
            x = xx;
            s = ss;
            theta = th;
        }
    }

    AssumptionResult result(const std::string& name, double pass_floor,
                            std::string note = {}) const {
        AssumptionResult r;
        r.name = name;
        r.margin = margin;
        r.pass = margin >= pass_floor;
        r.witness_x = x;
        r.witness_s = s;
        r.witness_theta = theta;
        r.note = std::move(note);
        return r;
    }
};

} // namespace

AssumptionReport check_assumptions(const NonlinearitySpec& spec,
                                   const AssumptionConstants& constants,
                                   int dim, const SamplePlan& plan) {
    if (!(plan.r_max > 0.0) || !(plan.s_max > 0.0) || plan.samples == 0)
        throw std::invalid_argument("check_assumptions: invalid sample plan");
    if (static_cast<int>(constants.alpha.size()) != spec.components())
        throw std::invalid_argument("check_assumptions: alpha arity != m");
    constants.check(dim);

    Sampler sampler{std::mt19937_64(plan.seed), {}, dim, spec.components()};
    const int m = spec.components();
    const double thetas[] = {1.0, 2.0, 4.0, 8.0};

    MarginTracker a0_lower, a0_upper, a0_deriv;
    MarginTracker a1;
    MarginTracker a2;
    MarginTracker a3;
    MarginTracker a4_upper, a4_deriv;
    MarginTracker a5;
    MarginTracker a6;
    std::size_t strict_count = 0;

    std::vector<double> d(static_cast<std::size_t>(m));
    std::vector<double> scaled(static_cast<std::size_t>(m));

    for (std::size_t it = 0; it < plan.samples; ++it) {
        const auto x = sampler.point(0.0, plan.r_max);
        const auto s = sampler.svec(plan.s_max);
        const double sn = norm(s);
        const std::span<const double> xs(x.data(), static_cast<std::size_t>(dim));

        const double f = eval_F(spec, xs, s);
        const double finf = eval_Finf(spec, xs, s);
        const double fscale = 1.0 + std::abs(f);

        // A0: 0 <= F <= A(|s|^2 + |s|^{l+2}) and |dF_i| <= B(|s| + |s|^{l+1}).
        a0_lower.update(f, x, s);
        a0_upper.update(constants.A * (sn * sn + std::pow(sn, constants.ell + 2.0)) - f,
                        x, s);
        eval_dF(spec, xs, s, d);
        const double dbound = constants.B * (sn + std::pow(sn, constants.ell + 1.0));
        for (int i = 0; i < m; ++i)
            a0_deriv.update(dbound - std::abs(d[i]), x, s);

        // A2 / A5: theta-superquadraticity, normalized by the value scale.
        for (double th : thetas) {
            for (int i = 0; i < m; ++i) scaled[i] = th * s[i];
            const double fth = eval_F(spec, xs, scaled);
            a2.update((fth - th * th * f) / fscale, x, s, th);
            const double finf_th = eval_Finf(spec, xs, scaled);
            a5.update((finf_th - std::pow(th, constants.sigma + 2.0) * finf) /
                          (1.0 + std::abs(finf)),
                      x, s, th);
        }

        // A4: growth of F_inf and its derivative.
        a4_upper.update(constants.A_prime * (std::pow(sn, constants.beta + 2.0) +
                                             std::pow(sn, constants.ell + 2.0)) -
                            finf,
                        x, s);
        eval_dFinf(spec, xs, s, d);
        const double dinf_bound = constants.B_prime *
                                  (std::pow(sn, constants.beta + 1.0) +
                                   std::pow(sn, constants.ell + 1.0));
        for (int i = 0; i < m; ++i)
            a4_deriv.update(dinf_bound - std::abs(d[i]), x, s);

        // A6: domination F >= F_inf, strict on a positive fraction.
        a6.update(f - finf, x, s);
        if (f - finf > plan.strict_eps) ++strict_count;
    }

    // A1: lower bound for |x| >= R, |s| < S, on its own sample stream.
    for (std::size_t it = 0; it < plan.samples / 4 + 1; ++it) {
        const auto x = sampler.point(constants.R, std::max(plan.r_max, constants.R + 1.0));
        const auto s = sampler.svec_in_ball(constants.S);
        const std::span<const double> xs(x.data(), static_cast<std::size_t>(dim));
        const double r = radius_of(xs);
        double lower = constants.Delta * std::pow(r, -constants.t);
        for (int i = 0; i < m; ++i) lower *= pow_abs(s[i], constants.alpha[i]);
        a1.update(eval_F(spec, xs, s) - lower, x, s);
    }

    // A3: decay quotient at the far edge of the sampled range.
    for (std::size_t it = 0; it < plan.samples / 10 + 1; ++it) {
        const auto x = sampler.point(plan.r_max, plan.r_max);
        const auto s = sampler.svec(plan.s_max);
        const double sn = norm(s);
        if (sn == 0.0) continue;
        const std::span<const double> xs(x.data(), static_cast<std::size_t>(dim));
        const double quot = (eval_F(spec, xs, s) - eval_Finf(spec, xs, s)) /
                            (sn * sn + std::pow(sn, constants.alpha_quot + 2.0));
        a3.update(plan.a3_tol - std::abs(quot), x, s);
    }

    const double tol = -1e-12;
    AssumptionReport report;
    report.results.push_back(a0_lower.result("A0-lower", tol, "min F"));
    report.results.push_back(a0_upper.result("A0-upper", tol, "A(|s|^2+|s|^{l+2}) - F"));
    report.results.push_back(a0_deriv.result("A0-deriv", tol, "B bound - |dF|"));
    report.results.push_back(a1.result("A1", tol, "F - Delta |x|^-t prod |s_i|^a_i"));
    report.results.push_back(a2.result("A2", tol, "scaled F(theta s) - theta^2 F"));
    report.results.push_back(a3.result("A3", tol, "tol - |quotient| at r_max"));
    report.results.push_back(a4_upper.result("A4-upper", tol));
    report.results.push_back(a4_deriv.result("A4-deriv", tol));
    report.results.push_back(a5.result("A5", tol, "scaled Finf(theta s) - theta^{sigma+2} Finf"));

    report.strict_fraction =
        static_cast<double>(strict_count) / static_cast<double>(plan.samples);
    auto a6_result = a6.result("A6", tol, "min (F - Finf)");
    a6_result.pass = a6_result.pass && report.strict_fraction > 0.0;
    report.results.push_back(a6_result);

    report.all_pass = true;
    for (const auto& r : report.results) report.all_pass = report.all_pass && r.pass;
    return report;
}

} // namespace vlab
