#include "vlab/ccdiag.hpp"

#include "vlab/kernels.hpp"
#include "vlab/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vlab {

namespace {

ScalarField density(const VectorField& u) {
    ScalarField rho2(u.grid());
    auto& ops = kernels::active();
    for (int i = 0; i < u.components(); ++i)
        ops.add_sq(rho2.data(), u.component(i).data(), rho2.size());
    return rho2;
}

} // namespace

ConcentrationProfile concentration_Q(const VectorField& u, std::vector<double> radii) {
    const Grid& g = u.grid();
    if (radii.empty()) throw std::invalid_argument("concentration_Q: empty radius list");
    for (double r : radii)
        if (!(r > 0.0)) throw std::invalid_argument("concentration_Q: radii must be positive");
    std::sort(radii.begin(), radii.end());

    const ScalarField rho2 = density(u);
    Spectral ws(g);

    // Ball indicators around the index origin grow with R; convolving the
    // nonnegative increments and clamping keeps Q exactly monotone per center.
    ScalarField increment(g);
    ScalarField conv(g);
    std::vector<double> running(g.total_points(), 0.0);
    const std::array<int, 3> origin = {0, 0, 0};

    ConcentrationProfile profile;
    profile.radii = radii;
    profile.total_mass = mass(u);

    double prev_r = -1.0;
    for (double r : radii) {
        for (std::size_t p = 0; p < g.total_points(); ++p) {
            const double d = g.torus_distance(p, origin);
            increment[p] = (d <= r && d > prev_r) ? 1.0 : 0.0;
        }
        ws.convolve(rho2, increment, conv);
        for (std::size_t p = 0; p < g.total_points(); ++p)
            running[p] += std::max(0.0, conv[p]);

        std::size_t best = 0;
        for (std::size_t p = 1; p < running.size(); ++p)
            if (running[p] > running[best]) best = p;
        profile.q_values.push_back(
            std::min(running[best] * g.cell_volume(), profile.total_mass));
        profile.argmax_center.push_back(best);
        prev_r = r;
    }
    return profile;
}

std::string to_string(Trichotomy t) {
    switch (t) {
    case Trichotomy::vanishing: return "vanishing";
    case Trichotomy::dichotomy: return "dichotomy";
    case Trichotomy::compact: return "compact";
    case Trichotomy::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Trichotomy classify_trichotomy(std::span<const ConcentrationProfile> profiles,
                               double c_squared, double box_half_length) {
    if (profiles.size() < 2)
        throw std::invalid_argument("classify_trichotomy: need at least 2 profiles");
    const auto& radii = profiles.front().radii;
    for (const auto& p : profiles) {
        if (p.radii != radii)
            throw std::invalid_argument("classify_trichotomy: profiles use different radii");
        if (std::abs(p.total_mass - c_squared) > 1e-6 * c_squared)
            throw std::invalid_argument("classify_trichotomy: profiles have different mass");
    }

    const double eps = 0.05 * c_squared;
    const double cap = 0.5 * box_half_length; // stay below torus saturation
    std::vector<std::size_t> usable;
    for (std::size_t j = 0; j < radii.size(); ++j)
        if (radii[j] <= cap) usable.push_back(j);
    if (usable.empty()) return Trichotomy::inconclusive;

    // Compact: one fixed radius captures c^2 - eps for every profile.
    for (std::size_t j : usable) {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& p : profiles) worst = std::min(worst, p.q_values[j]);
        if (worst >= c_squared - eps) return Trichotomy::compact;
    }

    const auto& last = profiles.back();

    // Vanishing: the smallest usable radius ends up with negligible mass.
    if (last.q_values[usable.front()] < eps) return Trichotomy::vanishing;

    // Dichotomy: a plateau of width >= L/4 at an intermediate level.
    for (std::size_t a = 0; a < usable.size(); ++a) {
        for (std::size_t b = usable.size(); b-- > a + 1;) {
            const std::size_t ja = usable[a], jb = usable[b];
            if (radii[jb] - radii[ja] < 0.25 * box_half_length) continue;
            const double lo = last.q_values[ja], hi = last.q_values[jb];
            if (hi - lo <= 0.5 * eps && lo > eps && hi < c_squared - eps)
                return Trichotomy::dichotomy;
        }
    }
    return Trichotomy::inconclusive;
}

nlohmann::json VerificationReport::to_json() const {
    return {{"lemma", lemma},
            {"inputs", inputs},
            {"measurements", measurements},
            {"tolerance", tolerance},
            {"verdict", to_string(verdict)}};
}

namespace {

nlohmann::json spec_inputs(const VerifyContext& ctx, double c) {
    return {{"c", c},
            {"grid_digest", json_digest(grid_to_json(ctx.grid))},
            {"spec_digest", json_digest(nonlin_to_json(ctx.spec))},
            {"m", ctx.spec.components()}};
}

struct Solve {
    double energy = 0.0;
    bool converged = false;
    double error_estimate = 0.0;
};

Solve run_solve(const VerifyContext& ctx, double c, Functional f,
                const VectorField* warm = nullptr) {
    auto r = solve_multistart(ctx.grid, c, ctx.spec, ctx.flow, f, warm, ctx.threads);
    return {r.best.energy, r.best.converged,
            std::max(r.best.energy_error_estimate, 1e-14)};
}

} // namespace

VerificationReport verify_negativity(const VerifyContext& ctx, double c,
                                     std::span<const double> lambdas, double tol,
                                     const AssumptionConstants* constants,
                                     const VectorField* trial) {
    if (lambdas.empty())
        throw std::invalid_argument("verify_negativity: empty lambda list");
    for (double l : lambdas)
        if (!(l > 0.0) || l > 1.0 + 1e-12)
            throw std::invalid_argument("verify_negativity: lambdas must lie in (0, 1]");

    VectorField phi = trial ? *trial
                            : default_init(ctx.grid, ctx.spec.components(), c,
                                           InitStyle::gaussian_bumps, 0);
    phi = project_mass(phi, c);

    EnergyEvaluator eval(ctx.grid, ctx.spec);
    VerificationReport report;
    report.lemma = "negativity";
    report.inputs = spec_inputs(ctx, c);
    report.inputs["lambdas"] = std::vector<double>(lambdas.begin(), lambdas.end());
    report.tolerance = tol;

    struct Point {
        double lambda, energy;
        bool warned;
    };
    std::vector<Point> curve;
    double best = std::numeric_limits<double>::infinity();
    for (double l : lambdas) {
        DilationDiagnostics diag;
        VectorField phi_l = dilate(phi, l, &diag);
        phi_l = project_mass(phi_l, c);
        const double e = eval.energy(phi_l, Functional::J).total;
        curve.push_back({l, e, diag.warned});
        best = std::min(best, e);
    }

    // Small-lambda power-law exponent from the two smallest resolved negative
    // energies: |J| ~ lambda^expo as lambda -> 0.
    std::vector<Point> neg;
    for (const auto& p : curve)
        if (p.energy < 0.0 && !p.warned) neg.push_back(p);
    std::sort(neg.begin(), neg.end(),
              [](const Point& a, const Point& b) { return a.lambda < b.lambda; });
    double measured_expo = std::numeric_limits<double>::quiet_NaN();
    if (neg.size() >= 2)
        measured_expo = std::log(std::abs(neg[0].energy) / std::abs(neg[1].energy)) /
                        std::log(neg[0].lambda / neg[1].lambda);

    nlohmann::json rows = nlohmann::json::array();
    bool any_warned = false;
    for (const auto& p : curve) {
        rows.push_back({{"lambda", p.lambda}, {"energy", p.energy}, {"warned", p.warned}});
        any_warned = any_warned || p.warned;
    }
    report.measurements["curve"] = rows;
    report.measurements["min_energy"] = best;
    report.measurements["measured_exponent"] = measured_expo;
    report.measurements["dilation_warning"] = any_warned;
    if (constants) {
        double alpha = 0.0;
        for (double a : constants->alpha) alpha += a;
        report.measurements["predicted_exponent"] =
            0.5 * ctx.grid.dim() * alpha - ctx.grid.dim() + constants->t;
    }
    report.verdict = best < -tol ? Verdict::pass : Verdict::fail;
    return report;
}

VerificationReport verify_subadditivity(const VerifyContext& ctx, double c,
                                        std::span<const double> fractions,
                                        Functional functional) {
    if (fractions.empty())
        throw std::invalid_argument("verify_subadditivity: empty fraction list");
    for (double f : fractions)
        if (!(f > 0.0) || !(f < 1.0))
            throw std::invalid_argument("verify_subadditivity: fractions must lie in (0,1)");

    VerificationReport report;
    report.lemma = functional == Functional::J ? "subadditivity" : "subadditivity-inf";
    report.inputs = spec_inputs(ctx, c);
    report.inputs["fractions"] = std::vector<double>(fractions.begin(), fractions.end());
    report.inputs["functional"] = functional == Functional::J ? "J" : "Jinf";

    const Solve whole = run_solve(ctx, c, functional);
    bool all_converged = whole.converged;
    double err = whole.error_estimate;

    nlohmann::json rows = nlohmann::json::array();
    double worst_gap = std::numeric_limits<double>::infinity();
    for (double f : fractions) {
        const double a = f * c;
        const double b = std::sqrt(c * c - a * a);
        const Solve sa = run_solve(ctx, a, functional);
        const Solve sb = run_solve(ctx, b, functional);
        all_converged = all_converged && sa.converged && sb.converged;
        err = std::max({err, sa.error_estimate, sb.error_estimate});
        const double gap = sa.energy + sb.energy - whole.energy;
        worst_gap = std::min(worst_gap, gap);
        rows.push_back({{"fraction", f},
                        {"a", a},
                        {"b", b},
                        {"I_a", sa.energy},
                        {"I_b", sb.energy},
                        {"gap", gap}});
    }

    const double tol = std::max(1e-4 * std::abs(whole.energy), 5.0 * err);
    report.tolerance = tol;
    report.measurements["I_c"] = whole.energy;
    report.measurements["fractions"] = rows;
    report.measurements["worst_gap"] = worst_gap;
    report.measurements["energy_error_estimate"] = err;

    if (!all_converged)
        report.verdict = Verdict::inconclusive;
    else if (functional == Functional::J)
        report.verdict = worst_gap >= -tol ? Verdict::pass : Verdict::fail;
    else
        report.verdict = worst_gap > tol ? Verdict::pass : Verdict::fail;
    return report;
}

VerificationReport verify_comparison(const VerifyContext& ctx, double c) {
    VerificationReport report;
    report.lemma = "comparison";
    report.inputs = spec_inputs(ctx, c);

    const Solve ic = run_solve(ctx, c, Functional::J);
    const Solve ic_inf = run_solve(ctx, c, Functional::Jinf);
    bool all_converged = ic.converged && ic_inf.converged;
    double err = std::max(ic.error_estimate, ic_inf.error_estimate);

    const double fractions[] = {0.3, 0.5, 0.7};
    nlohmann::json rows = nlohmann::json::array();
    double worst_mixed_gap = std::numeric_limits<double>::infinity();
    for (double f : fractions) {
        const double a = f * c;
        const double b = std::sqrt(c * c - a * a);
        const Solve sa = run_solve(ctx, a, Functional::J);
        const Solve sb = run_solve(ctx, b, Functional::Jinf);
        all_converged = all_converged && sa.converged && sb.converged;
        err = std::max({err, sa.error_estimate, sb.error_estimate});
        const double gap = sa.energy + sb.energy - ic.energy;
        worst_mixed_gap = std::min(worst_mixed_gap, gap);
        rows.push_back({{"fraction", f},
                        {"a", a},
                        {"b", b},
                        {"I_a", sa.energy},
                        {"I_b_inf", sb.energy},
                        {"gap", gap}});
    }

    const double tol = std::max(1e-4 * std::abs(ic.energy), 5.0 * err);
    report.tolerance = tol;
    report.measurements["I_c"] = ic.energy;
    report.measurements["I_c_inf"] = ic_inf.energy;
    report.measurements["gap"] = ic_inf.energy - ic.energy;
    report.measurements["mixed"] = rows;
    report.measurements["worst_mixed_gap"] = worst_mixed_gap;
    report.measurements["energy_error_estimate"] = err;

    if (!all_converged)
        report.verdict = Verdict::inconclusive;
    else
        report.verdict = (ic_inf.energy - ic.energy > tol && worst_mixed_gap > tol)
                             ? Verdict::pass
                             : Verdict::fail;
    return report;
}

VerificationReport verify_continuity(const VerifyContext& ctx, double c, double delta) {
    if (!(delta > 0.0) || !(delta < 0.5 * c))
        throw std::invalid_argument("verify_continuity: need 0 < delta < c/2");

    VerificationReport report;
    report.lemma = "continuity";
    report.inputs = spec_inputs(ctx, c);
    report.inputs["delta"] = delta;

    auto lo = solve_multistart(ctx.grid, c - delta, ctx.spec, ctx.flow, Functional::J,
                               nullptr, ctx.threads);
    auto mid = solve_multistart(ctx.grid, c, ctx.spec, ctx.flow, Functional::J, nullptr,
                                ctx.threads);
    auto hi = solve_multistart(ctx.grid, c + delta, ctx.spec, ctx.flow, Functional::J,
                               nullptr, ctx.threads);

    const double d_lo = std::abs(lo.best.energy - mid.best.energy);
    const double d_hi = std::abs(hi.best.energy - mid.best.energy);
    const double k_obs = std::max(d_lo, d_hi) / delta;

    // Upper-bound sanity: rescaling the c-minimizer onto the c+delta sphere
    // can only overshoot the infimum there.
    EnergyEvaluator eval(ctx.grid, ctx.spec);
    const double rescaled =
        eval.energy(project_mass(mid.best.minimizer, c + delta), Functional::J).total;

    const double tol = 0.2 * std::abs(mid.best.energy);
    report.tolerance = tol;
    report.measurements["I_minus"] = lo.best.energy;
    report.measurements["I_c"] = mid.best.energy;
    report.measurements["I_plus"] = hi.best.energy;
    report.measurements["K_obs"] = k_obs;
    report.measurements["rescaled_upper_bound"] = rescaled;
    report.measurements["upper_bound_holds"] =
        rescaled >= hi.best.energy - 5.0 * std::max(hi.best.energy_error_estimate, 1e-14);

    if (!(lo.best.converged && mid.best.converged && hi.best.converged))
        report.verdict = Verdict::inconclusive;
    else
        report.verdict = (d_lo <= tol && d_hi <= tol) ? Verdict::pass : Verdict::fail;
    return report;
}

namespace {

// J of the analytic Gaussian dilation trial at one lambda, on a grid fine
// enough for the shrunken profile (M doubled until resolved or budget hit).
struct ProbePoint {
    double lambda = 0.0;
    double energy = 0.0;
    int grid_points = 0;
    bool resolved = false;
};

ProbePoint probe_dilation_point(const VerifyContext& ctx, double c, double width,
                                double lambda, int max_points_budget) {
    const int n = ctx.grid.dim();
    const double l = ctx.grid.half_length();
    const double target_h = width / lambda / 8.0;

    int m = ctx.grid.points_per_dim();
    auto total = [&](int mm) {
        double t = 1.0;
        for (int a = 0; a < n; ++a) t *= mm;
        return t;
    };
    bool resolved = 2.0 * l / m <= target_h;
    while (!resolved && total(m * 2) <= static_cast<double>(max_points_budget)) {
        m *= 2;
        resolved = 2.0 * l / m <= target_h;
    }

    const Grid grid = Grid::make(n, m, l);
    const int comps = ctx.spec.components();
    VectorField phi(grid, comps);
    const double amp = std::pow(lambda, 0.5 * n);
    for (int i = 0; i < comps; ++i) {
        phi.component(i) = ScalarField::sample(grid, [&](const std::array<double, 3>& x) {
            double r2 = 0.0;
            for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
            return amp * std::exp(-lambda * lambda * r2 / (width * width));
        });
    }
    phi = project_mass(phi, c);
    EnergyEvaluator eval(grid, ctx.spec);
    return {lambda, eval.energy(phi, Functional::J).total, m, resolved};
}

} // namespace

VerificationReport probe_supercritical(const VerifyContext& ctx, double c, double bound,
                                       int max_points_budget) {
    VerificationReport report;
    report.lemma = "supercritical";
    report.inputs = spec_inputs(ctx, c);
    report.inputs["bound"] = bound;
    report.tolerance = bound;

    const double width = ctx.grid.half_length() / 8.0;
    nlohmann::json rows = nlohmann::json::array();
    double best = std::numeric_limits<double>::infinity();
    bool truncated = false;
    for (int j = 0; j <= 10; ++j) {
        const double lambda = std::pow(2.0, j);
        const ProbePoint p = probe_dilation_point(ctx, c, width, lambda, max_points_budget);
        if (!p.resolved) {
            truncated = true;
            rows.push_back({{"lambda", lambda}, {"resolved", false}});
            break;
        }
        best = std::min(best, p.energy);
        rows.push_back({{"lambda", lambda},
                        {"energy", p.energy},
                        {"grid_points", p.grid_points},
                        {"resolved", true}});
    }

    report.measurements["curve"] = rows;
    report.measurements["min_energy"] = best;
    report.measurements["budget_truncated"] = truncated;
    if (best < -bound)
        report.verdict = Verdict::pass;
    else
        report.verdict = truncated ? Verdict::inconclusive : Verdict::fail;
    return report;
}

CriticalThresholdResult critical_threshold(const VerifyContext& ctx, double A_constant) {
    const int n = ctx.grid.dim();
    const double ell = ctx.spec.max_coupling_degree();
    if (std::abs(ell - 4.0 / n) > 1e-9)
        throw std::invalid_argument("critical_threshold: spec degree is not 4/N");
    if (!(A_constant > 0.0))
        throw std::invalid_argument("critical_threshold: A must be positive");

    CriticalThresholdResult out;
    out.gn_constant = estimate_gn_constant(ctx.grid, 4.0 / n);
    out.c_star = std::pow(1.0 / (2.0 * A_constant * out.gn_constant), n / 4.0);

    VerificationReport& report = out.report;
    report.lemma = "critical-threshold";
    report.inputs = spec_inputs(ctx, out.c_star);
    report.inputs["A"] = A_constant;
    report.tolerance = 100.0;

    // Below threshold the flow should settle at a finite energy.
    auto sub = solve_multistart(ctx.grid, 0.5 * out.c_star, ctx.spec, ctx.flow,
                                Functional::J, nullptr, ctx.threads);
    const bool sub_ok = sub.best.converged && std::isfinite(sub.best.energy);

    // Above threshold the dilation curve should fall without bound.
    const double width = ctx.grid.half_length() / 8.0;
    double best = std::numeric_limits<double>::infinity();
    nlohmann::json rows = nlohmann::json::array();
    for (int j = 0; j <= 10 && best > -report.tolerance; ++j) {
        const double lambda = std::pow(2.0, j);
        const ProbePoint p =
            probe_dilation_point(ctx, 2.0 * out.c_star, width, lambda, 1 << 17);
        if (!p.resolved) break;
        best = std::min(best, p.energy);
        rows.push_back({{"lambda", lambda}, {"energy", p.energy}});
    }

    report.measurements["c_star"] = out.c_star;
    report.measurements["gn_constant"] = out.gn_constant;
    report.measurements["subcritical_flow_converged"] = sub_ok;
    report.measurements["subcritical_flow_energy"] = sub.best.energy;
    report.measurements["dilation_curve"] = rows;
    report.measurements["dilation_min_energy"] = best;
    report.verdict =
        (sub_ok && best < -report.tolerance) ? Verdict::pass : Verdict::fail;
    return out;
}

} // namespace vlab
