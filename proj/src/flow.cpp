#include "vlab/flow.hpp"

#include "vlab/kernels.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace vlab {

namespace {

double relative_mass_error(double m, double c) {
    return std::abs(m - c * c) / (c * c);
}

} // namespace

MinimizeResult minimize(const VectorField& init, double c,
                        const NonlinearitySpec& spec, const FlowConfig& config,
                        Functional functional) {
    if (!(c > 0.0)) throw std::invalid_argument("minimize: c must be positive");
    if (!(config.tau > 0.0)) throw std::invalid_argument("minimize: tau must be positive");
    if (!(config.residual_tol > 0.0) || !(config.energy_tol > 0.0))
        throw std::invalid_argument("minimize: tolerances must be positive");

    const Grid& grid = init.grid();
    EnergyEvaluator eval(grid, spec);
    auto& ops = kernels::active();

    VectorField u = project_mass(init, c);
    VectorField grad(grid, u.components());
    VectorField force(grid, u.components());
    VectorField candidate(grid, u.components());

    EnergyBreakdown e = eval.energy(u, functional);
    if (!std::isfinite(e.total))
        throw std::runtime_error("minimize: non-finite energy at the initial point");

    MinimizeResult res{u};
    double lambda = 0.0;
    eval.gradient(u, functional, grad);
    double residual = eval.residual_of(u, grad, &lambda);
    res.trace.push_back({0, e.total, e.kinetic, e.potential,
                         relative_mass_error(mass(u), c), residual, config.tau});

    int stagnant = 0;
    double residual_at_stagnation = 0.0;
    int iter = 0;
    std::string reason = "max-iters";
    bool converged = residual <= config.residual_tol;
    if (converged) reason = "residual";

    VectorField shifted_force(grid, u.components());
    while (!converged && iter < config.max_iters) {
        ++iter;
        if (config.scheme == Scheme::semi_implicit)
            eval.nonlinear_force(u, functional, force);

        double tau = config.tau;
        bool accepted = false;
        bool have_candidate_energy = false;
        EnergyBreakdown e_new;
        const int tries = config.backtracking ? config.max_halvings + 1 : 1;
        for (int attempt = 0; attempt < tries; ++attempt) {
            candidate = u;
            if (config.scheme == Scheme::semi_implicit) {
                // Multiplier-shifted step: solve (1 + tau k^2) u+ =
                // u (1 + tau lambda) + tau dF. At an Euler-Lagrange point the
                // right side equals (1 + tau k^2) u, so stationary states are
                // exact fixed points; the unshifted scheme carries an
                // O(tau*lambda) stationary bias that stalls the residual.
                const double shift = std::max(lambda, -0.9 / tau);
                for (int i = 0; i < u.components(); ++i) {
                    auto& sf = shifted_force.component(i);
                    ops.add_scaled(sf.data(), force.component(i).data(), shift,
                                   u.component(i).data(), sf.size());
                    eval.spectral().semi_implicit_step(candidate.component(i), sf, tau);
                }
            } else {
                for (int i = 0; i < u.components(); ++i) {
                    auto& f = candidate.component(i);
                    ops.axpy(f.data(), grad.component(i).data(), -tau, f.size());
                }
            }
            const double m_cand = mass(candidate);
            if (!(m_cand > 0.0) || !std::isfinite(m_cand)) {
                tau *= 0.5;
                continue;
            }
            candidate = project_mass(candidate, c);
            e_new = eval.energy(candidate, functional);
            have_candidate_energy = std::isfinite(e_new.total);
            if (!have_candidate_energy) {
                if (!config.backtracking)
                    throw std::runtime_error("minimize: non-finite energy at iteration " +
                                             std::to_string(iter));
                tau *= 0.5;
                continue;
            }
            // The total is a kinetic-potential cancellation; near a minimizer
            // the true decrease falls below its roundoff, so accept steps
            // that are nonincreasing up to that noise floor.
            const double noise =
                16.0 * std::numeric_limits<double>::epsilon() *
                (std::abs(e.kinetic) + std::abs(e.potential) +
                 std::abs(e_new.kinetic) + std::abs(e_new.potential));
            if (!config.backtracking || e_new.total <= e.total + noise) {
                accepted = true;
                break;
            }
            tau *= 0.5;
        }

        if (!accepted) {
            // Every halving increased the energy. Treat as stagnation when the
            // increase is within the stagnation tolerance, else report failure.
            if (have_candidate_energy &&
                std::abs(e_new.total - e.total) <=
                    config.energy_tol * std::max(std::abs(e.total), 1.0)) {
                reason = "stagnation";
                break;
            }
            throw std::runtime_error("minimize: backtracking exhausted at iteration " +
                                     std::to_string(iter));
        }

        const double delta_e = std::abs(e_new.total - e.total);
        u = std::move(candidate);
        candidate = VectorField(grid, u.components());
        e = e_new;

        const double merr = relative_mass_error(mass(u), c);
        res.mass_error = std::max(res.mass_error, merr);

        eval.gradient(u, functional, grad);
        residual = eval.residual_of(u, grad, &lambda);

        if (iter % std::max(1, config.trace_stride) == 0 || iter == config.max_iters)
            res.trace.push_back({iter, e.total, e.kinetic, e.potential, merr,
                                 residual, tau});

        res.energy_error_estimate = delta_e;
        if (residual <= config.residual_tol) {
            converged = true;
            reason = "residual";
            break;
        }
        // Energy stagnation alone can fire while the residual is still
        // contracting (slow schemes make tiny energy steps); require ten tiny
        // steps AND a frozen residual over the same window before giving up.
        if (delta_e <= config.energy_tol * std::max(std::abs(e.total), 1e-300)) {
            if (stagnant == 0) residual_at_stagnation = residual;
            if (++stagnant >= 10) {
                if (residual > 0.999 * residual_at_stagnation) {
                    reason = "stagnation";
                    break;
                }
                stagnant = 0;
            }
        } else {
            stagnant = 0;
        }
    }

    res.minimizer = std::move(u);
    res.energy = e.total;
    res.kinetic = e.kinetic;
    res.potential = e.potential;
    res.multiplier = lambda;
    res.residual = residual;
    res.iterations = iter;
    res.converged = converged;
    res.stop_reason = reason;
    if (res.trace.empty() || res.trace.back().iter != iter)
        res.trace.push_back({iter, e.total, e.kinetic, e.potential,
                             relative_mass_error(mass(res.minimizer), c), residual,
                             config.tau});
    return res;
}

VectorField default_init(const Grid& grid, int m, double c, InitStyle style,
                         std::uint64_t seed) {
    VectorField u(grid, m);
    switch (style) {
    case InitStyle::constant: {
        double vol = 1.0;
        for (int a = 0; a < grid.dim(); ++a) vol *= 2.0 * grid.half_length();
        const double value = c / std::sqrt(m * vol);
        for (int i = 0; i < m; ++i)
            for (std::size_t p = 0; p < grid.total_points(); ++p)
                u.component(i)[p] = value;
        return u; // exact mass by construction
    }
    case InitStyle::gaussian_bumps: {
        const double w = grid.half_length() / 4.0;
        for (int i = 0; i < m; ++i) {
            u.component(i) = ScalarField::sample(grid, [&](const std::array<double, 3>& x) {
                double r2 = 0.0;
                for (int a = 0; a < grid.dim(); ++a) r2 += x[a] * x[a];
                return std::exp(-r2 / (w * w));
            });
        }
        return project_mass(u, c);
    }
    case InitStyle::random_smooth: {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        Spectral ws(grid);
        const double k_cut = std::numbers::pi / grid.half_length() *
                             (grid.points_per_dim() / 8.0);
        for (int i = 0; i < m; ++i) {
            auto& f = u.component(i);
            for (std::size_t p = 0; p < grid.total_points(); ++p) f[p] = normal(rng);
            ws.gaussian_lowpass(f, k_cut);
        }
        return project_mass(u, c);
    }
    }
    throw std::invalid_argument("default_init: unknown style");
}

MultistartResult solve_multistart(const Grid& grid, double c,
                                  const NonlinearitySpec& spec,
                                  const FlowConfig& config, Functional functional,
                                  const VectorField* warm_start, int threads) {
    if (config.multistart < 1)
        throw std::invalid_argument("solve_multistart: multistart must be >= 1");

    struct Job {
        std::string style;
        std::uint64_t seed;
        VectorField init;
    };
    std::vector<Job> jobs;
    for (int k = 0; k < config.multistart; ++k) {
        const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(k);
        if (k == 0)
            jobs.push_back({"gaussian-bumps", seed,
                            default_init(grid, spec.components(), c,
                                         InitStyle::gaussian_bumps, seed)});
        else
            jobs.push_back({"random-smooth", seed,
                            default_init(grid, spec.components(), c,
                                         InitStyle::random_smooth, seed)});
    }
    if (warm_start) jobs.push_back({"warm-start", config.seed, *warm_start});

    std::vector<MinimizeResult> results;
    results.reserve(jobs.size());
    if (threads <= 1 || jobs.size() == 1) {
        for (const auto& job : jobs)
            results.push_back(minimize(job.init, c, spec, config, functional));
    } else {
        std::vector<std::future<MinimizeResult>> futures;
        futures.reserve(jobs.size());
        for (const auto& job : jobs)
            futures.push_back(std::async(std::launch::async, [&, init = job.init] {
                return minimize(init, c, spec, config, functional);
            }));
        for (auto& f : futures) results.push_back(f.get());
    }

    double conv_min = std::numeric_limits<double>::infinity();
    double conv_max = -std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    bool best_converged = false;
    for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& r = results[k];
        if (r.converged) {
            conv_min = std::min(conv_min, r.energy);
            conv_max = std::max(conv_max, r.energy);
        }
        const bool better = r.converged
                                ? (!best_converged || r.energy < results[best_index].energy)
                                : (!best_converged && r.energy < results[best_index].energy);
        if (k == 0 || better) {
            best_index = k;
            best_converged = r.converged;
        }
    }

    MultistartResult out{std::move(results[best_index])};
    for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& r = (k == best_index) ? out.best : results[k];
        out.runs.push_back({static_cast<int>(k), jobs[k].style, jobs[k].seed, r.energy,
                            r.converged, r.iterations});
    }
    out.multiple_minima_flag =
        std::isfinite(conv_min) && (conv_max - conv_min) > 1e-4;
    return out;
}

std::vector<ScanPoint> scan_mass(const Grid& grid, std::span<const double> c_values,
                                 const NonlinearitySpec& spec, const FlowConfig& config,
                                 Functional functional, int threads) {
    if (c_values.empty()) throw std::invalid_argument("scan_mass: empty mass list");
    for (std::size_t i = 0; i < c_values.size(); ++i) {
        if (!(c_values[i] > 0.0))
            throw std::invalid_argument("scan_mass: masses must be positive");
        if (i > 0 && !(c_values[i] > c_values[i - 1]))
            throw std::invalid_argument("scan_mass: masses must be strictly increasing");
    }

    std::vector<ScanPoint> points;
    points.reserve(c_values.size());
    std::optional<VectorField> warm;
    for (double c : c_values) {
        const VectorField* warm_ptr = nullptr;
        std::optional<VectorField> rescaled;
        if (warm) {
            rescaled = project_mass(*warm, c);
            warm_ptr = &*rescaled;
        }
        auto result = solve_multistart(grid, c, spec, config, functional, warm_ptr, threads);
        points.push_back({c, result.best.energy, result.best.multiplier,
                          result.best.residual, result.best.converged});
        warm = std::move(result.best.minimizer);
    }
    return points;
}

} // namespace vlab
