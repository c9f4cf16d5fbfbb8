#pragma once

#include "vlab/energy.hpp"
#include "vlab/field.hpp"
#include "vlab/nonlin.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vlab {

enum class Scheme { explicit_euler, semi_implicit };
enum class InitStyle { gaussian_bumps, random_smooth, constant };

struct FlowConfig {
    Scheme scheme = Scheme::semi_implicit;
    double tau = 0.5;
    int max_iters = 20000;
    double residual_tol = 1e-6;
    double energy_tol = 1e-10; // relative stagnation threshold per step
    bool backtracking = true;
    int max_halvings = 30;
    std::uint64_t seed = 1;
    int multistart = 3;
    int trace_stride = 1;
};

struct TraceRow {
    int iter = 0;
    double energy = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    double mass_error = 0.0;
    double residual = 0.0;
    double tau = 0.0;
};

struct MinimizeResult {
    VectorField minimizer;
    double energy = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    double multiplier = 0.0;
    double residual = 0.0;
    int iterations = 0;
    std::vector<TraceRow> trace;
    bool converged = false;                // true only via the residual criterion
    std::string stop_reason;               // residual | stagnation | max-iters | ...
    double mass_error = 0.0;               // worst relative error over all iterates
    double energy_error_estimate = 0.0;    // |dJ| over the last stagnation window
};

/// Normalized gradient flow on the mass sphere: descend, then rescale back to
/// mass c^2, so the constraint holds exactly after every iteration. With
/// backtracking on, each accepted step does not increase the energy.
MinimizeResult minimize(const VectorField& init, double c,
                        const NonlinearitySpec& spec, const FlowConfig& config,
                        Functional functional);

/// Deterministic initial fields of mass c^2. random_smooth is seeded
/// low-pass-filtered noise; the same seed gives a bit-identical field.
VectorField default_init(const Grid& grid, int m, double c, InitStyle style,
                         std::uint64_t seed);

struct RunSummary {
    int index = 0;
    std::string style;
    std::uint64_t seed = 0;
    double energy = 0.0;
    bool converged = false;
    int iterations = 0;
};

struct MultistartResult {
    MinimizeResult best;
    std::vector<RunSummary> runs;
    /// Set when two converged runs disagree by more than 1e-4 in energy:
    /// evidence of multiple local minima, not of a wrong answer.
    bool multiple_minima_flag = false;
};

/// Runs minimize from `multistart` inits (gaussian bumps first, then seeded
/// smooth noise) plus an optional warm start; returns the lowest-energy
/// converged run, or the best nonconverged one when none converges.
MultistartResult solve_multistart(const Grid& grid, double c,
                                  const NonlinearitySpec& spec,
                                  const FlowConfig& config, Functional functional,
                                  const VectorField* warm_start = nullptr,
                                  int threads = 1);

struct ScanPoint {
    double c = 0.0;
    double energy = 0.0;
    double multiplier = 0.0;
    double residual = 0.0;
    bool converged = false;
};

/// Solves along a sorted list of masses, warm-starting each solve from the
/// previous minimizer rescaled onto the new sphere.
std::vector<ScanPoint> scan_mass(const Grid& grid, std::span<const double> c_values,
                                 const NonlinearitySpec& spec, const FlowConfig& config,
                                 Functional functional, int threads = 1);

} // namespace vlab
