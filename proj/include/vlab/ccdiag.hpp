#pragma once

#include "vlab/energy.hpp"
#include "vlab/field.hpp"
#include "vlab/flow.hpp"
#include "vlab/nonlin.hpp"

#include <json.hpp>

#include <array>
#include <string>
#include <vector>

namespace vlab {

/// Concentration function of one field: Q(R) = max over grid centers y of
/// the mass inside the torus ball B_R(y).
struct ConcentrationProfile {
    std::vector<double> radii;
    std::vector<double> q_values;
    /// Flat index of the maximizing center per radius (diagnostic).
    std::vector<std::size_t> argmax_center;
    double total_mass = 0.0;
};

/// Computed by circular convolution of rho^2 = sum_i u_i^2 with ball
/// indicators of increasing radius; Q is nondecreasing and bounded by the
/// total mass by construction.
ConcentrationProfile concentration_Q(const VectorField& u, std::vector<double> radii);

enum class Trichotomy { vanishing, dichotomy, compact, inconclusive };

std::string to_string(Trichotomy t);

/// Heuristic classifier over a sequence of profiles sharing one radius list
/// and one mass. Thresholds (documented, fixed): mass tolerance eps = 0.05c^2,
/// dichotomy plateau width >= L/4 at an intermediate level, radii capped at
/// L/2 to stay away from torus saturation.
Trichotomy classify_trichotomy(std::span<const ConcentrationProfile> profiles,
                               double c_squared, double box_half_length);

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);

struct VerificationReport {
    std::string lemma;
    nlohmann::json inputs;
    nlohmann::json measurements;
    double tolerance = 0.0;
    Verdict verdict = Verdict::inconclusive;

    nlohmann::json to_json() const;
};

/// Shared solver knobs for the verifiers.
struct VerifyContext {
    Grid grid;
    NonlinearitySpec spec;
    FlowConfig flow;
    int threads = 1;
};

/// Energy along the mass-preserving dilation curve of a radial trial field;
/// passes when some lambda yields J < -tol. Reports the measured small-lambda
/// power-law exponent next to the predicted (N/2)alpha - N + t when constants
/// are supplied.
VerificationReport verify_negativity(const VerifyContext& ctx, double c,
                                     std::span<const double> lambdas,
                                     double tol = 1e-8,
                                     const AssumptionConstants* constants = nullptr,
                                     const VectorField* trial = nullptr);

/// I_c vs I_a + I_b with b = sqrt(c^2 - a^2) over a list of mass fractions.
/// Non-strict for J, strict (gap > tol) for Jinf.
VerificationReport verify_subadditivity(const VerifyContext& ctx, double c,
                                        std::span<const double> fractions,
                                        Functional functional);

/// I_c <= I_c^inf - tol, plus the mixed splittings
/// I_c <= I_a + I^inf_b - tol at fractions {0.3, 0.5, 0.7}.
VerificationReport verify_comparison(const VerifyContext& ctx, double c);

/// Three-point continuity probe at c-delta, c, c+delta.
VerificationReport verify_continuity(const VerifyContext& ctx, double c, double delta);

/// Dilation sweep lambda = 2^0..2^10 with analytic Gaussian trials on
/// adaptively refined grids; passes when some energy drops below -bound.
VerificationReport probe_supercritical(const VerifyContext& ctx, double c, double bound,
                                       int max_points_budget = 1 << 17);

/// Critical-mass threshold c* = (1/(2 A A''))^{N/4} at ell = 4/N, with an
/// attached flow run at c*/2 and a dilation probe at 2c*.
struct CriticalThresholdResult {
    double c_star = 0.0;
    double gn_constant = 0.0;
    VerificationReport report;
};

CriticalThresholdResult critical_threshold(const VerifyContext& ctx, double A_constant);

} // namespace vlab
