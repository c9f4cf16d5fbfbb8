#pragma once

#include "vlab/field.hpp"
#include "vlab/nonlin.hpp"

#include <span>

namespace vlab {

enum class Functional { J, Jinf };

struct EnergyBreakdown {
    double kinetic = 0.0;   // 1/2 sum_i |grad u_i|_2^2
    double potential = 0.0; // integral F(x,u)
    double total = 0.0;     // kinetic - potential
};

/// Energy, L2-gradient and Euler-Lagrange diagnostics for one grid and one
/// nonlinearity. Holds the FFT workspace and the per-point radius table, so
/// repeated evaluations (the flow's inner loop) do no setup work. One
/// evaluator per thread; all methods are const-correct w.r.t. the fields.
class EnergyEvaluator {
public:
    EnergyEvaluator(const Grid& grid, const NonlinearitySpec& spec);

    const Grid& grid() const { return grid_; }
    const NonlinearitySpec& spec() const { return spec_; }

    EnergyBreakdown energy(const VectorField& u, Functional f);

    /// Pointwise dF_i(x, u) (or dFinf_i) sampled on the grid.
    void nonlinear_force(const VectorField& u, Functional f, VectorField& out);

    /// Component i of the L2-gradient: -lap(u_i) - dF_i(x,u), so that the
    /// Euler-Lagrange system reads gradient(u) = lambda * u.
    void gradient(const VectorField& u, Functional f, VectorField& out);
    VectorField gradient(const VectorField& u, Functional f);

    /// L2-projection coefficient of gradient(u) onto u.
    double multiplier(const VectorField& u, Functional f);

    /// |gradient(u) - lambda u|_2 / max(|gradient(u)|_2, eps).
    double el_residual(const VectorField& u, Functional f);

    /// Same diagnostics reusing an already-computed gradient.
    double multiplier_of(const VectorField& u, const VectorField& grad) const;
    double residual_of(const VectorField& u, const VectorField& grad,
                       double* lambda_out = nullptr) const;

    Spectral& spectral() { return ws_; }

private:
    double potential(const VectorField& u, Functional f);

    Grid grid_;
    NonlinearitySpec spec_;
    Spectral ws_;
    std::vector<double> radius_;
    ScalarField lap_scratch_;
};

EnergyBreakdown energy_J(const VectorField& u, const NonlinearitySpec& spec);
EnergyBreakdown energy_Jinf(const VectorField& u, const NonlinearitySpec& spec);
VectorField grad_J(const VectorField& u, const NonlinearitySpec& spec);
VectorField grad_Jinf(const VectorField& u, const NonlinearitySpec& spec);
double multiplier(const VectorField& u, const NonlinearitySpec& spec,
                  Functional f = Functional::J);
double el_residual(const VectorField& u, const NonlinearitySpec& spec,
                   Functional f = Functional::J);

/// One interpolation-inequality measurement:
///   lhs  = |u|_{l+2}^{l+2}
///   rhs  = A'' |u|_2^{(1-sigma)(l+2)} |grad u|_2^{sigma(l+2)}
/// with sigma = (N/2) l/(l+2); the inequality holds iff ratio <= 1.
struct GNReport {
    double sigma = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double constant = 0.0; // the A'' used
    double ratio = 0.0;
};

GNReport gn_check(const ScalarField& u, double ell, double A_dd);

/// Largest lhs/denominator ratio over a built-in trial family (Gaussians,
/// sech and sech^{2/l} profiles over a width sweep) plus optional extra
/// trials. A certified lower bound on the sharp constant for this grid.
double estimate_gn_constant(const Grid& grid, double ell,
                            std::span<const ScalarField> extra_trials = {});

/// Constants of the kinetic-coercivity lower bound
///   J(u) >= A1 |grad u|_2^2 - A2 c^2 - A3 c^{(1-sigma)(l+2) q}
/// with eps fixed so A1 = 1/4 and q the Young conjugate of 4/(N l).
struct CoercivityBound {
    double A1 = 0.0, A2 = 0.0, A3 = 0.0;
    double q = 0.0, eps = 0.0;
    double sigma = 0.0, ell = 0.0;

    double lower_bound(double grad_sq_total, double c) const;
};

CoercivityBound coercivity_bound(double A, double A_dd, int dim, double ell, int m);

} // namespace vlab
