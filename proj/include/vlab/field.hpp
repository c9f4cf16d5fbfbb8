#pragma once

#include "vlab/grid.hpp"

#include <array>
#include <vector>

namespace vlab {

/// m-component real field on one grid; the discrete candidate on the mass
/// sphere. Components are stored as independent ScalarFields sharing the grid.
class VectorField {
public:
    VectorField(const Grid& grid, int m);
    VectorField(const Grid& grid, std::vector<ScalarField> components);

    const Grid& grid() const { return grid_; }
    int components() const { return static_cast<int>(fields_.size()); }
    ScalarField& component(int i) { return fields_[static_cast<std::size_t>(i)]; }
    const ScalarField& component(int i) const { return fields_[static_cast<std::size_t>(i)]; }

    bool all_finite() const;

private:
    Grid grid_;
    std::vector<ScalarField> fields_;
};

/// Total squared L2 mass: sum_i integral u_i^2.
double mass(const VectorField& u);

/// Sum of the components' gradient energies.
double total_grad_norm_sq(const VectorField& u);

/// Rescale onto the mass sphere: (c / sqrt(mass(u))) * u.
/// Throws when mass(u) is zero (or not finite).
VectorField project_mass(const VectorField& u, double c);

/// Diagnostics filled by dilate() when requested.
struct DilationDiagnostics {
    bool warned = false;
    /// For lambda > 1: spectral energy fraction above k_max/lambda (aliasing
    /// risk in the result). For lambda < 1: boundary-shell amplitude fraction
    /// (wrap-around risk).
    double risk_fraction = 0.0;
};

/// Mass-preserving dilation lambda^{N/2} u(lambda x), sampled on the same
/// grid by trigonometric interpolation with periodic wrap.
VectorField dilate(const VectorField& u, double lambda,
                   DilationDiagnostics* diag = nullptr);

/// Shift by z whole period cells [0,1]^N per axis. Requires 1/h integral so
/// the displacement is an exact grid permutation; mass and gradient energy
/// are preserved exactly.
VectorField lattice_shift(const VectorField& u, const std::array<int, 3>& z);

/// Disjoint-support cutoff pair around a center point.
struct SplitPair {
    VectorField v;
    VectorField w;
    std::array<int, 3> center;
    double inner_radius = 0.0; // R0
    double outer_radius = 0.0; // Rn
    /// Mass of the source field inside the two transition annuli.
    double annulus_mass = 0.0;
};

/// v = chi_in * u and w = chi_out * u where chi_in ramps 1 -> 0 over
/// [R0, 2R0] and chi_out ramps 0 -> 1 over [Rn, min(2Rn, box scale)], both
/// in the torus metric around the given center. Requires 0 < 2*R0 < Rn < L,
/// which makes the supports exactly disjoint.
SplitPair split(const VectorField& u, const std::array<int, 3>& center,
                double r0, double rn);

} // namespace vlab
