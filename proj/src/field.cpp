#include "vlab/field.hpp"

#include "vlab/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vlab {

VectorField::VectorField(const Grid& grid, int m) : grid_(grid) {
    if (m < 1) throw std::invalid_argument("VectorField: need at least one component");
    fields_.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) fields_.emplace_back(grid);
}

VectorField::VectorField(const Grid& grid, std::vector<ScalarField> components)
    : grid_(grid), fields_(std::move(components)) {
    if (fields_.empty())
        throw std::invalid_argument("VectorField: need at least one component");
    for (const auto& f : fields_)
        if (!(f.grid() == grid_))
            throw std::invalid_argument("VectorField: components on different grids");
}

bool VectorField::all_finite() const {
    for (const auto& f : fields_)
        if (!f.all_finite()) return false;
    return true;
}

double mass(const VectorField& u) {
    auto& ops = kernels::active();
    double total = 0.0;
    for (int i = 0; i < u.components(); ++i) {
        const auto& f = u.component(i);
        total += ops.sum_sq(f.data(), f.size());
    }
    return total * u.grid().cell_volume();
}

double total_grad_norm_sq(const VectorField& u) {
    Spectral ws(u.grid());
    double total = 0.0;
    for (int i = 0; i < u.components(); ++i) total += ws.grad_norm_sq(u.component(i));
    return total;
}

VectorField project_mass(const VectorField& u, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("project_mass: c must be positive");
    const double m = mass(u);
    if (!(m > 0.0) || !std::isfinite(m))
        throw std::invalid_argument("project_mass: field has zero or non-finite mass");
    const double factor = c / std::sqrt(m);
    VectorField out = u;
    auto& ops = kernels::active();
    for (int i = 0; i < out.components(); ++i) {
        auto& f = out.component(i);
        ops.scale(f.data(), factor, f.size());
    }
    return out;
}

namespace {

// Periodic band-limited interpolation kernel for even M on a period-2L box:
// S(d) = sin(pi d / h) / (M tan(pi d / (2L))), the exact interpolant of the
// resolved trigonometric span (cosine convention at the Nyquist mode).
double periodic_sinc(double d, int m, double l) {
    const double period = 2.0 * l;
    d -= period * std::round(d / period);
    const double t = std::numbers::pi * d / period;
    if (std::abs(t) < 1e-13) return 1.0;
    return std::sin(m * t) * std::cos(t) / (m * std::sin(t));
}

// Dense per-axis interpolation matrix evaluating at targets lambda*x_a.
std::vector<double> dilation_matrix(const Grid& g, double lambda) {
    const int m = g.points_per_dim();
    std::vector<double> t(static_cast<std::size_t>(m) * m);
    for (int a = 0; a < m; ++a) {
        const double y = lambda * g.coordinate(a);
        for (int n = 0; n < m; ++n)
            t[static_cast<std::size_t>(a) * m + n] =
                periodic_sinc(y - g.coordinate(n), m, g.half_length());
    }
    return t;
}

// Apply an MxM matrix along one axis of the row-major field.
void apply_along_axis(const Grid& g, int axis, const std::vector<double>& t,
                      const std::vector<double>& in, std::vector<double>& out) {
    const int m = g.points_per_dim();
    const int n = g.dim();
    std::size_t stride = 1;
    for (int a = n - 1; a > axis; --a) stride *= static_cast<std::size_t>(m);
    const std::size_t block = stride * static_cast<std::size_t>(m);
    const std::size_t nblocks = g.total_points() / block;
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::size_t base = b * block;
        for (std::size_t s = 0; s < stride; ++s) {
            for (int a = 0; a < m; ++a) {
                double acc = 0.0;
                const double* row = &t[static_cast<std::size_t>(a) * m];
                for (int k = 0; k < m; ++k)
                    acc += row[k] * in[base + s + static_cast<std::size_t>(k) * stride];
                out[base + s + static_cast<std::size_t>(a) * stride] = acc;
            }
        }
    }
}

// Amplitude fraction held beyond |x|_inf >= shell, relative to the peak.
double shell_amplitude_fraction(const ScalarField& f, double shell) {
    const Grid& g = f.grid();
    double max_all = 0.0, max_shell = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double v = std::abs(f[i]);
        max_all = std::max(max_all, v);
        const auto x = g.point(i);
        double linf = 0.0;
        for (int a = 0; a < g.dim(); ++a) linf = std::max(linf, std::abs(x[a]));
        if (linf >= shell) max_shell = std::max(max_shell, v);
    }
    return max_all > 0.0 ? max_shell / max_all : 0.0;
}

} // namespace

VectorField dilate(const VectorField& u, double lambda, DilationDiagnostics* diag) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("dilate: lambda must be positive and finite");
    const Grid& g = u.grid();

    if (diag) {
        diag->warned = false;
        diag->risk_fraction = 0.0;
        if (lambda > 1.0) {
            // Two failure modes when shrinking: the result's spectrum spills
            // past the grid (content of u above k_max/lambda), and the map
            // lambda*x leaves the box and wraps back into the support of u
            // (content of u beyond |x| = (2/lambda - 1) L).
            const double k_max = std::numbers::pi / g.spacing();
            const double shell = std::max(0.0, 2.0 / lambda - 1.0) * g.half_length();
            Spectral ws(g);
            double worst = 0.0;
            for (int i = 0; i < u.components(); ++i) {
                worst = std::max(worst,
                                 ws.high_mode_fraction(u.component(i), k_max / lambda));
                worst = std::max(worst, shell_amplitude_fraction(u.component(i), shell));
            }
            diag->risk_fraction = worst;
            diag->warned = worst > 1e-8;
        } else if (lambda < 1.0) {
            // Spreading maps the box into itself, so the interpolant is
            // evaluated exactly; report how much of the result reaches the
            // boundary (it leaves the whole-space reading, not the grid).
            double worst = 0.0;
            for (int i = 0; i < u.components(); ++i)
                worst = std::max(worst,
                                 shell_amplitude_fraction(u.component(i),
                                                          0.9 * lambda * g.half_length()));
            diag->risk_fraction = worst;
        }
    }

    const auto t = dilation_matrix(g, lambda);
    const double amp = std::pow(lambda, 0.5 * g.dim());
    VectorField out(g, u.components());
    std::vector<double> work(g.total_points());
    std::vector<double> work2(g.total_points());
    for (int i = 0; i < u.components(); ++i) {
        const auto& src = u.component(i);
        work.assign(src.values().begin(), src.values().end());
        for (int axis = 0; axis < g.dim(); ++axis) {
            apply_along_axis(g, axis, t, work, work2);
            std::swap(work, work2);
        }
        auto& dst = out.component(i);
        for (std::size_t p = 0; p < work.size(); ++p) dst[p] = amp * work[p];
    }
    return out;
}

VectorField lattice_shift(const VectorField& u, const std::array<int, 3>& z) {
    const Grid& g = u.grid();
    const double cells_per_unit = 1.0 / g.spacing();
    const double rounded = std::round(cells_per_unit);
    if (std::abs(cells_per_unit - rounded) > 1e-9)
        throw std::invalid_argument(
            "lattice_shift: 1/h is not an integer; choose M = 2*L*k");
    const int per_unit = static_cast<int>(rounded);
    std::array<int, 3> cells = {0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) cells[a] = z[a] * per_unit;
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(u.components()));
    for (int i = 0; i < u.components(); ++i)
        comps.push_back(shift_cells(u.component(i), cells));
    return VectorField(g, std::move(comps));
}

SplitPair split(const VectorField& u, const std::array<int, 3>& center,
                double r0, double rn) {
    const Grid& g = u.grid();
    if (!(r0 > 0.0) || !(2.0 * r0 < rn) || !(rn < g.half_length()))
        throw std::invalid_argument("split: need 0 < 2*R0 < Rn < L");

    const double outer_end = std::min(2.0 * rn, g.max_torus_distance());
    auto chi_in = [r0](double d) {
        if (d <= r0) return 1.0;
        if (d >= 2.0 * r0) return 0.0;
        return 2.0 - d / r0;
    };
    auto chi_out = [rn, outer_end](double d) {
        if (d <= rn) return 0.0;
        if (d >= outer_end) return 1.0;
        return (d - rn) / (outer_end - rn);
    };

    SplitPair pair{VectorField(g, u.components()), VectorField(g, u.components()),
                   center, r0, rn, 0.0};
    double annulus = 0.0;
    for (std::size_t p = 0; p < g.total_points(); ++p) {
        const double d = g.torus_distance(p, center);
        const double ci = chi_in(d);
        const double co = chi_out(d);
        const bool in_annulus = (d > r0 && d < 2.0 * r0) || (d > rn && d < outer_end);
        double rho2 = 0.0;
        for (int i = 0; i < u.components(); ++i) {
            const double val = u.component(i)[p];
            pair.v.component(i)[p] = ci * val;
            pair.w.component(i)[p] = co * val;
            rho2 += val * val;
        }
        if (in_annulus) annulus += rho2;
    }
    pair.annulus_mass = annulus * g.cell_volume();
    return pair;
}

} // namespace vlab
