#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace vlab {

/// Uniform periodic box [-L, L)^N with M points per axis, N in {1,2,3}.
///
/// Coordinates per axis are x_j = -L + j*h with h = 2L/M; wavenumbers are
/// k_j = (pi/L)*j for j <= M/2 and (pi/L)*(j-M) above. Differentiation and
/// quadrature are exact for trigonometric polynomials resolved by the grid.
/// A Grid is an immutable value; all operations on fields over it are pure.
class Grid {
public:
    /// Validating factory. Requires N in {1,2,3}, even M >= 4, L > 0.
    static Grid make(int dim, int points_per_dim, double half_length);

    int dim() const { return dim_; }
    int points_per_dim() const { return m_; }
    double half_length() const { return l_; }
    double spacing() const { return h_; }
    std::size_t total_points() const { return total_; }
    double cell_volume() const { return cell_volume_; }

    /// Coordinate of axis index j: -L + j*h.
    double coordinate(int j) const { return -l_ + h_ * j; }
    /// Signed wavenumber of axis index j.
    double wavenumber(int j) const;

    std::size_t ravel(const std::array<int, 3>& idx) const;
    std::array<int, 3> unravel(std::size_t flat) const;

    /// Coordinates of a flat index (unused axes are 0).
    std::array<double, 3> point(std::size_t flat) const;
    /// Euclidean distance of a grid point from the origin.
    double radius(std::size_t flat) const;
    /// Torus (periodic) distance between a grid point and a grid center.
    double torus_distance(std::size_t flat, const std::array<int, 3>& center) const;
    /// Largest torus distance between any two points, L*sqrt(N).
    double max_torus_distance() const;

    bool operator==(const Grid& other) const = default;

private:
    Grid(int dim, int m, double l);

    int dim_ = 1;
    int m_ = 0;
    double l_ = 0.0;
    double h_ = 0.0;
    std::size_t total_ = 0;
    double cell_volume_ = 0.0;
};

/// One real component sampled on a Grid, values in row-major axis order
/// (axis 0 slowest, last axis contiguous).
class ScalarField {
public:
    explicit ScalarField(const Grid& grid);
    ScalarField(const Grid& grid, std::vector<double> values);

    /// Sample a function of the grid coordinates.
    static ScalarField sample(const Grid& grid,
                              const std::function<double(const std::array<double, 3>&)>& f);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    const double* data() const { return values_.data(); }
    double* data() { return values_.data(); }

    bool all_finite() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

/// h^N * sum of samples; spectrally accurate quadrature on the periodic box.
double integrate(const ScalarField& f);

/// L2 inner product h^N * sum f*g.
double inner(const ScalarField& f, const ScalarField& g);

/// integral f^2 by direct quadrature.
double integrate_sq(const ScalarField& f);

/// Discrete Laplacian: multiplication by -|k|^2 in the trigonometric basis.
ScalarField laplacian(const ScalarField& f);

/// integral |grad f|^2 = sum |k|^2 |f_hat|^2 (Parseval-normalized).
double grad_norm_sq(const ScalarField& f);

/// integral f^2 evaluated through the transform; equals integrate(f*f) up to
/// roundoff (discrete Parseval identity).
double spectral_norm_sq(const ScalarField& f);

/// Circular shift by whole grid cells per axis (exact permutation).
ScalarField shift_cells(const ScalarField& f, const std::array<int, 3>& cells);

/// FFT workspace bound to one Grid. Owns plans and buffers; not shareable
/// across threads. Construction and destruction serialize on a global
/// planner lock; execution is lock-free.
class Spectral {
public:
    explicit Spectral(const Grid& grid);
    ~Spectral();

    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    const Grid& grid() const { return grid_; }
    /// Number of stored complex bins (last axis halved).
    std::size_t complex_size() const { return cbins_; }
    /// |k|^2 per stored bin.
    std::span<const double> k_squared() const { return k2_; }
    /// Conjugate-pair multiplicity per stored bin (1 or 2).
    std::span<const double> pair_weight() const { return weight_; }

    void laplacian(const ScalarField& f, ScalarField& out);
    double grad_norm_sq(const ScalarField& f);
    double norm_sq(const ScalarField& f);

    /// u <- invfft( fft(u + tau*rhs) / (1 + tau*|k|^2) ).
    void semi_implicit_step(ScalarField& u, const ScalarField& rhs, double tau);

    /// Multiply the spectrum by exp(-(|k|/k_cut)^2); used to smooth noise.
    void gaussian_lowpass(ScalarField& f, double k_cut);

    /// Circular index-space convolution out(y) = sum_x a(x) b(y-x).
    void convolve(const ScalarField& a, const ScalarField& b, ScalarField& out);

    /// Share of spectral energy strictly above |k| = k_cut.
    double high_mode_fraction(const ScalarField& f, double k_cut);

private:
    void forward(const double* in);  // real buffer -> complex buffer
    void backward(double* out);      // complex buffer -> real buffer, normalized

    Grid grid_;
    std::size_t cbins_ = 0;
    std::vector<double> k2_;
    std::vector<double> weight_;
    std::vector<double> neg_k2_;
    std::vector<double> k2_weight_;
    std::vector<double> scratch_real_;
    std::vector<double> scratch_bins_;
    double* real_buf_ = nullptr;    // fftw-allocated
    double* complex_buf_ = nullptr; // interleaved re/im
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
};

} // namespace vlab
