#include "vlab/grid.hpp"

#include "vlab/kernels.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace vlab {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

Grid Grid::make(int dim, int points_per_dim, double half_length) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("Grid: dimension must be 1, 2 or 3");
    if (points_per_dim < 4 || points_per_dim % 2 != 0)
        throw std::invalid_argument("Grid: points per axis must be even and >= 4");
    if (!(half_length > 0.0) || !std::isfinite(half_length))
        throw std::invalid_argument("Grid: half-length must be positive and finite");
    return Grid(dim, points_per_dim, half_length);
}

Grid::Grid(int dim, int m, double l) : dim_(dim), m_(m), l_(l) {
    h_ = 2.0 * l_ / m_;
    total_ = 1;
    cell_volume_ = 1.0;
    for (int a = 0; a < dim_; ++a) {
        total_ *= static_cast<std::size_t>(m_);
        cell_volume_ *= h_;
    }
}

double Grid::wavenumber(int j) const {
    const int signed_j = (j <= m_ / 2) ? j : j - m_;
    return std::numbers::pi / l_ * signed_j;
}

std::size_t Grid::ravel(const std::array<int, 3>& idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim_; ++a)
        flat = flat * static_cast<std::size_t>(m_) + static_cast<std::size_t>(idx[a]);
    return flat;
}

std::array<int, 3> Grid::unravel(std::size_t flat) const {
    std::array<int, 3> idx = {0, 0, 0};
    for (int a = dim_ - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % static_cast<std::size_t>(m_));
        flat /= static_cast<std::size_t>(m_);
    }
    return idx;
}

std::array<double, 3> Grid::point(std::size_t flat) const {
    const auto idx = unravel(flat);
    std::array<double, 3> x = {0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) x[a] = coordinate(idx[a]);
    return x;
}

double Grid::radius(std::size_t flat) const {
    const auto x = point(flat);
    double r2 = 0.0;
    for (int a = 0; a < dim_; ++a) r2 += x[a] * x[a];
    return std::sqrt(r2);
}

double Grid::torus_distance(std::size_t flat, const std::array<int, 3>& center) const {
    const auto idx = unravel(flat);
    double d2 = 0.0;
    for (int a = 0; a < dim_; ++a) {
        int dj = std::abs(idx[a] - center[a]);
        dj = std::min(dj, m_ - dj);
        const double d = dj * h_;
        d2 += d * d;
    }
    return std::sqrt(d2);
}

double Grid::max_torus_distance() const {
    return l_ * std::sqrt(static_cast<double>(dim_));
}

ScalarField::ScalarField(const Grid& grid)
    : grid_(grid), values_(grid.total_points(), 0.0) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.total_points())
        throw std::invalid_argument("ScalarField: value count does not match grid");
}

ScalarField ScalarField::sample(const Grid& grid,
                                const std::function<double(const std::array<double, 3>&)>& f) {
    ScalarField out(grid);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(grid.point(i));
    return out;
}

bool ScalarField::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

double integrate(const ScalarField& f) {
    return f.grid().cell_volume() * kernels::active().sum(f.data(), f.size());
}

double inner(const ScalarField& f, const ScalarField& g) {
    if (!(f.grid() == g.grid()))
        throw std::invalid_argument("inner: fields live on different grids");
    return f.grid().cell_volume() * kernels::active().dot(f.data(), g.data(), f.size());
}

double integrate_sq(const ScalarField& f) {
    return f.grid().cell_volume() * kernels::active().sum_sq(f.data(), f.size());
}

ScalarField laplacian(const ScalarField& f) {
    Spectral ws(f.grid());
    ScalarField out(f.grid());
    ws.laplacian(f, out);
    return out;
}

double grad_norm_sq(const ScalarField& f) {
    Spectral ws(f.grid());
    return ws.grad_norm_sq(f);
}

double spectral_norm_sq(const ScalarField& f) {
    Spectral ws(f.grid());
    return ws.norm_sq(f);
}

ScalarField shift_cells(const ScalarField& f, const std::array<int, 3>& cells) {
    const Grid& g = f.grid();
    const int m = g.points_per_dim();
    auto wrap = [m](int j) {
        j %= m;
        return j < 0 ? j + m : j;
    };
    ScalarField out(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto idx = g.unravel(i);
        // out(x) = f(x + z*h) with periodic wrap, matching u(x + z) in cells.
        for (int a = 0; a < g.dim(); ++a) idx[a] = wrap(idx[a] + cells[a]);
        out[i] = f[g.ravel(idx)];
    }
    return out;
}

Spectral::Spectral(const Grid& grid) : grid_(grid) {
    const int m = grid_.points_per_dim();
    const int n = grid_.dim();
    cbins_ = 1;
    for (int a = 0; a < n - 1; ++a) cbins_ *= static_cast<std::size_t>(m);
    cbins_ *= static_cast<std::size_t>(m / 2 + 1);

    k2_.resize(cbins_);
    weight_.resize(cbins_);
    const int mlast = m / 2 + 1;
    for (std::size_t b = 0; b < cbins_; ++b) {
        std::size_t rest = b;
        const int jlast = static_cast<int>(rest % static_cast<std::size_t>(mlast));
        rest /= static_cast<std::size_t>(mlast);
        std::array<int, 3> j = {0, 0, 0};
        j[n - 1] = jlast;
        for (int a = n - 2; a >= 0; --a) {
            j[a] = static_cast<int>(rest % static_cast<std::size_t>(m));
            rest /= static_cast<std::size_t>(m);
        }
        double k2 = 0.0;
        for (int a = 0; a < n; ++a) {
            const double k = grid_.wavenumber(j[a]);
            k2 += k * k;
        }
        k2_[b] = k2;
        weight_[b] = (jlast == 0 || jlast == m / 2) ? 1.0 : 2.0;
    }
    neg_k2_.resize(cbins_);
    k2_weight_.resize(cbins_);
    for (std::size_t b = 0; b < cbins_; ++b) {
        neg_k2_[b] = -k2_[b];
        k2_weight_[b] = weight_[b] * k2_[b];
    }

    std::scoped_lock lock(planner_mutex());
    real_buf_ = fftw_alloc_real(grid_.total_points());
    complex_buf_ = reinterpret_cast<double*>(fftw_alloc_complex(cbins_));
    int dims[3] = {m, m, m};
    plan_fwd_ = fftw_plan_dft_r2c(n, dims, real_buf_,
                                  reinterpret_cast<fftw_complex*>(complex_buf_),
                                  FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_c2r(n, dims,
                                  reinterpret_cast<fftw_complex*>(complex_buf_),
                                  real_buf_, FFTW_ESTIMATE);
    if (!plan_fwd_ || !plan_bwd_)
        throw std::runtime_error("Spectral: FFT plan creation failed");
}

Spectral::~Spectral() {
    std::scoped_lock lock(planner_mutex());
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(real_buf_);
    fftw_free(complex_buf_);
}

void Spectral::forward(const double* in) {
    std::copy(in, in + grid_.total_points(), real_buf_);
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
}

void Spectral::backward(double* out) {
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    const double inv = 1.0 / static_cast<double>(grid_.total_points());
    for (std::size_t i = 0; i < grid_.total_points(); ++i) out[i] = real_buf_[i] * inv;
}

void Spectral::laplacian(const ScalarField& f, ScalarField& out) {
    forward(f.data());
    kernels::active().complex_scale(complex_buf_, neg_k2_.data(), cbins_);
    backward(out.data());
}

double Spectral::grad_norm_sq(const ScalarField& f) {
    forward(f.data());
    const double raw =
        kernels::active().complex_norm_weighted(complex_buf_, k2_weight_.data(), cbins_);
    return raw * grid_.cell_volume() / static_cast<double>(grid_.total_points());
}

double Spectral::norm_sq(const ScalarField& f) {
    forward(f.data());
    const double raw =
        kernels::active().complex_norm_weighted(complex_buf_, weight_.data(), cbins_);
    return raw * grid_.cell_volume() / static_cast<double>(grid_.total_points());
}

void Spectral::semi_implicit_step(ScalarField& u, const ScalarField& rhs, double tau) {
    auto& ops = kernels::active();
    scratch_real_.resize(u.size());
    ops.add_scaled(scratch_real_.data(), u.data(), tau, rhs.data(), u.size());
    forward(scratch_real_.data());
    scratch_bins_.resize(cbins_);
    for (std::size_t b = 0; b < cbins_; ++b)
        scratch_bins_[b] = 1.0 / (1.0 + tau * k2_[b]);
    ops.complex_scale(complex_buf_, scratch_bins_.data(), cbins_);
    backward(u.data());
}

void Spectral::convolve(const ScalarField& a, const ScalarField& b, ScalarField& out) {
    forward(a.data());
    scratch_bins_.resize(2 * cbins_);
    std::copy(complex_buf_, complex_buf_ + 2 * cbins_, scratch_bins_.data());
    forward(b.data());
    for (std::size_t i = 0; i < cbins_; ++i) {
        const double ar = scratch_bins_[2 * i], ai = scratch_bins_[2 * i + 1];
        const double br = complex_buf_[2 * i], bi = complex_buf_[2 * i + 1];
        complex_buf_[2 * i] = ar * br - ai * bi;
        complex_buf_[2 * i + 1] = ar * bi + ai * br;
    }
    backward(out.data());
}

double Spectral::high_mode_fraction(const ScalarField& f, double k_cut) {
    forward(f.data());
    const double k2_cut = k_cut * k_cut;
    double total = 0.0, high = 0.0;
    for (std::size_t b = 0; b < cbins_; ++b) {
        const double re = complex_buf_[2 * b];
        const double im = complex_buf_[2 * b + 1];
        const double e = weight_[b] * (re * re + im * im);
        total += e;
        if (k2_[b] > k2_cut) high += e;
    }
    return total > 0.0 ? high / total : 0.0;
}

void Spectral::gaussian_lowpass(ScalarField& f, double k_cut) {
    forward(f.data());
    scratch_bins_.resize(cbins_);
    for (std::size_t b = 0; b < cbins_; ++b)
        scratch_bins_[b] = std::exp(-k2_[b] / (k_cut * k_cut));
    kernels::active().complex_scale(complex_buf_, scratch_bins_.data(), cbins_);
    backward(f.data());
}

} // namespace vlab
