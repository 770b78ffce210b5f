#pragma once

#include <complex>
#include <vector>

#include "halfflow/grid.hpp"

namespace halfflow {

/**
 * Unitary DFT coefficients of a Field, component-major in FFT order.
 *
 * Mode index k per axis runs over [-N/2, N/2) and maps to the physical
 * frequency xi_k = 2*pi*k/L. Sum |u|^2 over sites equals sum |u_hat|^2.
 */
class SpectralField {
public:
    SpectralField(const Grid& grid, int m);

    const Grid& grid() const noexcept { return grid_; }
    int components() const noexcept { return m_; }
    std::size_t modes() const noexcept { return grid_.sites(); }

    std::complex<double>& operator()(int c, std::size_t mode) noexcept { return coeffs_[c * modes() + mode]; }
    std::complex<double> operator()(int c, std::size_t mode) const noexcept { return coeffs_[c * modes() + mode]; }
    std::vector<std::complex<double>>& coefficients() noexcept { return coeffs_; }
    const std::vector<std::complex<double>>& coefficients() const noexcept { return coeffs_; }

    /// Signed integer wavevector of a mode.
    std::array<int, 2> wavevector(std::size_t mode) const noexcept;
    /// Storage index of the integer wavevector (k0, k1), wrapped.
    std::size_t mode_of(int k0, int k1 = 0) const noexcept;

private:
    Grid grid_;
    int m_;
    std::vector<std::complex<double>> coeffs_;
};

SpectralField dft(const Field& field);
/// Real part of the inverse transform.
Field idft(const SpectralField& spectrum);

/// |xi| for every mode of the grid, FFT order. Cached per grid.
const std::vector<double>& abs_wavenumbers(const Grid& grid);
/// Physical frequency of mode index k along one axis.
double wavenumber(const Grid& grid, int k) noexcept;

/// Componentwise Fourier multiplier m(|xi|).
template <class Multiplier>
Field apply_radial_multiplier(const Field& field, Multiplier&& mult) {
    SpectralField s = dft(field);
    const auto& xi = abs_wavenumbers(field.grid());
    for (int c = 0; c < s.components(); ++c) {
        for (std::size_t k = 0; k < s.modes(); ++k) s(c, k) *= mult(xi[k]);
    }
    return idft(s);
}

/// (-Delta)^s for s in {1/4, 1/2, 1}; multiplier |xi|^{2s}.
Field frac_laplacian(const Field& field, double s);

/// S_t = exp(-t (-Delta)^{1/2}); multiplier exp(-t|xi|). Requires t >= 0.
Field poisson_semigroup(const Field& field, double t);
SpectralField poisson_semigroup(const SpectralField& spectrum, double t);

/// Closed-form Poisson kernel p_t(x) = t^{-n} p(x/t) on R^n.
double poisson_kernel(const Point& x, double t, int n);
double poisson_kernel(double x, double t);

/// Spectral partial derivatives: result[a] holds d/dx_a of every component.
std::vector<Field> gradient(const Field& field);

/// |grad u|^2 summed over axes and components, as a scalar field.
Field gradient_sq(const Field& field);

/// 1/2 * integral |(-Delta)^{1/4} u|^2.
double energy_half(const Field& field);

/// integral u . (-Delta)^{1/2} v.
double dirichlet_form(const Field& u, const Field& v);

/// integral u . v over the torus.
double l2_inner(const Field& u, const Field& v);

}  // namespace halfflow
