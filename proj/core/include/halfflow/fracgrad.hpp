#pragma once

#include <limits>
#include <span>
#include <vector>

#include "halfflow/grid.hpp"

namespace halfflow {

/// gamma_n = Gamma((n+1)/2) / pi^((n+1)/2).
double gamma_constant(int n);

/**
 * Offset shell inner < |h| <= outer. An infinite outer radius means
 * "truncate at L/2", the torus injectivity radius.
 */
struct Annulus {
    double inner = 0.0;
    double outer = std::numeric_limits<double>::infinity();

    static Annulus full() { return {}; }
    /// Outer radius with the sentinel resolved; throws DomainError when outer > L/2.
    double resolved_outer(const Grid& grid) const;
};

/**
 * Grid offsets h with |h| in an annulus and their quadrature weights
 * (gamma_n / 2) dx^n / |h|^(n+1), sorted by offset index.
 */
class OffsetStencil {
public:
    OffsetStencil(const Grid& grid, const Annulus& annulus);

    struct Entry {
        int di;
        int dj;
        double radius;
        double weight;
    };

    const Grid& grid() const noexcept { return grid_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    /// Coefficient multiplying |grad u|^2 for the omitted inner cell; 0 unless inner == 0.
    double inner_correction() const noexcept { return inner_correction_; }

private:
    Grid grid_;
    std::vector<Entry> entries_;
    double inner_correction_ = 0.0;
};

/// |d_{1/2} u|^2 restricted to the annulus, at every site.
Field fg_modulus_sq(const Field& u, const Annulus& annulus = Annulus::full());

/// Same quantity evaluated only at the requested sites.
std::vector<double> fg_modulus_sq_at(const Field& u, const Annulus& annulus, std::span<const std::size_t> sites);

/// Off-diagonal inner product <d_{1/2} u, d_{1/2} v>_od over the annulus.
Field od_inner(const Field& u, const Field& v, const Annulus& annulus = Annulus::full());

/// |d_{1/2} grad u|^2: sum over spatial derivatives of the full-annulus modulus.
Field fg_grad_modulus_sq(const Field& u);

/// max_x |fg(r0,r1) - fg(r0,rmid) - fg(rmid,r1)|.
double annulus_split_check(const Field& u, double r0, double rmid, double r1);

/// Upper bound for the offsets beyond L/2 dropped by the quadrature.
double truncation_bias_bound(const Field& u);

/// How |d_{1/2} u|^2 is evaluated on full fields.
enum class DensityMethod {
    Quadrature,  ///< offset quadrature truncated at L/2 (fg_modulus_sq)
    Spectral,    ///< periodic multiplier identity (energy_density_spectral)
};

/// Quadrature in 1D, spectral in 2D, where full-field quadrature is O(N^4).
DensityMethod default_density_method(const Grid& grid) noexcept;

/// |d_{1/2} u|^2 on the full annulus by the chosen method.
Field energy_density(const Field& u, DensityMethod method);

/// |d_{1/2} grad u|^2 by the chosen method.
Field grad_energy_density(const Field& u, DensityMethod method);

/// u . (-Delta)^{1/2} u - 1/2 (-Delta)^{1/2} |u|^2: the periodic energy density via multipliers.
Field energy_density_spectral(const Field& u);

}  // namespace halfflow
