#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "halfflow/fracgrad.hpp"
#include "halfflow/grid.hpp"

namespace halfflow {

/**
 * Result of a seminorm estimator: the value, its named ingredients, where the
 * supremum was attained, and the sampling used.
 */
struct SeminormReport {
    double value = 0.0;
    std::map<std::string, double> components;
    std::map<std::string, double> argsup;
    std::map<std::string, double> mesh;
    std::map<std::string, std::string> notes;
};

/// JSON object {value, components{}, argsup{}, mesh{}, notes{}}.
std::string to_json(const SeminormReport& report, int indent = 2);

/**
 * Discretization of sup over (x, r) and of the inner time integrals.
 *
 * r_set holds dyadic radii T_top / 2^k within [16 dx, L/4]; t_mesh is
 * geometric with 2^(1/per_octave) grading from T_top, so every radius is a
 * mesh node and sample sets for smaller T are nested in those for larger T.
 */
struct SupSampling {
    std::vector<double> r_set;
    int x_stride = 4;
    TimeMesh t_mesh;
    DensityMethod method = DensityMethod::Quadrature;

    /// T_top defaults to L/4; the mesh reaches down to r_min / 64.
    static SupSampling make(const Grid& grid, std::optional<double> T_top = std::nullopt, int x_stride = 4,
                            int per_octave = 4, std::optional<DensityMethod> method = std::nullopt);
};

/**
 * [a]_{A_T} = sup_{r <= T} sup_x ( int_0^r avg_{B_r(x)} |d_{1/2} S_t a|^2 dt )^{1/2}.
 * T must be <= L/8, or +infinity for the sup over the whole r_set (A_inf).
 * Components: carleson_sq, head_share (the (0, t1] surrogate share at the
 * argsup) and standard_sup = sup_{t <= T} t ||d_{1/2} S_t a||_inf^2.
 */
SeminormReport carleson_A_seminorm(const Field& a, double T, const SupSampling& sampling);

struct DecayRow {
    double T;
    double value;
};

/// [a]_{A_T} for each T, from a single pass; non-decreasing in T by nesting.
std::vector<DecayRow> decay_profile(const Field& a, const std::vector<double>& T_list, const SupSampling& sampling);

/**
 * X_T seminorm pieces: sup t^{1/2}|du|, Carleson of |du|^2, sup t^{3/2}|d grad u|,
 * Carleson of s^2 |d grad u|^2; windows B_t(x) with radius clamped to
 * [16 dx, L/4]. value = sum of the four pieces; components also carry
 * sup_norm and total = sup_norm + value.
 */
SeminormReport xt_seminorm(const SpaceTimeField& U, int x_stride = 4, std::optional<DensityMethod> method = std::nullopt);

/**
 * Y_T norm pieces: sup t|f|, Carleson of |f|, sup t^2|grad f|, Carleson of
 * s|grad f|. value = total (sum of the four); components carry norm and seminorm.
 */
SeminormReport yt_norm(const SpaceTimeField& f, int x_stride = 4);

/**
 * ||a||_{Q0}^2 = sup r^{-n} int_{B_r} int_{B_r} |a(y) - a(z)|^2 |y - z|^{-n} dy dz
 * over r_set and strided centers. The omitted diagonal is compensated by the
 * lattice gap of the gradient surrogate.
 */
SeminormReport q0_seminorm(const Field& a, const SupSampling& sampling);

/// sup over windows of avg_{B} |a - a_B| (L^1 mean oscillation).
SeminormReport bmo_seminorm(const Field& a, const SupSampling& sampling);

/**
 * sup_k 2^{kn/2} ||Delta_k a||_{L^2} with smooth blocks psi(2^{-k}|xi|) on
 * physical frequency shells (2^{k-1}, 2^{k+1}) resolved below Nyquist.
 */
SeminormReport besov_seminorm(const Field& a);

/// Smooth Littlewood-Paley block profile psi(s) = chi(s) - chi(2s), supported in [1/2, 2].
double littlewood_paley_psi(double s) noexcept;

struct TailOracle {
    double lhs;  ///< int_0^1 int_{B_1} (|d a|^{(t, L/2)})^2 dx dt on a geometric t-mesh
    double rhs;  ///< int_{B_1} int min(|h|, 1) (gamma/2) |a(x+h) - a(x)|^2 |h|^{-(n+1)} dh dx
    double relative_defect;
};

/// Both sides of the Fubini identity, on the unit window centered at 0.
TailOracle tail_carleson_oracle(const Field& a, int per_octave = 16);

}  // namespace halfflow
