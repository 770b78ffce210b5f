#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "halfflow/fracgrad.hpp"
#include "halfflow/grid.hpp"

namespace halfflow {

/**
 * phi(y) = y g(|y|)/|y| with g(rho) = rho on [0, 3/2], g = 0 on [2, inf),
 * and g(rho) = rho (1 - S((rho - 3/2) / (1/2))) in between, S the quintic
 * smoothstep. The blend overshoots 3/2 by less than 0.05.
 */
struct CutoffMap {
    static constexpr double inner = 1.5;
    static constexpr double outer = 2.0;

    static double profile(double rho) noexcept;
    /// In-place phi on one value.
    static void apply(std::span<double> y) noexcept;
};

std::vector<double> apply_cutoff(std::vector<double> y);

struct SolverConfig {
    double T = 1.0;
    int M = 48;
    double grading = 1.15;
    int max_iter = 40;
    double tol = 1e-8;
    bool use_cutoff = true;
    /// Warn when [a]_{A_T} (estimated at min(T, L/8)) reaches this value.
    double eps_check = 0.5;
    bool check_smallness = true;
    /// Replace the forcing by zero (pure semigroup evolution).
    bool zero_forcing = false;
    /// Density of the forcing; Spectral unless set.
    std::optional<DensityMethod> density;

    /// Throws ConfigError on M < 16, tol <= 0, T <= 0, grading <= 1, max_iter < 1.
    void validate() const;
    TimeMesh mesh() const;
    DensityMethod density_method(const Grid& grid) const;
};

struct SolutionBundle {
    SolutionBundle(SpaceTimeField u_, Field initial_, std::string method_)
        : u(std::move(u_)), initial(std::move(initial_)), method(std::move(method_)) {}

    SpaceTimeField u;
    Field initial;
    std::string method;  ///< "picard" or "step"
    bool converged = false;
    std::vector<double> history;     ///< sup over frames of |u_{l+1} - u_l| per iteration
    std::vector<double> head_share;  ///< (0, t1] share of the Duhamel term per frame
    std::vector<double> sphere_deviation;
    std::vector<double> energy;
    std::vector<double> x0_sup;  ///< t^{1/2} ||d_{1/2} u(t)||_inf per frame
    std::optional<double> smallness;  ///< [a]_{A_T} estimate, when checked
    std::vector<std::string> warnings;
};

/// |d_{1/2} u|^2 on the full annulus (fg_modulus_sq).
Field nonlinearity_density(const Field& u);

/// phi(u) |d_{1/2} u|^2 (or u |d_{1/2} u|^2 without cutoff).
Field forcing(const Field& u, bool use_cutoff, DensityMethod method = DensityMethod::Quadrature);

/// G(f)(t_k) for every node, with per-frame head shares.
struct DuhamelResult {
    std::vector<Field> frames;
    std::vector<double> head_share;
};

/**
 * G(f)(t) = int_0^t S_{t-s} f(s) ds with f linear between nodes and constant
 * f(t1) on (0, t1]; each Fourier mode is integrated exactly against that
 * interpolant (exponential product integration).
 */
DuhamelResult duhamel_all(const SpaceTimeField& f);

/// G(f)(t) for a mesh node t; throws InterfaceError otherwise.
Field duhamel(const SpaceTimeField& f, double t);

/// u_{l+1} = S_t a + G(forcing(u_l)), u_0 = S_t a, until the sup difference is <= tol.
SolutionBundle picard_solve(const Field& a, const SolverConfig& config);

/**
 * Frame-to-frame marching: u_{j+1} = S_h u_j + w0 f(u_j) + w1 f(u_{j+1}), the same
 * exponential-trapezoid step as the Duhamel quadrature, with an exponential Euler
 * predictor and fixed-point corrections of the endpoint term down to tol/10.
 */
SolutionBundle step_solve(const Field& a, const SolverConfig& config);

/// max_x | |u|^2 - 1 | per frame.
std::vector<double> sphere_deviation(const SpaceTimeField& u);

/// energy_half per frame.
std::vector<double> energy_series(const SpaceTimeField& u);

/// sup over frames of |u(t) - S_t a - G(forcing(u))(t)|.
double mild_residual(const SolutionBundle& bundle, const SolverConfig& config);

struct WeakTest {
    int mode;       ///< wave number along axis 0
    bool sine;      ///< sin instead of cos
    int component;  ///< target component
    int bump;       ///< index of the time bump
};

/// modes {1, 2, 4} x {cos, sin} x components x 2 bumps (24 tests for m = 2).
std::vector<WeakTest> default_weak_battery(int components);

/**
 * max over the battery of |int int -u.d_t phi + u.(-Delta)^{1/2} phi - f.phi| / (L^n ||a||_inf),
 * f = forcing(u) (zero when config.zero_forcing), time quadrature by the
 * trapezoid rule in log t.
 */
double weak_residual(const SolutionBundle& bundle, const SolverConfig& config, const std::vector<WeakTest>& battery);

/// max over interior frames of |d_t v + (-Delta)^{1/2} v - 2 v |d u|^2|, v = |u|^2 - 1.
double constraint_residual(const SolutionBundle& bundle, const SolverConfig& config);

/// Fill sphere deviation, energy and x0_sup series.
void diagnose(SolutionBundle& bundle, const SolverConfig& config);

/// frames/frame_XXXX.csv plus reports/diagnostics.json under `dir`.
void write_bundle(const SolutionBundle& bundle, const std::filesystem::path& dir);

}  // namespace halfflow
