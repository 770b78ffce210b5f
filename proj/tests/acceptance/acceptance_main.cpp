// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "halfflow/errors.hpp"
#include "halfflow/experiments.hpp"
#include "halfflow/fracgrad.hpp"
#include "halfflow/norms.hpp"
#include "halfflow/solver.hpp"
#include "halfflow/spectral.hpp"
#include "halfflow/validation.hpp"
#include "test_fields.hpp"

using namespace halfflow;
using testsupport::mode_frequency;
using testsupport::random_band_limited;
using testsupport::sphere_wave;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool passed;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

double integrate(const Field& scalar) {
    double acc = 0.0;
    for (double v : scalar.component(0)) acc += v;
    return acc * scalar.grid().cell_volume();
}

/// Keep only modes with |xi| >= xi_min.
Field highpass(const Field& f, double xi_min) {
    SpectralField s = dft(f);
    const auto& xi = abs_wavenumbers(f.grid());
    for (int c = 0; c < s.components(); ++c)
        for (std::size_t k = 0; k < s.modes(); ++k)
            if (xi[k] < xi_min) s(c, k) = 0.0;
    return idft(s);
}

// (1, 0) on (-L/4, L/4), (-1, 0) elsewhere.
Field two_jump(const Grid& g) {
    const double q = 0.25 * g.length();
    return sample_function(g, 2, [q](const Point& x) {
        return std::vector<double>{std::abs(x[0]) < q - 1e-12 ? 1.0 : -1.0, 0.0};
    });
}

Field perturbed_constant(const Grid& g, double amplitude) {
    DataSpec s;
    s.kind = DataKind::PerturbedConstant;
    s.phase_amplitude = amplitude;
    return make_data(s, g);
}

Outcome ac1() {
    // Stated form (1/pi) / (2 x^2 + 2); spot values 1/(2 pi), 1/(4 pi).
    const Grid g = Grid::make(1, 200.0, 4096);
    const Field p = sample_function(g, 1, [](const Point& x) { return std::vector<double>{poisson_kernel(x[0], 1.0)}; });
    const Field d = fg_modulus_sq(p);
    double worst = 0.0, worst_alt = 0.0;
    for (std::size_t s = 0; s < g.sites(); ++s) {
        const double x = g.site_point(s)[0];
        if (std::abs(x) > 5.0) continue;
        const double stated = (1.0 / kPi) / (2.0 * x * x + 2.0);
        const double quadrature = 1.0 / (4.0 * kPi * kPi * (1.0 + x * x));
        worst = std::max(worst, std::abs(d(0, s) - stated) / stated);
        worst_alt = std::max(worst_alt, std::abs(d(0, s) - quadrature) / quadrature);
    }
    const double at0 = interpolate(d, {0.0, 0.0})[0], at1 = interpolate(d, {1.0, 0.0})[0];
    const double spot = std::max(std::abs(at0 - 1.0 / (2.0 * kPi)) * 2.0 * kPi, std::abs(at1 - 1.0 / (4.0 * kPi)) * 4.0 * kPi);
    return {worst <= 0.02 && spot <= 0.02,
            fmt("max rel err vs (1/pi)/(2x^2+2) = %.4g (<= 0.02); d(0) = %.6g vs 1/(2pi) = %.6g, d(1) = %.6g vs "
                "1/(4pi) = %.6g; rel err vs 1/(4pi^2(1+x^2)) = %.3g",
                worst, at0, 1.0 / (2.0 * kPi), at1, 1.0 / (4.0 * kPi), worst_alt)};
}

Outcome ac2() {
    double scaling = 0.0;
    for (int n : {1, 2}) {
        const double cn = n == 1 ? 1.0 / kPi : 1.0 / (2.0 * kPi);
        for (double t : {0.1, 0.7, 3.0}) {
            for (double x0 : {-4.0, -0.3, 0.0, 0.9, 5.5}) {
                const Point x{x0, n == 2 ? 0.5 * x0 + 0.2 : 0.0};
                const double r2 = x[0] * x[0] + (n == 2 ? x[1] * x[1] : 0.0);
                const double closed = cn * t / std::pow(t * t + r2, 0.5 * (n + 1));
                const double pt = poisson_kernel(x, t, n);
                const double scaled = std::pow(t, -n) * poisson_kernel(Point{x[0] / t, x[1] / t}, 1.0, n);
                scaling = std::max({scaling, std::abs(pt - scaled) / closed, std::abs(pt - closed) / closed});
            }
        }
    }
    double law = 0.0, slack = 0.0;
    for (int n : {1, 2}) {
        const Grid g = n == 1 ? Grid::make(1, 2.0 * kPi, 512) : Grid::make(2, 2.0 * kPi, 64);
        for (unsigned seed : {1u, 2u, 3u}) {
            const Field a = random_band_limited(g, 2, n == 1 ? 24 : 8, seed);
            for (auto [t, s] : {std::pair{0.1, 0.25}, std::pair{0.4, 1.3}}) {
                const Field lhs = poisson_semigroup(poisson_semigroup(a, s), t);
                law = std::max(law, sup_distance(lhs, poisson_semigroup(a, t + s)) / a.sup_norm());
            }
            for (double t : {0.01, 0.1, 1.0}) {
                const Field u = poisson_semigroup(a, t);
                for (int c = 0; c < 2; ++c) {
                    const auto ac = a.component(c), uc = u.component(c);
                    const double hi = *std::max_element(ac.begin(), ac.end());
                    const double lo = *std::min_element(ac.begin(), ac.end());
                    for (double v : uc) slack = std::max({slack, v - hi, lo - v});
                }
            }
        }
    }
    return {scaling <= 1e-12 && law <= 1e-12 && slack <= 1e-10,
            fmt("kernel scaling rel err %.3g (<= 1e-12); semigroup law %.3g (<= 1e-12); max principle slack %.3g "
                "(<= 1e-10)",
                scaling, law, slack)};
}

Outcome ac3() {
    // Band-limited fields above 32 modes per box, so the offset truncation at L/2 stays below 1%.
    const Grid g = Grid::make(1, 64.0, 2048);
    double worst = 0.0;
    for (unsigned seed = 1; seed <= 10; ++seed) {
        const Field u = highpass(random_band_limited(g, 2, 120, seed), 2.0 * kPi * 32.0 / g.length());
        const double lhs = integrate(fg_modulus_sq(u));
        const double rhs = dirichlet_form(u, u);
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    const Grid gw = Grid::make(1, 64.0, 4096);
    double wave = 0.0;
    for (int k : {32, 40, 64}) {
        const double xi = mode_frequency(gw, k);
        const Field d = fg_modulus_sq(sphere_wave(gw, k));
        for (double v : d.component(0)) wave = std::max(wave, std::abs(v - xi) / xi);
    }
    return {worst <= 0.01 && wave <= 0.01,
            fmt("integrated identity max rel err %.3g over 10 fields (<= 0.01); sphere-wave |du|^2 = |xi| max rel "
                "err %.3g over 3 xi (<= 0.01)",
                worst, wave)};
}

Outcome ac4() {
    const Grid g = Grid::make(1, 32.0, 1024);
    SolverConfig cfg;
    cfg.M = 48;
    cfg.T = 1.0;
    const SolutionBundle b = picard_solve(perturbed_constant(g, 0.1), cfg);
    double ratio = 0.0;
    for (std::size_t l = 1; l < b.history.size(); ++l) ratio = std::max(ratio, b.history[l] / b.history[l - 1]);
    const double dev = max_of(b.sphere_deviation);
    double growth = 0.0;
    for (std::size_t j = 1; j < b.energy.size(); ++j)
        growth = std::max(growth, (b.energy[j] - b.energy[j - 1]) / b.energy[j - 1]);
    return {b.converged && ratio <= 0.6 && dev <= 1e-3 && growth <= 1e-3,
            fmt("converged in %zu iterations; max contraction ratio from iteration 2 = %.3g (<= 0.6); max sphere "
                "deviation %.3g (<= 1e-3); max relative energy increase %.3g (<= 1e-3)",
                b.history.size(), ratio, dev, growth)};
}

Outcome ac5() {
    const Grid g = Grid::make(1, 32.0, 1024);
    SolverConfig cfg;
    const Field a = perturbed_constant(g, 0.1);
    const SolutionBundle p = picard_solve(a, cfg), s = step_solve(a, cfg);
    double diff = 0.0;
    for (std::size_t j = 0; j < p.u.frames.size(); ++j) diff = std::max(diff, sup_distance(p.u.frames[j], s.u.frames[j]));
    return {diff <= 5.0 * cfg.tol, fmt("sup difference over %zu frames %.3g (<= 5 tol = %.3g)", p.u.frames.size(), diff,
                                       5.0 * cfg.tol)};
}

Outcome ac6() {
    const Grid g = Grid::make(1, 64.0, 1024);
    const SupSampling s = SupSampling::make(g);
    const double T0 = 4.0;
    const std::vector<double> Ts{T0 / 4, T0 / 2, T0};
    const auto jump = decay_profile(two_jump(g), Ts, s);
    double flat = 0.0;
    for (const auto& r : jump) flat = std::max(flat, std::abs(r.value / jump.back().value - 1.0));
    const auto wave = decay_profile(sphere_wave(g, 1), Ts, s);
    double factor = 0.0;
    for (std::size_t i = 1; i < wave.size(); ++i) factor = std::max(factor, wave[i - 1].value / wave[i].value);
    return {flat <= 0.05 && factor < 0.8,
            fmt("two-jump [a]_A_T over T = %g, %g, %g: %.4g, %.4g, %.4g, spread %.3g (<= 0.05); smooth wave worst "
                "halving factor %.3g (< 0.8)",
                Ts[0], Ts[1], Ts[2], jump[0].value, jump[1].value, jump[2].value, flat, factor)};
}

Outcome ac7() {
    const auto family = default_data_family();
    const EmbeddingStudy st = embedding_study(family);
    double worst = 0.0;
    bool ok = true;
    for (const auto& r : st.rows) {
        if (r.q0 > 0.0) worst = std::max(worst, r.a_inf / r.q0);
        ok = ok && r.a_inf <= 1.1 * r.q0 + 1e-12;
    }
    return {ok && family.size() >= 12,
            fmt("%zu members; max [a]_A_inf / ||a||_Q0 = %.3g (<= 1.1)", family.size(), worst)};
}

Outcome ac8() {
    const Grid g = Grid::make(1, 16.0, 512);
    const Grid g2 = Grid::make(2, 8.0, 32);
    const std::vector<Field> members{two_jump(g), sphere_wave(g, 3), random_band_limited(g, 2, 20, 3),
                                     perturbed_constant(g, 0.5), random_band_limited(g2, 2, 3, 1)};
    double worst = 0.0;
    for (const Field& a : members) worst = std::max(worst, tail_carleson_oracle(a).relative_defect);
    return {worst <= 0.03, fmt("max relative defect %.3g over %zu members (<= 0.03)", worst, members.size())};
}

Outcome ac9() {
    SolverConfig cfg;
    const double rho = cfg.grading;
    const std::vector<double> lambdas{rho * rho, std::pow(rho, 4)};
    const double L = 32.0;
    const Grid g = Grid::make(1, L, 1024);
    const SimilarityWindow w = resolved_window(g, {L / 4, 0.0}, 2.0);
    DataSpec s;
    s.kind = DataKind::Jump1D;
    s.angle = 0.3;
    const double magnitude = 2.0 * std::sin(0.15);
    const SolutionBundle jump = picard_solve(make_data(s, g), cfg);
    const double d1 = self_similarity_defect(jump.u, lambdas, w) / magnitude;

    DataSpec wave;
    wave.kind = DataKind::SphereWave;
    wave.mode = 4;
    const SolutionBundle smooth = picard_solve(make_data(wave, g), cfg);
    const double control = self_similarity_defect(smooth.u, lambdas, w);

    const Grid g2 = Grid::make(2, 16.0, 256);
    DataSpec h;
    h.kind = DataKind::Homogeneous2D;
    h.kappa = 0.2;
    const SolutionBundle hom = picard_solve(make_data(h, g2), cfg);
    const ExpanderReport e = expander_profile(hom.u, resolved_window(g2, {0.0, 0.0}, 2.0));
    const double d2 = e.defect / h.kappa;
    return {d1 <= 0.05 && d2 <= 0.10 && control >= 0.2,
            fmt("1D jump self-similarity defect %.3g of jump (<= 0.05); 2D homogeneous kappa = 0.2 at 256^2 expander "
                "defect %.3g of kappa (<= 0.10, t* = %.3g, %zu frames); smooth control defect %.3g (>= 0.2)",
                d1, d2, e.t_star, e.frames_compared, control)};
}

Outcome constants_outcome(const std::vector<ConstantReport>& reports) {
    bool ok = true;
    std::string detail;
    for (const auto& r : reports) {
        ok = ok && r.bounded;
        if (!detail.empty()) detail += "; ";
        detail += fmt("%s C = %.4g (median %.4g, max/median %.3g, log-slope %.3g, %zu members)", r.name.c_str(),
                      r.constant, r.median, r.constant / r.median, r.log_slope, r.ratios.size());
    }
    return {ok, detail + " (bounded: max <= 2 median)"};
}

Outcome ac10() {
    return constants_outcome(
        {standard_estimate_constant(), initial_condition_constant(), quadratic_estimate_constant()});
}

Outcome ac11() {
    SolverConfig cfg;
    const Grid g = Grid::make(1, 32.0, 1024);
    DataSpec s;
    s.kind = DataKind::Jump1D;
    std::vector<Field> data{perturbed_constant(g, 0.1), make_data(s, g)};
    s.kind = DataKind::SphereWave;
    s.mode = 1;
    data.push_back(make_data(s, g));
    double worst = 0.0;
    std::size_t converged = 0;
    for (const Field& a : data) {
        const SolutionBundle b = picard_solve(a, cfg);
        converged += b.converged ? 1 : 0;
        worst = std::max(worst, weak_residual(b, cfg, default_weak_battery(a.components())));
    }
    return {converged == data.size() && worst <= 1e-3,
            fmt("%zu converged bundles; max weak residual %.3g of L sup|a| over %zu tests (<= 1e-3)", converged, worst,
                default_weak_battery(2).size())};
}

Outcome ac12() { return constants_outcome({interpolation_gradient_constant(), interpolation_laplace_constant()}); }

struct Criterion {
    const char* id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"AC1", "Poisson fractional-gradient identity", 60, ac1},
        {"AC2", "kernel/semigroup exactness", 10, ac2},
        {"AC3", "d.d = (-Delta)^{1/2} identity", 120, ac3},
        {"AC4", "sphere constraint and dissipation", 600, ac4},
        {"AC5", "uniqueness surrogate", 900, ac5},
        {"AC6", "jump data in A but not V", 300, ac6},
        {"AC7", "Q0 embedding", 600, ac7},
        {"AC8", "Fubini tail oracle", 300, ac8},
        {"AC9", "self-similar expander", 3600, ac9},
        {"AC10", "linear-estimate constants", 600, ac10},
        {"AC11", "mild/weak residual", 300, ac11},
        {"AC12", "interpolation inequalities", 300, ac12},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool ok = o.passed && secs <= c.budget_s;
        failed += ok ? 0 : 1;
        std::printf("%s %s %s: %s [%.1f s, budget %.0f s]\n", c.id, ok ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                    secs, c.budget_s);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
