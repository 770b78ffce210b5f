#include "halfflow/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <nlohmann/json.hpp>

#include "halfflow/experiments.hpp"
#include "halfflow/fracgrad.hpp"
#include "halfflow/norms.hpp"
#include "halfflow/solver.hpp"
#include "halfflow/spectral.hpp"

namespace halfflow {

namespace {

constexpr double kPi = std::numbers::pi;

double field_max(const Field& scalar) {
    double m = 0.0;
    for (double v : scalar.component(0)) m = std::max(m, v);
    return m;
}

CheckResult at_most(std::string name, double value, double threshold, std::string detail = {}) {
    return {std::move(name), std::isfinite(value) && value <= threshold, value, threshold, std::move(detail)};
}

// Data whose [a]_A is nonzero: waves, jumps, perturbed constants and random phases on one 1D grid.
std::vector<NamedField> linear_family(const Grid& g) {
    std::vector<NamedField> out;
    DataSpec s;
    s.kind = DataKind::SphereWave;
    for (int mode : {4, 8, 16}) {
        s.mode = mode;
        out.emplace_back("sphere-wave-" + std::to_string(mode), make_data(s, g));
    }
    s.kind = DataKind::Jump1D;
    for (double angle : {0.3, 1.0, 3.0}) {
        s.angle = angle;
        out.emplace_back("jump-" + std::to_string(angle).substr(0, 3), make_data(s, g));
    }
    s.kind = DataKind::PerturbedConstant;
    for (double amp : {0.1, 0.5}) {
        s.phase_amplitude = amp;
        out.emplace_back("perturbed-" + std::to_string(amp).substr(0, 3), make_data(s, g));
    }
    for (unsigned seed : {1u, 2u}) out.emplace_back("random-phase-" + std::to_string(seed), random_phase_field(g, 1, 12, seed));
    return out;
}

constexpr double kLinearL = 64.0;
constexpr int kLinearN = 1024;
constexpr double kLinearT = 4.0;

}  // namespace

ConstantReport fit_constant(std::string name, std::vector<std::string> members, std::vector<double> ratios) {
    ConstantReport r;
    r.name = std::move(name);
    r.members = std::move(members);
    r.ratios = std::move(ratios);
    if (r.ratios.empty()) return r;
    std::vector<double> sorted = r.ratios;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    r.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    r.constant = sorted.back();
    r.bounded = std::all_of(sorted.begin(), sorted.end(), [](double v) { return std::isfinite(v); }) &&
                r.constant <= 2.0 * r.median;
    return r;
}

ConstantReport standard_estimate_constant() {
    const Grid g = Grid::make(1, kLinearL, kLinearN);
    const SupSampling smp = SupSampling::make(g);
    const TimeMesh mesh = TimeMesh::geometric(kLinearT, 40, 1.2);
    std::vector<std::string> names;
    std::vector<double> ratios;
    for (const auto& [name, a] : linear_family(g)) {
        const double A = carleson_A_seminorm(a, kLinearT, smp).value;
        const SpectralField ah = dft(a);
        double lhs = 0.0;
        for (double t : mesh.nodes()) {
            lhs = std::max(lhs, t * field_max(fg_modulus_sq(idft(poisson_semigroup(ah, t)))));
        }
        names.push_back(name);
        ratios.push_back(lhs / (A * A));
    }
    return fit_constant("standard_estimate_c1", std::move(names), std::move(ratios));
}

ConstantReport initial_condition_constant() {
    const Grid g = Grid::make(1, kLinearL, kLinearN);
    const SupSampling smp = SupSampling::make(g);
    const TimeMesh mesh = TimeMesh::geometric(kLinearT, 48, 1.15);
    std::vector<std::string> names;
    std::vector<double> ratios;
    for (const auto& [name, a] : linear_family(g)) {
        const double A = carleson_A_seminorm(a, kLinearT, smp).value;
        const SpectralField ah = dft(a);
        std::vector<Field> frames;
        for (double t : mesh.nodes()) frames.push_back(idft(poisson_semigroup(ah, t)));
        const double X = xt_seminorm(SpaceTimeField(mesh, std::move(frames))).value;
        names.push_back(name);
        ratios.push_back(X / A);
    }
    return fit_constant("initial_condition_c2", std::move(names), std::move(ratios));
}

ConstantReport quadratic_estimate_constant() {
    const Grid g = Grid::make(1, 32.0, 512);
    std::vector<NamedField> family;
    DataSpec s;
    s.kind = DataKind::PerturbedConstant;
    for (double amp : {0.05, 0.1, 0.2}) {
        s.phase_amplitude = amp;
        family.emplace_back("perturbed-" + std::to_string(amp).substr(0, 4), make_data(s, g));
    }
    s.kind = DataKind::Jump1D;
    for (double angle : {0.1, 0.2, 0.3}) {
        s.angle = angle;
        family.emplace_back("jump-" + std::to_string(angle).substr(0, 3), make_data(s, g));
    }
    for (unsigned seed : {1u, 2u}) {
        family.emplace_back("random-phase-" + std::to_string(seed), random_phase_field(g, 1, 4, seed, 0.1));
    }
    SolverConfig cfg;
    cfg.check_smallness = false;
    std::vector<std::string> names;
    std::vector<double> ratios;
    for (const auto& [name, a] : family) {
        const SolutionBundle b = picard_solve(a, cfg);
        const SpectralField ah = dft(a);
        std::vector<Field> nonlinear;
        for (std::size_t j = 0; j < b.u.mesh.size(); ++j) {
            nonlinear.push_back(b.u.frames[j] - idft(poisson_semigroup(ah, b.u.mesh[j])));
        }
        const SeminormReport n = xt_seminorm(SpaceTimeField(b.u.mesh, std::move(nonlinear)));
        const double X = xt_seminorm(b.u).value;
        names.push_back(name);
        ratios.push_back(n.components.at("total") / (X * X));
    }
    return fit_constant("quadratic_estimate_c4", std::move(names), std::move(ratios));
}

namespace {

struct InterpolationSample {
    std::string name;
    double frequency;
    double grad, d, dgrad, half_laplacian, sup;
};

// Ten random phase fields with top mode 4 * 2^{i/3}, i = 0..9 (3 octaves), band [top/2, top].
std::vector<InterpolationSample> interpolation_family() {
    const Grid g = Grid::make(1, 2.0 * kPi, 1024);
    std::vector<InterpolationSample> out;
    for (int i = 0; i < 10; ++i) {
        const int top = static_cast<int>(std::lround(4.0 * std::pow(2.0, i / 3.0)));
        const Field u = random_phase_field(g, std::max(1, top / 2), top, 100u + i, 0.5);
        double grad = 0.0;
        const Field g2 = gradient_sq(u);
        grad = std::sqrt(field_max(g2));
        const double d = std::sqrt(field_max(energy_density(u, DensityMethod::Spectral)));
        const double dgrad = std::sqrt(field_max(grad_energy_density(u, DensityMethod::Spectral)));
        const double lap = frac_laplacian(u, 0.5).sup_norm();
        out.push_back({"top-mode-" + std::to_string(top), static_cast<double>(top), grad, d, dgrad, lap, u.sup_norm()});
    }
    return out;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConstantReport interpolation_constant(bool laplace) {
    std::vector<std::string> names;
    std::vector<double> ratios, freq;
    for (const auto& s : interpolation_family()) {
        names.push_back(s.name);
        freq.push_back(s.frequency);
        ratios.push_back(laplace ? s.half_laplacian / (std::sqrt(s.sup) * std::sqrt(s.dgrad))
                                 : s.grad / (std::sqrt(s.d) * std::sqrt(s.dgrad)));
    }
    ConstantReport r = fit_constant(laplace ? "interpolation_laplace" : "interpolation_gradient", std::move(names),
                                    ratios);
    r.log_slope = log_slope(freq, ratios);
    return r;
}

}  // namespace

ConstantReport interpolation_gradient_constant() { return interpolation_constant(false); }
ConstantReport interpolation_laplace_constant() { return interpolation_constant(true); }

std::vector<CheckResult> analytic_checks() {
    std::vector<CheckResult> out;

    {  // kernel scaling p_t(x) = t^{-n} p_1(x / t)
        double worst = 0.0;
        for (int n : {1, 2}) {
            for (double t : {0.1, 0.7, 3.0}) {
                for (double x : {-2.0, 0.0, 0.3, 5.0}) {
                    const Point p{x, 0.5 * x};
                    const double lhs = poisson_kernel(p, t, n);
                    const double rhs = std::pow(t, -n) * poisson_kernel(Point{x / t, 0.5 * x / t}, 1.0, n);
                    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
                }
            }
        }
        out.push_back(at_most("kernel_scaling", worst, 1e-12, "relative"));
    }
    {  // semigroup law and maximum principle
        const Grid g = Grid::make(1, 2.0 * kPi, 256);
        const Field a = random_phase_field(g, 1, 16, 7);
        const Field lhs = poisson_semigroup(poisson_semigroup(a, 0.3), 0.45);
        out.push_back(at_most("semigroup_law", sup_distance(lhs, poisson_semigroup(a, 0.75)), 1e-12));
        double slack = 0.0;
        for (double t : {0.01, 0.1, 1.0}) {
            const Field u = poisson_semigroup(a, t);
            for (int c = 0; c < 2; ++c) {
                const auto ac = a.component(c), uc = u.component(c);
                const double hi = *std::max_element(ac.begin(), ac.end());
                const double lo = *std::min_element(ac.begin(), ac.end());
                for (double v : uc) slack = std::max({slack, v - hi, lo - v});
            }
        }
        out.push_back(at_most("maximum_principle_slack", slack, 1e-10));
    }
    {  // sphere wave density |d u|^2 = |xi|
        const Grid g = Grid::make(1, 64.0, 4096);
        DataSpec s;
        s.kind = DataKind::SphereWave;
        s.mode = 40;
        const double xi = 2.0 * kPi * 40 / 64.0;
        const Field d = fg_modulus_sq(make_data(s, g));
        double worst = 0.0;
        for (double v : d.component(0)) worst = std::max(worst, std::abs(v - xi) / xi);
        out.push_back(at_most("wave_density", worst, 0.01, "relative, xi = 2 pi 40 / 64"));
    }
    {  // |d p_1|^2 = 1 / (4 pi^2 (1 + x^2)) for the 1D Poisson kernel
        const Grid g = Grid::make(1, 200.0, 4096);
        const Field p = sample_function(g, 1, [](const Point& x) { return std::vector<double>{poisson_kernel(x[0], 1.0)}; });
        const Field d = fg_modulus_sq(p);
        double worst = 0.0;
        for (std::size_t s = 0; s < g.sites(); ++s) {
            const double x = g.site_point(s)[0];
            if (std::abs(x) > 5.0) continue;
            const double expect = 1.0 / (4.0 * kPi * kPi * (1.0 + x * x));
            worst = std::max(worst, std::abs(d(0, s) - expect) / expect);
        }
        out.push_back(at_most("poisson_kernel_density", worst, 0.02, "relative on |x| <= 5"));
    }
    {  // Duhamel of constant forcing is t c
        const Grid g = Grid::make(1, 2.0 * kPi, 64);
        const TimeMesh mesh = TimeMesh::geometric(1.0, 24, 1.2);
        const Field c = Field::constant(g, std::vector<double>{0.6, 0.8});
        const DuhamelResult G = duhamel_all(SpaceTimeField(mesh, std::vector<Field>(mesh.size(), c)));
        double worst = 0.0;
        for (std::size_t j = 0; j < mesh.size(); ++j) worst = std::max(worst, sup_distance(G.frames[j], mesh[j] * c));
        out.push_back(at_most("duhamel_constant", worst, 1e-12));
    }
    {  // periodic two-jump profile
        const double L = 32.0;
        const Grid g = Grid::make(1, L, 8192);
        DataSpec s;
        s.kind = DataKind::Jump1D;
        s.angle = 1.0;
        const Field a = make_data(s, g);
        const auto [a0, a1] = jump_states(s);
        double worst = 0.0;
        for (double t : {0.5, L / 20.0}) {
            const Field u = poisson_semigroup(a, t);
            for (std::size_t i = 0; i < u.sites(); ++i) {
                const auto v = two_jump_oracle(g.site_point(i)[0], t, L, a0, a1);
                for (int c = 0; c < 2; ++c) worst = std::max(worst, std::abs(u(c, i) - v[c]));
            }
        }
        out.push_back(at_most("two_jump_profile", worst, 1e-3));
    }
    {  // constant data is a Picard fixed point
        const Grid g = Grid::make(1, 2.0 * kPi, 64);
        SolverConfig cfg;
        cfg.M = 16;
        const Field c = Field::constant(g, std::vector<double>{0.6, 0.8});
        const SolutionBundle b = picard_solve(c, cfg);
        double worst = 0.0;
        for (const Field& u : b.u.frames) worst = std::max(worst, sup_distance(u, c));
        CheckResult r = at_most("constant_fixed_point", worst, 1e-14);
        r.passed = r.passed && b.history.size() == 1;
        out.push_back(r);
    }
    {  // cutoff blend
        const double z = CutoffMap::profile(1.75);
        out.push_back(at_most("cutoff_blend", std::abs(z - 0.875), 1e-12, "profile(1.75) = 0.875"));
    }
    return out;
}

ValidationReport run_validation() {
    ValidationReport r;
    r.checks = analytic_checks();
    r.constants = {standard_estimate_constant(), initial_condition_constant(), quadratic_estimate_constant(),
                   interpolation_gradient_constant(), interpolation_laplace_constant()};
    for (const auto& c : r.constants) {
        r.checks.push_back({"constant_" + c.name, c.bounded, c.constant, 2.0 * c.median, "max ratio vs 2x median"});
    }
    r.all_passed = std::all_of(r.checks.begin(), r.checks.end(), [](const CheckResult& c) { return c.passed; });
    return r;
}

std::string to_json(const ValidationReport& report, int indent) {
    nlohmann::ordered_json j;
    j["all_passed"] = report.all_passed;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
        j["checks"].push_back({{"name", c.name},
                               {"passed", c.passed},
                               {"value", c.value},
                               {"threshold", c.threshold},
                               {"detail", c.detail}});
    }
    j["constants"] = nlohmann::ordered_json::array();
    for (const auto& c : report.constants) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["constant"] = c.constant;
        e["median"] = c.median;
        e["bounded"] = c.bounded;
        e["log_slope"] = c.log_slope;
        e["members"] = c.members;
        e["ratios"] = c.ratios;
        j["constants"].push_back(e);
    }
    return j.dump(indent);
}

}  // namespace halfflow
