#include "halfflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "halfflow/errors.hpp"
#include "halfflow/io.hpp"
#include "halfflow/norms.hpp"
#include "halfflow/spectral.hpp"

namespace halfflow {

// ---------------------------------------------------------------------------
// Cutoff

double CutoffMap::profile(double rho) noexcept {
    if (rho <= inner) return rho;
    if (rho >= outer) return 0.0;
    const double s = (rho - inner) / (outer - inner);
    const double smooth = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
    return rho * (1.0 - smooth);
}

void CutoffMap::apply(std::span<double> y) noexcept {
    double r2 = 0.0;
    for (double v : y) r2 += v * v;
    if (r2 <= inner * inner) return;
    const double rho = std::sqrt(r2);
    const double scale = profile(rho) / rho;
    for (double& v : y) v *= scale;
}

std::vector<double> apply_cutoff(std::vector<double> y) {
    CutoffMap::apply(y);
    return y;
}

// ---------------------------------------------------------------------------
// Configuration

void SolverConfig::validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T must be positive and finite");
    if (M < 16) throw ConfigError("M must be >= 16");
    if (!(grading > 1.0)) throw ConfigError("grading must exceed 1");
    if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
}

TimeMesh SolverConfig::mesh() const {
    validate();
    return TimeMesh::geometric(T, M, grading);
}

DensityMethod SolverConfig::density_method(const Grid&) const {
    // The lattice form u.Au - A|u|^2/2 keeps |u| = 1 to discretization level at jumps.
    return density.value_or(DensityMethod::Spectral);
}

// ---------------------------------------------------------------------------
// Nonlinearity

Field nonlinearity_density(const Field& u) { return fg_modulus_sq(u); }

Field forcing(const Field& u, bool use_cutoff, DensityMethod method) {
    const Field d = energy_density(u, method);
    Field f = u;
    std::vector<double> y(u.components());
    for (std::size_t s = 0; s < u.sites(); ++s) {
        for (int c = 0; c < u.components(); ++c) y[c] = u(c, s);
        if (use_cutoff) CutoffMap::apply(y);
        for (int c = 0; c < u.components(); ++c) f(c, s) = y[c] * d(0, s);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Exponential integration weights

namespace {

// phi_1 = int_0^h e^{-lambda tau} d tau.
double phi1(double lambda, double h) { return lambda == 0.0 ? h : -std::expm1(-lambda * h) / lambda; }

// psi = int_0^h e^{-lambda tau} tau d tau.
double psi(double lambda, double h) {
    const double x = lambda * h;
    if (x < 0.1) {
        // (1 - e^{-x}(1 + x)) / x^2 = sum_{k>=2} (-1)^k x^{k-2} (k-1)/k!
        double term = 1.0, sum = 0.0, fact = 2.0;
        for (int k = 2; k <= 12; ++k) {
            if (k > 2) fact *= k;
            sum += (k % 2 == 0 ? 1.0 : -1.0) * term * (k - 1) / fact;
            term *= x;
        }
        return h * h * sum;
    }
    return (1.0 - std::exp(-x) * (1.0 + x)) / (lambda * lambda);
}

struct IntervalWeights {
    std::vector<double> decay, w0, w1;
};

// Exact integral over one interval of e^{-lambda (t_{j+1} - s)} times the linear interpolant
// of f_j, f_{j+1}: weights w0 on f_j and w1 on f_{j+1}.
IntervalWeights interval_weights(const Grid& g, double h) {
    const auto& xi = abs_wavenumbers(g);
    IntervalWeights w;
    w.decay.resize(xi.size());
    w.w0.resize(xi.size());
    w.w1.resize(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) {
        const double p = psi(xi[k], h) / h;
        w.decay[k] = std::exp(-xi[k] * h);
        w.w0[k] = p;
        w.w1[k] = phi1(xi[k], h) - p;
    }
    return w;
}

double l2_norm(const SpectralField& s) {
    double acc = 0.0;
    for (const auto& c : s.coefficients()) acc += std::norm(c);
    return std::sqrt(acc);
}

template <class Fn>
SpectralField map_modes(const SpectralField& s, Fn&& fn) {
    SpectralField out = s;
    const auto& xi = abs_wavenumbers(s.grid());
    for (int c = 0; c < out.components(); ++c) {
        for (std::size_t k = 0; k < out.modes(); ++k) out(c, k) *= fn(xi[k]);
    }
    return out;
}

void axpy_modes(SpectralField& y, const std::vector<double>& w, const SpectralField& x) {
    for (int c = 0; c < y.components(); ++c) {
        for (std::size_t k = 0; k < y.modes(); ++k) y(c, k) += w[k] * x(c, k);
    }
}

}  // namespace

DuhamelResult duhamel_all(const SpaceTimeField& f) {
    const TimeMesh& mesh = f.mesh;
    const Grid& g = f.grid();
    DuhamelResult out;
    SpectralField prev = dft(f.frames[0]);
    const double t1 = mesh[0];
    SpectralField G = map_modes(prev, [t1](double lam) { return phi1(lam, t1); });
    const SpectralField head = G;
    out.frames.push_back(idft(G));
    out.head_share.push_back(G.coefficients().empty() || l2_norm(G) == 0.0 ? 0.0 : 1.0);
    for (std::size_t j = 1; j < mesh.size(); ++j) {
        const double h = mesh[j] - mesh[j - 1];
        const IntervalWeights w = interval_weights(g, h);
        SpectralField cur = dft(f.frames[j]);
        for (int c = 0; c < G.components(); ++c) {
            for (std::size_t k = 0; k < G.modes(); ++k) G(c, k) *= w.decay[k];
        }
        axpy_modes(G, w.w0, prev);
        axpy_modes(G, w.w1, cur);
        out.frames.push_back(idft(G));
        const double total = l2_norm(G);
        const double dt = mesh[j] - t1;
        const double head_now = l2_norm(map_modes(head, [dt](double lam) { return std::exp(-lam * dt); }));
        out.head_share.push_back(total > 0.0 ? head_now / total : 0.0);
        prev = std::move(cur);
    }
    return out;
}

Field duhamel(const SpaceTimeField& f, double t) {
    const auto j = f.mesh.find(t);
    if (!j) throw InterfaceError("duhamel: t is not a mesh node");
    return duhamel_all(f).frames[*j];
}

// ---------------------------------------------------------------------------
// Solvers

namespace {

std::vector<Field> semigroup_timeline(const Field& a, const TimeMesh& mesh) {
    const SpectralField ah = dft(a);
    std::vector<Field> out;
    out.reserve(mesh.size());
    for (double t : mesh.nodes()) out.push_back(idft(poisson_semigroup(ah, t)));
    return out;
}

Field evaluate_forcing(const Field& u, const SolverConfig& cfg) {
    if (cfg.zero_forcing) return Field(u.grid(), u.components());
    return forcing(u, cfg.use_cutoff, cfg.density_method(u.grid()));
}

void check_smallness(const Field& a, const SolverConfig& cfg, SolutionBundle& b) {
    if (!cfg.check_smallness) return;
    const Grid& g = a.grid();
    const double T = std::min(cfg.T, g.length() / 8.0);
    std::optional<SupSampling> sampling;
    try {
        sampling = SupSampling::make(g);
    } catch (const Error&) {
        b.warnings.push_back("smallness not checked: grid too coarse for window sampling");
        return;
    }
    const SupSampling& smp = *sampling;
    if (T < *std::ranges::min_element(smp.r_set)) {
        b.warnings.push_back("smallness not checked: T below the smallest window radius");
        return;
    }
    b.smallness = carleson_A_seminorm(a, T, smp).value;
    if (*b.smallness >= cfg.eps_check) {
        std::ostringstream os;
        os << "[a]_A_T = " << *b.smallness << " >= eps_check = " << cfg.eps_check << "; convergence not guaranteed";
        b.warnings.push_back(os.str());
    }
}

bool growing_three_times(const std::vector<double>& h) {
    if (h.size() < 4) return false;
    const std::size_t n = h.size();
    return h[n - 1] > h[n - 2] && h[n - 2] > h[n - 3] && h[n - 3] > h[n - 4];
}

}  // namespace

SolutionBundle picard_solve(const Field& a, const SolverConfig& cfg) {
    const TimeMesh mesh = cfg.mesh();
    const std::vector<Field> base = semigroup_timeline(a, mesh);
    SolutionBundle b(SpaceTimeField(mesh, base), a, "picard");
    check_smallness(a, cfg, b);
    std::vector<Field> forcing_frames;
    for (int l = 0; l < cfg.max_iter; ++l) {
        forcing_frames.clear();
        for (const Field& u : b.u.frames) forcing_frames.push_back(evaluate_forcing(u, cfg));
        DuhamelResult G = duhamel_all(SpaceTimeField(mesh, forcing_frames));
        double diff = 0.0;
        for (std::size_t j = 0; j < mesh.size(); ++j) {
            Field next = base[j] + G.frames[j];
            diff = std::max(diff, sup_distance(next, b.u.frames[j]));
            b.u.frames[j] = std::move(next);
        }
        b.history.push_back(diff);
        b.head_share = std::move(G.head_share);
        if (!std::isfinite(diff)) throw NonconvergenceError("Picard iteration produced non-finite values", b.history);
        if (diff <= cfg.tol) {
            b.converged = true;
            break;
        }
        if (growing_three_times(b.history)) {
            throw NonconvergenceError("Picard differences grew three consecutive times", b.history);
        }
    }
    if (!b.converged) throw NonconvergenceError("Picard iteration did not reach tol within max_iter", b.history);
    diagnose(b, cfg);
    return b;
}

SolutionBundle step_solve(const Field& a, const SolverConfig& cfg) {
    const TimeMesh mesh = cfg.mesh();
    const Grid& g = a.grid();
    const auto& xi = abs_wavenumbers(g);
    std::vector<Field> frames;
    frames.reserve(mesh.size());
    std::vector<double> corrections;
    Field u = a;
    for (std::size_t j = 0; j < mesh.size(); ++j) {
        const SpectralField uh = dft(u);
        const SpectralField f_cur = dft(evaluate_forcing(u, cfg));  // forcing at the previous node
        // First step: constant forcing f(t1) on (0, t1]; later: linear in time on [t_{j-1}, t_j].
        const double h = j == 0 ? mesh[0] : mesh[j] - mesh[j - 1];
        IntervalWeights w = interval_weights(g, h);
        if (j == 0) {
            for (std::size_t k = 0; k < xi.size(); ++k) {
                w.w0[k] = 0.0;
                w.w1[k] = phi1(xi[k], h);
            }
        }
        SpectralField known = poisson_semigroup(uh, h);
        if (j > 0) axpy_modes(known, w.w0, f_cur);
        // Exponential Euler predictor, then fixed-point corrections of the implicit endpoint term.
        SpectralField next = known;
        std::vector<double> euler(xi.size());
        for (std::size_t k = 0; k < xi.size(); ++k) euler[k] = phi1(xi[k], h) - (j > 0 ? w.w0[k] : 0.0);
        axpy_modes(next, euler, f_cur);
        Field candidate = idft(next);
        double change = 0.0;
        for (int it = 0; it < cfg.max_iter; ++it) {
            SpectralField corrected = known;
            axpy_modes(corrected, w.w1, dft(evaluate_forcing(candidate, cfg)));
            Field updated = idft(corrected);
            change = sup_distance(updated, candidate);
            candidate = std::move(updated);
            if (!std::isfinite(change)) throw NonconvergenceError("marching produced non-finite values", corrections);
            if (change <= 0.1 * cfg.tol) break;
        }
        corrections.push_back(change);
        if (change > cfg.tol) throw NonconvergenceError("inner correction did not settle", corrections);
        u = std::move(candidate);
        frames.push_back(u);
    }
    SolutionBundle b(SpaceTimeField(mesh, std::move(frames)), a, "step");
    b.converged = true;
    b.history = std::move(corrections);
    b.head_share.assign(mesh.size(), 0.0);
    diagnose(b, cfg);
    return b;
}

// ---------------------------------------------------------------------------
// Diagnostics

std::vector<double> sphere_deviation(const SpaceTimeField& U) {
    std::vector<double> out;
    for (const Field& u : U.frames) {
        double best = 0.0;
        for (std::size_t s = 0; s < u.sites(); ++s) {
            const double m = u.magnitude_at(s);
            best = std::max(best, std::abs(m * m - 1.0));
        }
        out.push_back(best);
    }
    return out;
}

std::vector<double> energy_series(const SpaceTimeField& U) {
    std::vector<double> out;
    for (const Field& u : U.frames) out.push_back(energy_half(u));
    return out;
}

void diagnose(SolutionBundle& b, const SolverConfig& cfg) {
    b.sphere_deviation = sphere_deviation(b.u);
    b.energy = energy_series(b.u);
    b.x0_sup.clear();
    const DensityMethod dm = cfg.density_method(b.u.grid());
    for (std::size_t j = 0; j < b.u.mesh.size(); ++j) {
        const Field d = energy_density(b.u.frames[j], dm);
        double m = 0.0;
        for (double v : d.component(0)) m = std::max(m, v);
        b.x0_sup.push_back(std::sqrt(b.u.mesh[j] * m));
    }
}

double mild_residual(const SolutionBundle& b, const SolverConfig& cfg) {
    const std::vector<Field> base = semigroup_timeline(b.initial, b.u.mesh);
    std::vector<Field> f;
    for (const Field& u : b.u.frames) f.push_back(evaluate_forcing(u, cfg));
    const DuhamelResult G = duhamel_all(SpaceTimeField(b.u.mesh, std::move(f)));
    double worst = 0.0;
    for (std::size_t j = 0; j < base.size(); ++j) {
        worst = std::max(worst, sup_distance(b.u.frames[j], base[j] + G.frames[j]));
    }
    return worst;
}

std::vector<WeakTest> default_weak_battery(int components) {
    std::vector<WeakTest> out;
    for (int mode : {1, 2, 4}) {
        for (bool sine : {false, true}) {
            for (int c = 0; c < components; ++c) {
                for (int bump = 0; bump < 2; ++bump) out.push_back({mode, sine, c, bump});
            }
        }
    }
    return out;
}

namespace {

// Bump cos^8(pi s / 2) on s in [-1, 1], s affine in tau = ln t over [lo, hi], and its tau-derivative.
// Compactly supported and C^7; far better resolved by the trapezoid rule than exp(-1/(1 - s^2)).
std::pair<double, double> time_bump(double tau, double lo, double hi) {
    const double s = (2.0 * tau - lo - hi) / (hi - lo);
    if (std::abs(s) >= 1.0) return {0.0, 0.0};
    const double arg = 0.5 * std::numbers::pi * s;
    const double c = std::cos(arg);
    const double c7 = std::pow(c, 7);
    return {c7 * c, -8.0 * c7 * std::sin(arg) * 0.5 * std::numbers::pi * (2.0 / (hi - lo))};
}

}  // namespace

double weak_residual(const SolutionBundle& b, const SolverConfig& cfg, const std::vector<WeakTest>& battery) {
    const TimeMesh& mesh = b.u.mesh;
    const Grid& g = b.u.grid();
    const std::size_t M = mesh.size();
    std::vector<Field> f;
    for (const Field& u : b.u.frames) f.push_back(evaluate_forcing(u, cfg));
    const double tau_lo = std::log(mesh[0]);
    const double tau_hi = std::log(mesh[M - 1]);
    const double tau_mid = 0.5 * (tau_lo + tau_hi);
    const double vol = g.cell_volume();
    const double scale = std::pow(g.length(), g.dim()) * std::max(b.initial.sup_norm(), 1e-300);
    double worst = 0.0;
    for (const WeakTest& test : battery) {
        if (test.component >= b.u.components()) throw ConfigError("weak test component out of range");
        const double xi = 2.0 * std::numbers::pi * test.mode / g.length();
        std::vector<double> shape(g.sites());
        for (std::size_t s = 0; s < g.sites(); ++s) {
            const double x = g.site_point(s)[0];
            shape[s] = test.sine ? std::sin(xi * x) : std::cos(xi * x);
        }
        const double lo = test.bump == 0 ? tau_lo : tau_mid;
        double residual = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            const auto [bj, dbj] = time_bump(std::log(mesh[j]), lo, tau_hi);
            if (bj == 0.0 && dbj == 0.0) continue;
            double U = 0.0, F = 0.0;
            const auto uc = b.u.frames[j].component(test.component);
            const auto fc = f[j].component(test.component);
            for (std::size_t s = 0; s < g.sites(); ++s) {
                U += uc[s] * shape[s];
                F += fc[s] * shape[s];
            }
            U *= vol;
            F *= vol;
            // dt = t d tau; d_t phi = (1/t) d_tau phi.
            const double integrand = -dbj * U + mesh[j] * bj * (xi * U - F);
            const double dtau = j == 0 || j == M - 1 ? 0.5 * std::log(mesh.ratio()) : std::log(mesh.ratio());
            residual += dtau * integrand;
        }
        worst = std::max(worst, std::abs(residual) / scale);
    }
    return worst;
}

double constraint_residual(const SolutionBundle& b, const SolverConfig& cfg) {
    const TimeMesh& mesh = b.u.mesh;
    const std::size_t M = mesh.size();
    const DensityMethod dm = cfg.density_method(b.u.grid());
    auto v_of = [&](const Field& u) {
        Field v(u.grid(), 1);
        for (std::size_t s = 0; s < u.sites(); ++s) {
            const double m = u.magnitude_at(s);
            v(0, s) = m * m - 1.0;
        }
        return v;
    };
    double worst = 0.0;
    for (std::size_t j = 1; j + 1 < M; ++j) {
        const Field vm = v_of(b.u.frames[j - 1]), v = v_of(b.u.frames[j]), vp = v_of(b.u.frames[j + 1]);
        const Field av = frac_laplacian(v, 0.5);
        const Field d = energy_density(b.u.frames[j], dm);
        const double dt = mesh[j + 1] - mesh[j - 1];
        for (std::size_t s = 0; s < v.sites(); ++s) {
            const double r = (vp(0, s) - vm(0, s)) / dt + av(0, s) - 2.0 * v(0, s) * d(0, s);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

void write_bundle(const SolutionBundle& b, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "frames");
    for (std::size_t j = 0; j < b.u.frames.size(); ++j) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04zu.csv", j);
        write_field_csv(dir / "frames" / name, b.u.frames[j]);
    }
    nlohmann::ordered_json j;
    j["method"] = b.method;
    j["converged"] = b.converged;
    j["iterations"] = b.history.size();
    j["times"] = b.u.mesh.nodes();
    j["history"] = b.history;
    j["head_share"] = b.head_share;
    j["sphere_deviation"] = b.sphere_deviation;
    j["energy"] = b.energy;
    j["x0_sup"] = b.x0_sup;
    if (b.smallness) j["smallness_A_T"] = *b.smallness;
    j["warnings"] = b.warnings;
    std::filesystem::create_directories(dir / "reports");
    const auto path = dir / "reports" / "diagnostics.json";
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

}  // namespace halfflow
