#include "halfflow/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <nlohmann/json.hpp>

#include "halfflow/errors.hpp"
#include "halfflow/spectral.hpp"

namespace halfflow {

namespace {

constexpr double kMinWindowCells = 16.0;

double min_radius(const Grid& g) { return kMinWindowCells * g.spacing(); }
double max_radius(const Grid& g) { return 0.25 * g.length(); }

double clamp_radius(const Grid& g, double r) { return std::clamp(r, min_radius(g), max_radius(g)); }

// Largest value and its index; ties resolve to the first occurrence.
std::pair<double, std::size_t> arg_max(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return {v.empty() ? 0.0 : v[best], best};
}

double max_of(std::span<const double> v) {
    double best = 0.0;
    for (double x : v) best = std::max(best, x);
    return best;
}

void set_argsup(SeminormReport& rep, const Grid& g, std::size_t site, const std::string& scale_name, double scale) {
    const Point x = g.site_point(site);
    rep.argsup["x0"] = x[0];
    if (g.dim() == 2) rep.argsup["x1"] = x[1];
    rep.argsup[scale_name] = scale;
}

/**
 * Running time integral I(t_j) = t_1 D(t_1) + trapezoid over [t_1, t_j] of a
 * nonnegative density, and window sups of I at selected nodes.
 */
class CarlesonAccumulator {
public:
    CarlesonAccumulator(const Grid& g, int x_stride) : g_(g), centers_(strided_sites(g, x_stride)) {}

    void add(double t, const Field& density) {
        const auto d = density.component(0);
        if (integral_.empty()) {
            integral_.assign(d.begin(), d.end());
            for (double& v : integral_) v *= t;
            head_ = integral_;
        } else {
            const double w = 0.5 * (t - t_prev_);
            for (std::size_t s = 0; s < integral_.size(); ++s) integral_[s] += w * (prev_[s] + d[s]);
        }
        prev_.assign(d.begin(), d.end());
        t_prev_ = t;
    }

    struct Sup {
        double value = 0.0;
        std::size_t site = 0;
        double head_share = 0.0;
    };

    Sup window_sup(double r) const {
        const WindowStencil st(g_, r);
        const auto avg = st.averages(integral_, centers_);
        const auto [value, q] = arg_max(avg);
        Sup out{value, centers_.empty() ? 0 : centers_[q], 0.0};
        if (value > 0.0) out.head_share = st.average(head_, out.site) / value;
        return out;
    }

private:
    Grid g_;
    std::vector<std::size_t> centers_;
    std::vector<double> integral_;
    std::vector<double> head_;
    std::vector<double> prev_;
    double t_prev_ = 0.0;
};

struct ProfileEntry {
    double r;
    CarlesonAccumulator::Sup sup;
    double standard_sup;  // sup_{t <= r} t ||D(t)||_inf
};

// Window sups of int_0^r |d S_t a|^2 for every r in the r_set.
std::vector<ProfileEntry> a_profile(const Field& a, const SupSampling& smp) {
    const Grid& g = a.grid();
    if (smp.r_set.empty()) throw DomainError("sampling has no admissible radii");
    const SpectralField ah = dft(a);
    CarlesonAccumulator acc(g, smp.x_stride);
    std::vector<ProfileEntry> out;
    double standard = 0.0;
    std::size_t next = 0;
    std::vector<double> r_sorted = smp.r_set;
    std::ranges::sort(r_sorted);
    for (std::size_t j = 0; j < smp.t_mesh.size() && next < r_sorted.size(); ++j) {
        const double t = smp.t_mesh[j];
        const Field v = idft(poisson_semigroup(ah, t));
        const Field d = energy_density(v, smp.method);
        acc.add(t, d);
        standard = std::max(standard, t * max_of(d.component(0)));
        if (std::abs(t - r_sorted[next]) <= 1e-9 * r_sorted[next]) {
            out.push_back({r_sorted[next], acc.window_sup(r_sorted[next]), standard});
            ++next;
        }
    }
    if (next != r_sorted.size()) throw InterfaceError("sampling radius is not a node of the time mesh");
    return out;
}

void describe(SeminormReport& rep, const SupSampling& smp) {
    rep.mesh["t1"] = smp.t_mesh[0];
    rep.mesh["t_ratio"] = smp.t_mesh.ratio();
    rep.mesh["t_nodes"] = static_cast<double>(smp.t_mesh.size());
    rep.mesh["x_stride"] = smp.x_stride;
    rep.mesh["r_min"] = *std::ranges::min_element(smp.r_set);
    rep.mesh["r_max"] = *std::ranges::max_element(smp.r_set);
    rep.mesh["r_count"] = static_cast<double>(smp.r_set.size());
    rep.notes["density"] = smp.method == DensityMethod::Quadrature ? "quadrature" : "spectral";
}

double check_T(const Grid& g, double T) {
    if (std::isinf(T) && T > 0) return T;
    if (!(T > 0.0)) throw DomainError("T must be positive");
    if (T > g.length() / 8.0 * (1.0 + 1e-12)) throw DomainError("T exceeds L/8, the inner-window limit");
    return T;
}

}  // namespace

std::string to_json(const SeminormReport& r, int indent) {
    nlohmann::ordered_json j;
    j["value"] = r.value;
    j["components"] = r.components;
    j["argsup"] = r.argsup;
    j["mesh"] = r.mesh;
    j["notes"] = r.notes;
    return j.dump(indent);
}

SupSampling SupSampling::make(const Grid& g, std::optional<double> T_top, int x_stride, int per_octave,
                              std::optional<DensityMethod> method) {
    const double top = T_top.value_or(max_radius(g));
    if (!(top > 0.0) || top > max_radius(g) * (1.0 + 1e-12)) throw DomainError("T_top must lie in (0, L/4]");
    if (x_stride < 1) throw ConfigError("x_stride must be >= 1");
    if (per_octave < 1) throw ConfigError("per_octave must be >= 1");
    std::vector<double> r_set;
    int octaves = 0;
    for (double r = top; r >= min_radius(g) * (1.0 - 1e-12); r *= 0.5, ++octaves) r_set.push_back(r);
    if (r_set.empty()) throw DomainError("no dyadic radius fits in [16 dx, L/4]");
    // Six further octaves below the smallest radius feed the time integrals.
    const int M = per_octave * (octaves - 1 + 6) + 1;
    TimeMesh mesh = TimeMesh::geometric(top, M, std::exp2(1.0 / per_octave));
    return SupSampling{std::move(r_set), x_stride, std::move(mesh), method.value_or(default_density_method(g))};
}

SeminormReport carleson_A_seminorm(const Field& a, double T, const SupSampling& smp) {
    check_T(a.grid(), T);
    const auto profile = a_profile(a, smp);
    SeminormReport rep;
    const ProfileEntry* best = nullptr;
    for (const auto& e : profile) {
        if (e.r > T * (1.0 + 1e-12)) continue;
        if (!best || e.sup.value > best->sup.value) best = &e;
        rep.components["standard_sup"] = e.standard_sup;
    }
    if (!best) throw DomainError("T is below the smallest sampled radius");
    rep.value = std::sqrt(best->sup.value);
    rep.components["carleson_sq"] = best->sup.value;
    rep.components["head_share"] = best->sup.head_share;
    set_argsup(rep, a.grid(), best->sup.site, "r", best->r);
    describe(rep, smp);
    return rep;
}

std::vector<DecayRow> decay_profile(const Field& a, const std::vector<double>& T_list, const SupSampling& smp) {
    for (double T : T_list) check_T(a.grid(), T);
    const auto profile = a_profile(a, smp);
    std::vector<DecayRow> out;
    for (double T : T_list) {
        double best = -1.0;
        for (const auto& e : profile) {
            if (e.r <= T * (1.0 + 1e-12)) best = std::max(best, e.sup.value);
        }
        if (best < 0.0) throw DomainError("T is below the smallest sampled radius");
        out.push_back({T, std::sqrt(best)});
    }
    return out;
}

SeminormReport xt_seminorm(const SpaceTimeField& U, int x_stride, std::optional<DensityMethod> method) {
    const Grid& g = U.grid();
    const DensityMethod dm = method.value_or(default_density_method(g));
    CarlesonAccumulator c0(g, x_stride), c1(g, x_stride);
    double sup_u = 0.0, sup0 = 0.0, sup1 = 0.0, carl0 = 0.0, carl1 = 0.0;
    std::size_t arg0 = 0, arg1 = 0;
    double argt0 = 0.0, argt1 = 0.0;
    for (std::size_t j = 0; j < U.mesh.size(); ++j) {
        const double t = U.mesh[j];
        const Field& u = U.frames[j];
        sup_u = std::max(sup_u, u.sup_norm());
        const Field d0 = energy_density(u, dm);
        Field d1 = grad_energy_density(u, dm);
        sup0 = std::max(sup0, std::sqrt(t * max_of(d0.component(0))));
        sup1 = std::max(sup1, std::sqrt(t * t * t * max_of(d1.component(0))));
        d1 *= t * t;
        c0.add(t, d0);
        c1.add(t, d1);
        const double r = clamp_radius(g, t);
        const auto s0 = c0.window_sup(r);
        const auto s1 = c1.window_sup(r);
        if (s0.value > carl0) carl0 = s0.value, arg0 = s0.site, argt0 = t;
        if (s1.value > carl1) carl1 = s1.value, arg1 = s1.site, argt1 = t;
    }
    SeminormReport rep;
    rep.components["sup_norm"] = sup_u;
    rep.components["x0_sup"] = sup0;
    rep.components["x0_carleson"] = std::sqrt(carl0);
    rep.components["x1_sup"] = sup1;
    rep.components["x1_carleson"] = std::sqrt(carl1);
    rep.value = sup0 + std::sqrt(carl0) + sup1 + std::sqrt(carl1);
    rep.components["total"] = sup_u + rep.value;
    set_argsup(rep, g, arg0, "t", argt0);
    rep.argsup["x1_carleson_t"] = argt1;
    rep.argsup["x1_carleson_site"] = static_cast<double>(arg1);
    rep.mesh["t1"] = U.mesh[0];
    rep.mesh["T"] = U.mesh.horizon();
    rep.mesh["t_ratio"] = U.mesh.ratio();
    rep.mesh["x_stride"] = x_stride;
    rep.notes["density"] = dm == DensityMethod::Quadrature ? "quadrature" : "spectral";
    return rep;
}

SeminormReport yt_norm(const SpaceTimeField& F, int x_stride) {
    const Grid& g = F.grid();
    CarlesonAccumulator c0(g, x_stride), c1(g, x_stride);
    double sup0 = 0.0, sup1 = 0.0, carl0 = 0.0, carl1 = 0.0;
    for (std::size_t j = 0; j < F.mesh.size(); ++j) {
        const double t = F.mesh[j];
        const Field& f = F.frames[j];
        Field mag(g, 1), grad(g, 1);
        for (std::size_t s = 0; s < g.sites(); ++s) mag(0, s) = f.magnitude_at(s);
        for (const Field& d : gradient(f)) {
            for (int c = 0; c < d.components(); ++c) {
                for (std::size_t s = 0; s < g.sites(); ++s) grad(0, s) += d(c, s) * d(c, s);
            }
        }
        for (double& v : grad.component(0)) v = std::sqrt(v);
        sup0 = std::max(sup0, t * max_of(mag.component(0)));
        sup1 = std::max(sup1, t * t * max_of(grad.component(0)));
        grad *= t;
        c0.add(t, mag);
        c1.add(t, grad);
        const double r = clamp_radius(g, t);
        carl0 = std::max(carl0, c0.window_sup(r).value);
        carl1 = std::max(carl1, c1.window_sup(r).value);
    }
    SeminormReport rep;
    rep.components["y_sup"] = sup0;
    rep.components["y_carleson"] = carl0;
    rep.components["y_grad_sup"] = sup1;
    rep.components["y_grad_carleson"] = carl1;
    rep.components["norm"] = sup0 + carl0;
    rep.components["seminorm"] = sup1 + carl1;
    rep.value = sup0 + carl0 + sup1 + carl1;
    rep.mesh["t1"] = F.mesh[0];
    rep.mesh["T"] = F.mesh.horizon();
    rep.mesh["x_stride"] = x_stride;
    return rep;
}

namespace {

// Lattice gap c dx^2 |grad a|^2 of the omitted diagonal y = z in the Q0 double sum:
// -zeta(-1) * 2 = 1/6 in 1D, -Z_{Z^2}(0) / 2 = 1/2 in 2D.
Field q0_diagonal(const Field& a) {
    const Grid& g = a.grid();
    const double c = g.dim() == 1 ? 1.0 / 6.0 : 0.5;
    Field out = gradient_sq(a);
    out *= c * g.spacing() * g.spacing();
    return out;
}

double pair_sq(const Field& a, std::size_t y, std::size_t z) {
    double acc = 0.0;
    for (int c = 0; c < a.components(); ++c) {
        const double d = a(c, y) - a(c, z);
        acc += d * d;
    }
    return acc;
}

}  // namespace

SeminormReport q0_seminorm(const Field& a, const SupSampling& smp) {
    const Grid& g = a.grid();
    const double h = g.spacing();
    const int N = g.points();
    const auto centers = strided_sites(g, smp.x_stride);
    const Field diag = q0_diagonal(a);
    const double vol = g.cell_volume();
    double best = 0.0;
    std::size_t best_site = 0;
    double best_r = smp.r_set.front();
    for (double r : smp.r_set) {
        const WindowStencil st(g, r);
        std::vector<double> q(centers.size(), 0.0);
        if (g.dim() == 1) {
            // Pairs (y, y+s) inside [c-w, c+w] for s = 1..2w, via periodic prefix sums per offset.
            const int w = st.rows()[0][1];
            std::vector<double> prefix(3 * N + 1);
            for (int s = 1; s <= 2 * w; ++s) {
                for (int k = 0; k < 3 * N; ++k) {
                    const int y = k % N;
                    prefix[k + 1] = prefix[k] + pair_sq(a, y, g.site(y + s));
                }
                const double weight = 2.0 * vol * vol / (s * h);
                for (std::size_t i = 0; i < centers.size(); ++i) {
                    const int c = static_cast<int>(centers[i]);
                    q[i] += weight * (prefix[c + w - s + N + 1] - prefix[c - w + N]);
                }
            }
        } else {
            std::vector<std::array<int, 2>> offs;
            st.for_each(0, [&](std::size_t s) {
                const auto idx = g.site_index(s);
                offs.push_back({idx[0] >= N / 2 ? idx[0] - N : idx[0], idx[1] >= N / 2 ? idx[1] - N : idx[1]});
            });
            const long count = static_cast<long>(centers.size());
#pragma omp parallel for schedule(static)
            for (long i = 0; i < count; ++i) {
                const auto c = g.site_index(centers[i]);
                std::vector<std::size_t> sites(offs.size());
                for (std::size_t p = 0; p < offs.size(); ++p) sites[p] = g.site(c[0] + offs[p][0], c[1] + offs[p][1]);
                double acc = 0.0;
                for (std::size_t p = 0; p < offs.size(); ++p) {
                    for (std::size_t k = p + 1; k < offs.size(); ++k) {
                        const double dist = std::hypot((offs[p][0] - offs[k][0]) * h, (offs[p][1] - offs[k][1]) * h);
                        acc += pair_sq(a, sites[p], sites[k]) / (dist * dist);
                    }
                }
                q[i] = 2.0 * vol * vol * acc;
            }
        }
        const auto dsum = st.averages(diag.component(0), centers);
        const double rn = g.dim() == 1 ? r : r * r;
        for (std::size_t i = 0; i < centers.size(); ++i) {
            const double v = (q[i] + dsum[i] * static_cast<double>(st.count()) * vol) / rn;
            if (v > best) best = v, best_site = centers[i], best_r = r;
        }
    }
    SeminormReport rep;
    rep.value = std::sqrt(best);
    rep.components["q0_sq"] = best;
    set_argsup(rep, g, best_site, "r", best_r);
    describe(rep, smp);
    rep.notes["normalization"] = "r^-n double integral, weight |y-z|^-n, no gamma factor";
    return rep;
}

SeminormReport bmo_seminorm(const Field& a, const SupSampling& smp) {
    const Grid& g = a.grid();
    const auto centers = strided_sites(g, smp.x_stride);
    const int m = a.components();
    double best = 0.0;
    std::size_t best_site = 0;
    double best_r = smp.r_set.front();
    for (double r : smp.r_set) {
        const WindowStencil st(g, r);
        std::vector<double> osc(centers.size());
        const long count = static_cast<long>(centers.size());
#pragma omp parallel for schedule(static)
        for (long i = 0; i < count; ++i) {
            // Deviations from the center value keep constants exactly at zero.
            const std::size_t c0 = centers[i];
            std::vector<double> mean(m, 0.0);
            st.for_each(c0, [&](std::size_t s) {
                for (int c = 0; c < m; ++c) mean[c] += a(c, s) - a(c, c0);
            });
            for (double& v : mean) v /= static_cast<double>(st.count());
            double acc = 0.0;
            st.for_each(c0, [&](std::size_t s) {
                double d2 = 0.0;
                for (int c = 0; c < m; ++c) {
                    const double d = a(c, s) - a(c, c0) - mean[c];
                    d2 += d * d;
                }
                acc += std::sqrt(d2);
            });
            osc[i] = acc / static_cast<double>(st.count());
        }
        const auto [v, q] = arg_max(osc);
        if (v > best) best = v, best_site = centers[q], best_r = r;
    }
    SeminormReport rep;
    rep.value = best;
    set_argsup(rep, g, best_site, "r", best_r);
    describe(rep, smp);
    rep.notes["normalization"] = "L1 mean oscillation";
    return rep;
}

double littlewood_paley_psi(double s) noexcept {
    // chi = 1 on [0, 1], 0 on [2, inf), C-infinity in between.
    auto f = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    auto chi = [&](double x) {
        if (x <= 1.0) return 1.0;
        if (x >= 2.0) return 0.0;
        return f(2.0 - x) / (f(2.0 - x) + f(x - 1.0));
    };
    return chi(s) - chi(2.0 * s);
}

SeminormReport besov_seminorm(const Field& a) {
    const Grid& g = a.grid();
    const SpectralField s = dft(a);
    const auto& xi = abs_wavenumbers(g);
    const double xi_min = 2.0 * std::numbers::pi / g.length();
    const double xi_nyq = std::numbers::pi / g.spacing();
    const int k_lo = static_cast<int>(std::floor(std::log2(xi_min)));
    const int k_hi = static_cast<int>(std::floor(std::log2(xi_nyq))) - 1;
    SeminormReport rep;
    double best = 0.0;
    int best_k = k_lo;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double scale = std::exp2(-k);
        double norm2 = 0.0;
        for (int c = 0; c < s.components(); ++c) {
            for (std::size_t mode = 0; mode < s.modes(); ++mode) {
                const double w = littlewood_paley_psi(scale * xi[mode]);
                if (w != 0.0) norm2 += w * w * std::norm(s(c, mode));
            }
        }
        // Unitary DFT: sum |u_hat|^2 dx^n = ||u||_{L^2}^2.
        const double v = std::exp2(0.5 * k * g.dim()) * std::sqrt(norm2 * g.cell_volume());
        rep.components["shell_" + std::to_string(k)] = v;
        if (v > best) best = v, best_k = k;
    }
    rep.value = best;
    rep.argsup["k"] = best_k;
    rep.mesh["k_min"] = k_lo;
    rep.mesh["k_max"] = k_hi;
    return rep;
}

TailOracle tail_carleson_oracle(const Field& a, int per_octave) {
    const Grid& g = a.grid();
    if (g.length() < 8.0) throw DomainError("tail oracle needs L >= 8 for the unit window");
    const std::vector<std::size_t> sites = window_sites(g, Point{0.0, 0.0}, 1.0);
    const double vol = g.cell_volume();

    const OffsetStencil full(g, Annulus::full());
    double rhs = 0.0;
    for (std::size_t s : sites) {
        const auto idx = g.site_index(s);
        for (const auto& e : full.entries()) {
            const std::size_t t = g.site(idx[0] + e.di, idx[1] + e.dj);
            rhs += vol * e.weight * std::min(e.radius, 1.0) * pair_sq(a, s, t);
        }
    }

    const double ratio = std::exp2(1.0 / per_octave);
    const int M = static_cast<int>(std::ceil(per_octave * std::log2(2.0 / g.spacing()))) + 1;
    const TimeMesh mesh = TimeMesh::geometric(1.0, M, ratio);
    auto F = [&](double t) {
        double acc = 0.0;
        for (double v : fg_modulus_sq_at(a, Annulus{t, Annulus::full().outer}, sites)) acc += v * vol;
        return acc;
    };
    double prev = F(mesh[0]);
    // Below the shortest lattice offset the integrand is constant.
    double lhs = mesh[0] * prev;
    for (std::size_t j = 1; j < mesh.size(); ++j) {
        const double cur = F(mesh[j]);
        lhs += 0.5 * (mesh[j] - mesh[j - 1]) * (prev + cur);
        prev = cur;
    }
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    return {lhs, rhs, scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0};
}

}  // namespace halfflow
