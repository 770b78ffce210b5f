#include "halfflow/fracgrad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "halfflow/errors.hpp"
#include "halfflow/spectral.hpp"

namespace halfflow {

double gamma_constant(int n) {
    const double half = 0.5 * (n + 1);
    return std::tgamma(half) / std::pow(std::numbers::pi, half);
}

double Annulus::resolved_outer(const Grid& grid) const {
    const double half = 0.5 * grid.length();
    if (!(inner >= 0.0)) throw DomainError("annulus inner radius must be >= 0");
    const double r1 = std::isinf(outer) ? half : outer;
    if (r1 > half * (1.0 + 1e-12)) throw DomainError("annulus outer radius exceeds L/2");
    if (!(inner < r1)) throw DomainError("annulus requires inner < outer");
    return r1;
}

OffsetStencil::OffsetStencil(const Grid& grid, const Annulus& annulus) : grid_(grid) {
    const double r1 = annulus.resolved_outer(grid);
    const double r0 = annulus.inner;
    const int n = grid.dim();
    const double h = grid.spacing();
    const double half_gamma = 0.5 * gamma_constant(n);
    const double vol = grid.cell_volume();
    const int reach = std::min(grid.points() / 2, static_cast<int>(std::floor(r1 / h + 1e-9)));
    const int jr = n == 2 ? reach : 0;
    for (int di = -reach; di <= reach; ++di) {
        for (int dj = -jr; dj <= jr; ++dj) {
            if (di == 0 && dj == 0) continue;
            const double r = std::hypot(di * h, dj * h);
            // r0 < |h| <= r1, with a relative guard so that nodes lying on the
            // outer sphere are kept deterministically.
            if (r <= r0 * (1.0 + 1e-12) || r > r1 * (1.0 + 1e-12)) continue;
            entries_.push_back({di, dj, r, half_gamma * vol / std::pow(r, n + 1)});
        }
    }
    if (r0 == 0.0) {
        // Near the origin the integrand is (grad u . h)^2 / |h|^(n+1). The gap between
        // its lattice sum and its integral is c_n dx |grad u|^2 with c_1 = -2 zeta(0) = 1
        // and c_2 = -2 zeta(1/2) beta(1/2) (Epstein zeta of Z^2, halved for cos^2).
        constexpr double kLatticeConstant2D = 1.9501324600009848;
        inner_correction_ = n == 1 ? half_gamma * h : half_gamma * kLatticeConstant2D * h;
    }
}

namespace {

constexpr std::size_t kBlock = 256;

// out[s] += sum_h w(h) (u(x_s + h) - u(x_s)) . (v(x_s + h) - v(x_s)) for all sites.
void accumulate_pairs(const Field& u, const Field* v, const OffsetStencil& st, std::span<double> out) {
    const Grid& g = u.grid();
    const int N = g.points();
    const int mask = N - 1;
    const std::size_t sites = g.sites();
    const int m = u.components();
    const auto& entries = st.entries();
    const long nblocks = static_cast<long>((sites + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static)
    for (long b = 0; b < nblocks; ++b) {
        const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
        const std::size_t end = std::min(sites, begin + kBlock);
        std::vector<std::size_t> target(end - begin);
        for (const auto& e : entries) {
            for (std::size_t s = begin; s < end; ++s) {
                if (g.dim() == 1) {
                    target[s - begin] = static_cast<std::size_t>((static_cast<int>(s) + e.di) & mask);
                } else {
                    const int i = static_cast<int>(s / N);
                    const int j = static_cast<int>(s % N);
                    target[s - begin] = static_cast<std::size_t>(((i + e.di) & mask) * N + ((j + e.dj) & mask));
                }
            }
            for (int c = 0; c < m; ++c) {
                const double* uc = u.component(c).data();
                const double* vc = v ? v->component(c).data() : uc;
                for (std::size_t s = begin; s < end; ++s) {
                    const std::size_t t = target[s - begin];
                    out[s] += e.weight * (uc[t] - uc[s]) * (vc[t] - vc[s]);
                }
            }
        }
    }
}

void add_inner_correction(const Field& u, const Field* v, double coeff, std::span<double> out) {
    if (coeff == 0.0) return;
    const auto gu = gradient(u);
    const auto gv = v ? gradient(*v) : gu;
    for (std::size_t a = 0; a < gu.size(); ++a) {
        for (int c = 0; c < u.components(); ++c) {
            const auto x = gu[a].component(c);
            const auto y = gv[a].component(c);
            for (std::size_t s = 0; s < out.size(); ++s) out[s] += coeff * x[s] * y[s];
        }
    }
}

}  // namespace

Field fg_modulus_sq(const Field& u, const Annulus& annulus) {
    const OffsetStencil st(u.grid(), annulus);
    Field out(u.grid(), 1);
    accumulate_pairs(u, nullptr, st, out.component(0));
    add_inner_correction(u, nullptr, st.inner_correction(), out.component(0));
    return out;
}

std::vector<double> fg_modulus_sq_at(const Field& u, const Annulus& annulus, std::span<const std::size_t> sites) {
    const Grid& g = u.grid();
    const OffsetStencil st(g, annulus);
    std::vector<double> out(sites.size(), 0.0);
    const long count = static_cast<long>(sites.size());
#pragma omp parallel for schedule(static)
    for (long q = 0; q < count; ++q) {
        const std::size_t s = sites[q];
        const auto idx = g.site_index(s);
        double acc = 0.0;
        for (const auto& e : st.entries()) {
            const std::size_t t = g.site(idx[0] + e.di, idx[1] + e.dj);
            double d2 = 0.0;
            for (int c = 0; c < u.components(); ++c) {
                const double d = u(c, t) - u(c, s);
                d2 += d * d;
            }
            acc += e.weight * d2;
        }
        out[q] = acc;
    }
    if (st.inner_correction() != 0.0) {
        const Field g2 = gradient_sq(u);
        for (std::size_t q = 0; q < sites.size(); ++q) out[q] += st.inner_correction() * g2(0, sites[q]);
    }
    return out;
}

Field od_inner(const Field& u, const Field& v, const Annulus& annulus) {
    if (!u.compatible(v)) throw ShapeError("od_inner: fields must share grid and components");
    const OffsetStencil st(u.grid(), annulus);
    Field out(u.grid(), 1);
    if (&u == &v) {
        accumulate_pairs(u, nullptr, st, out.component(0));
        add_inner_correction(u, nullptr, st.inner_correction(), out.component(0));
    } else {
        accumulate_pairs(u, &v, st, out.component(0));
        add_inner_correction(u, &v, st.inner_correction(), out.component(0));
    }
    return out;
}

Field fg_grad_modulus_sq(const Field& u) {
    Field out(u.grid(), 1);
    for (const Field& d : gradient(u)) out += fg_modulus_sq(d);
    return out;
}

double annulus_split_check(const Field& u, double r0, double rmid, double r1) {
    if (!(r0 < rmid && rmid < r1)) throw DomainError("annulus_split_check requires r0 < rmid < r1");
    const Field whole = fg_modulus_sq(u, {r0, r1});
    const Field lower = fg_modulus_sq(u, {r0, rmid});
    const Field upper = fg_modulus_sq(u, {rmid, r1});
    double defect = 0.0;
    for (std::size_t s = 0; s < u.sites(); ++s) {
        defect = std::max(defect, std::abs(whole(0, s) - lower(0, s) - upper(0, s)));
    }
    return defect;
}

double truncation_bias_bound(const Field& u) {
    const Grid& g = u.grid();
    const double R = 0.5 * g.length();
    const double sup = u.sup_norm();
    // integral of |h|^{-(n+1)} over |h| > R.
    const double tail = g.dim() == 1 ? 2.0 / R : 2.0 * std::numbers::pi / R;
    return 0.5 * gamma_constant(g.dim()) * 4.0 * sup * sup * tail;
}

Field energy_density_spectral(const Field& u) {
    const Field au = frac_laplacian(u, 0.5);
    Field sq(u.grid(), 1);
    Field out(u.grid(), 1);
    auto o = out.component(0);
    auto q = sq.component(0);
    for (int c = 0; c < u.components(); ++c) {
        const auto uc = u.component(c);
        const auto ac = au.component(c);
        for (std::size_t s = 0; s < u.sites(); ++s) {
            o[s] += uc[s] * ac[s];
            q[s] += uc[s] * uc[s];
        }
    }
    const Field aq = frac_laplacian(sq, 0.5);
    const auto a = aq.component(0);
    for (std::size_t s = 0; s < u.sites(); ++s) o[s] -= 0.5 * a[s];
    return out;
}

DensityMethod default_density_method(const Grid& grid) noexcept {
    return grid.dim() == 1 ? DensityMethod::Quadrature : DensityMethod::Spectral;
}

Field energy_density(const Field& u, DensityMethod method) {
    return method == DensityMethod::Quadrature ? fg_modulus_sq(u) : energy_density_spectral(u);
}

Field grad_energy_density(const Field& u, DensityMethod method) {
    if (method == DensityMethod::Quadrature) return fg_grad_modulus_sq(u);
    Field out(u.grid(), 1);
    for (const Field& d : gradient(u)) out += energy_density_spectral(d);
    return out;
}

}  // namespace halfflow
