#include "halfflow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <tuple>
#include <memory>
#include <mutex>
#include <numbers>

#include "halfflow/errors.hpp"

namespace halfflow {

namespace {

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))), size(n) {}
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* data;
    std::size_t size;
};

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

// FFTW planning is not thread-safe; execution with new-array execute is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

const PlanPair& plans_for(const Grid& g) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard lock(plan_mutex());
    auto key = std::make_pair(g.dim(), g.points());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    FftwBuffer in(g.sites()), out(g.sites());
    PlanPair p;
    // ESTIMATE keeps plans (and thus bits) independent of timing noise.
    if (g.dim() == 1) {
        p.forward = fftw_plan_dft_1d(g.points(), in.data, out.data, FFTW_FORWARD, FFTW_ESTIMATE);
        p.backward = fftw_plan_dft_1d(g.points(), in.data, out.data, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
        p.forward = fftw_plan_dft_2d(g.points(), g.points(), in.data, out.data, FFTW_FORWARD, FFTW_ESTIMATE);
        p.backward = fftw_plan_dft_2d(g.points(), g.points(), in.data, out.data, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    return cache.emplace(key, p).first->second;
}

struct Scratch {
    std::unique_ptr<FftwBuffer> in, out;
    FftwBuffer& input(std::size_t n) {
        if (!in || in->size != n) in = std::make_unique<FftwBuffer>(n);
        return *in;
    }
    FftwBuffer& output(std::size_t n) {
        if (!out || out->size != n) out = std::make_unique<FftwBuffer>(n);
        return *out;
    }
};

Scratch& scratch() {
    thread_local Scratch s;
    return s;
}

}  // namespace

SpectralField::SpectralField(const Grid& grid, int m) : grid_(grid), m_(m), coeffs_(grid.sites() * m) {}

std::array<int, 2> SpectralField::wavevector(std::size_t mode) const noexcept {
    const int N = grid_.points();
    auto signed_k = [N](int k) { return k >= N / 2 ? k - N : k; };
    const auto idx = grid_.site_index(mode);
    return {signed_k(idx[0]), grid_.dim() == 2 ? signed_k(idx[1]) : 0};
}

std::size_t SpectralField::mode_of(int k0, int k1) const noexcept { return grid_.site(k0, k1); }

double wavenumber(const Grid& grid, int k) noexcept {
    const int N = grid.points();
    const int ks = k >= N / 2 ? k - N : k;
    return 2.0 * std::numbers::pi * ks / grid.length();
}

const std::vector<double>& abs_wavenumbers(const Grid& g) {
    static std::map<std::tuple<int, double, int>, std::vector<double>> cache;
    static std::mutex m;
    std::lock_guard lock(m);
    auto key = std::make_tuple(g.dim(), g.length(), g.points());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<double> xi(g.sites());
    for (std::size_t s = 0; s < g.sites(); ++s) {
        const auto idx = g.site_index(s);
        const double a = wavenumber(g, idx[0]);
        const double b = g.dim() == 2 ? wavenumber(g, idx[1]) : 0.0;
        xi[s] = std::hypot(a, b);
    }
    return cache.emplace(key, std::move(xi)).first->second;
}

SpectralField dft(const Field& field) {
    const Grid& g = field.grid();
    const std::size_t n = g.sites();
    const PlanPair& p = plans_for(g);
    FftwBuffer& in = scratch().input(n);
    FftwBuffer& out = scratch().output(n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    SpectralField s(g, field.components());
    for (int c = 0; c < field.components(); ++c) {
        const auto comp = field.component(c);
        for (std::size_t i = 0; i < n; ++i) {
            in.data[i][0] = comp[i];
            in.data[i][1] = 0.0;
        }
        fftw_execute_dft(p.forward, in.data, out.data);
        for (std::size_t i = 0; i < n; ++i) s(c, i) = {out.data[i][0] * norm, out.data[i][1] * norm};
    }
    return s;
}

Field idft(const SpectralField& spectrum) {
    const Grid& g = spectrum.grid();
    const std::size_t n = g.sites();
    const PlanPair& p = plans_for(g);
    FftwBuffer& in = scratch().input(n);
    FftwBuffer& out = scratch().output(n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    Field f(g, spectrum.components());
    for (int c = 0; c < spectrum.components(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            in.data[i][0] = spectrum(c, i).real();
            in.data[i][1] = spectrum(c, i).imag();
        }
        fftw_execute_dft(p.backward, in.data, out.data);
        auto comp = f.component(c);
        for (std::size_t i = 0; i < n; ++i) comp[i] = out.data[i][0] * norm;
    }
    return f;
}

Field frac_laplacian(const Field& field, double s) {
    if (s != 0.25 && s != 0.5 && s != 1.0) throw ConfigError("frac_laplacian supports s in {1/4, 1/2, 1}");
    if (s == 0.5) return apply_radial_multiplier(field, [](double xi) { return xi; });
    if (s == 1.0) return apply_radial_multiplier(field, [](double xi) { return xi * xi; });
    return apply_radial_multiplier(field, [](double xi) { return std::sqrt(xi); });
}

Field poisson_semigroup(const Field& field, double t) {
    if (!(t >= 0.0)) throw DomainError("poisson_semigroup requires t >= 0");
    if (t == 0.0) return field;
    return apply_radial_multiplier(field, [t](double xi) { return std::exp(-t * xi); });
}

SpectralField poisson_semigroup(const SpectralField& spectrum, double t) {
    if (!(t >= 0.0)) throw DomainError("poisson_semigroup requires t >= 0");
    SpectralField out = spectrum;
    const auto& xi = abs_wavenumbers(spectrum.grid());
    for (int c = 0; c < out.components(); ++c) {
        for (std::size_t k = 0; k < out.modes(); ++k) out(c, k) *= std::exp(-t * xi[k]);
    }
    return out;
}

double poisson_kernel(const Point& x, double t, int n) {
    if (!(t > 0.0)) throw DomainError("poisson_kernel requires t > 0");
    if (n != 1 && n != 2) throw ConfigError("poisson_kernel supports n in {1, 2}");
    const double half = 0.5 * (n + 1);
    const double gamma_n = std::tgamma(half) / std::pow(std::numbers::pi, half);
    const double r2 = (n == 1 ? x[0] * x[0] : x[0] * x[0] + x[1] * x[1]) / (t * t);
    return gamma_n * std::pow(1.0 + r2, -half) / std::pow(t, n);
}

double poisson_kernel(double x, double t) { return poisson_kernel(Point{x, 0.0}, t, 1); }

std::vector<Field> gradient(const Field& field) {
    const Grid& g = field.grid();
    const SpectralField s = dft(field);
    const int N = g.points();
    std::vector<Field> out;
    for (int axis = 0; axis < g.dim(); ++axis) {
        SpectralField d(g, field.components());
        for (std::size_t k = 0; k < s.modes(); ++k) {
            const int kk = g.site_index(k)[axis];
            // The Nyquist mode has no odd real counterpart; drop it.
            const double xi = kk == N / 2 ? 0.0 : wavenumber(g, kk);
            for (int c = 0; c < field.components(); ++c) d(c, k) = std::complex<double>(0.0, xi) * s(c, k);
        }
        out.push_back(idft(d));
    }
    return out;
}

Field gradient_sq(const Field& field) {
    Field out(field.grid(), 1);
    for (const Field& d : gradient(field)) {
        for (int c = 0; c < d.components(); ++c) {
            const auto comp = d.component(c);
            auto o = out.component(0);
            for (std::size_t s = 0; s < comp.size(); ++s) o[s] += comp[s] * comp[s];
        }
    }
    return out;
}

double energy_half(const Field& field) {
    const SpectralField s = dft(field);
    const auto& xi = abs_wavenumbers(field.grid());
    double acc = 0.0;
    for (int c = 0; c < s.components(); ++c) {
        for (std::size_t k = 0; k < s.modes(); ++k) acc += xi[k] * std::norm(s(c, k));
    }
    return 0.5 * acc * field.grid().cell_volume();
}

double dirichlet_form(const Field& u, const Field& v) {
    if (!u.compatible(v)) throw ShapeError("dirichlet_form: fields must share grid and components");
    const SpectralField su = dft(u);
    const SpectralField sv = dft(v);
    const auto& xi = abs_wavenumbers(u.grid());
    double acc = 0.0;
    for (int c = 0; c < su.components(); ++c) {
        for (std::size_t k = 0; k < su.modes(); ++k) acc += xi[k] * std::real(std::conj(su(c, k)) * sv(c, k));
    }
    return acc * u.grid().cell_volume();
}

double l2_inner(const Field& u, const Field& v) {
    if (!u.compatible(v)) throw ShapeError("l2_inner: fields must share grid and components");
    double acc = 0.0;
    for (std::size_t i = 0; i < u.values().size(); ++i) acc += u.values()[i] * v.values()[i];
    return acc * u.grid().cell_volume();
}

}  // namespace halfflow
