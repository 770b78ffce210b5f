#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "halfflow/errors.hpp"
#include "halfflow/fracgrad.hpp"
#include "halfflow/spectral.hpp"
#include "test_fields.hpp"

using namespace halfflow;
using halfflow::testsupport::mode_frequency;
using halfflow::testsupport::random_band_limited;
using halfflow::testsupport::sphere_wave;

namespace {

constexpr double kPi = std::numbers::pi;

Field poisson_field(const Grid& g) {
    return sample_function(g, 1, [](const Point& x) { return std::vector<double>{poisson_kernel(x[0], 1.0)}; });
}

double integrate(const Field& scalar) {
    double acc = 0.0;
    for (double v : scalar.component(0)) acc += v;
    return acc * scalar.grid().cell_volume();
}

}  // namespace

TEST(GammaConstant, Values) {
    EXPECT_NEAR(gamma_constant(1), 1.0 / kPi, 1e-15);
    EXPECT_NEAR(gamma_constant(2), 1.0 / (2.0 * kPi), 1e-15);
}

TEST(Annulus, Validation) {
    const Grid g = Grid::make(1, 10.0, 64);
    EXPECT_DOUBLE_EQ(Annulus::full().resolved_outer(g), 5.0);
    EXPECT_THROW((Annulus{0.0, 6.0}.resolved_outer(g)), DomainError);
    EXPECT_THROW((Annulus{2.0, 1.0}.resolved_outer(g)), DomainError);
    const Field u = random_band_limited(g, 1, 5, 3);
    EXPECT_THROW(fg_modulus_sq(u, {0.0, 6.0}), DomainError);
}

TEST(FgModulus, ConstantIsZero) {
    for (int n : {1, 2}) {
        const Grid g = Grid::make(n, 8.0, n == 1 ? 128 : 16);
        const Field c = sample_function(g, 2, [](const Point&) { return std::vector<double>{0.6, 0.8}; });
        for (Annulus a : {Annulus::full(), Annulus{0.5, 2.0}}) EXPECT_EQ(fg_modulus_sq(c, a).sup_norm(), 0.0);
    }
}

TEST(FgModulus, SphereWave1D) {
    // Truncating the offsets at L/2 drops about 4/(pi L |xi|) relative.
    const Grid g = Grid::make(1, 64.0, 4096);
    for (int k : {32, 40, 64}) {
        const double xi = mode_frequency(g, k);
        const Field d = fg_modulus_sq(sphere_wave(g, k));
        for (std::size_t s = 0; s < g.sites(); s += 37) EXPECT_NEAR(d(0, s), xi, 0.01 * xi) << "k=" << k;
    }
}

TEST(FgModulus, SphereWave2DAtSites) {
    const Grid g = Grid::make(2, 64.0, 512);
    const int k = 40;
    const double xi = mode_frequency(g, k);
    const Field u = sphere_wave(g, k);
    const std::vector<std::size_t> sites{g.site(0, 0), g.site(100, 7), g.site(255, 300)};
    for (double v : fg_modulus_sq_at(u, Annulus::full(), sites)) EXPECT_NEAR(v, xi, 0.01 * xi);
}

TEST(FgModulus, PoissonKernelClosedForm) {
    // |d p_1|^2(x) = 1 / (4 pi^2 (1 + x^2)) by direct quadrature of the defining integral.
    const Grid g = Grid::make(1, 200.0, 4096);
    const Field d = fg_modulus_sq(poisson_field(g));
    for (std::size_t s = 0; s < g.sites(); ++s) {
        const double x = g.site_point(s)[0];
        if (std::abs(x) > 5.0) continue;
        const double exact = 1.0 / (4.0 * kPi * kPi * (1.0 + x * x));
        EXPECT_NEAR(d(0, s), exact, 0.02 * exact) << "x=" << x;
    }
}

TEST(FgModulus, AtSitesMatchesFullField) {
    const Grid g = Grid::make(2, 6.0, 32);
    const Field u = random_band_limited(g, 2, 5, 11);
    const Annulus a{0.0, 2.0};
    const Field full = fg_modulus_sq(u, a);
    const std::vector<std::size_t> sites{0, 17, 500, 1023};
    const auto partial = fg_modulus_sq_at(u, a, sites);
    for (std::size_t q = 0; q < sites.size(); ++q) EXPECT_NEAR(partial[q], full(0, sites[q]), 1e-12);
}

TEST(OdInner, SelfAndDisjointComponents) {
    const Grid g = Grid::make(1, 10.0, 256);
    const Field u = random_band_limited(g, 2, 20, 4);
    EXPECT_EQ(testsupport::max_abs_diff(od_inner(u, u), fg_modulus_sq(u)), 0.0);

    const double xi = mode_frequency(g, 3);
    const Field a = sample_function(g, 2, [&](const Point& x) { return std::vector<double>{1.0 + std::cos(xi * x[0]), 0.0}; });
    const Field b = sample_function(g, 2, [&](const Point& x) { return std::vector<double>{0.0, 2.0 + std::sin(xi * x[0])}; });
    EXPECT_EQ(od_inner(a, b).sup_norm(), 0.0);
    EXPECT_THROW(od_inner(a, Field(g, 1)), ShapeError);
}

TEST(OdInner, IntegratesToDirichletForm) {
    const Grid g = Grid::make(1, 64.0, 2048);
    // Modes high enough that the dropped offsets beyond L/2 cost < 1%.
    auto make = [&](unsigned seed) {
        Field f = random_band_limited(g, 2, 120, seed);
        return poisson_semigroup(f, 0.0);
    };
    Field u = make(1), v = make(2);
    // Remove low modes so that L|xi| is large for every active mode.
    auto highpass = [&](Field f) {
        SpectralField s = dft(f);
        const auto& xi = abs_wavenumbers(g);
        for (int c = 0; c < s.components(); ++c)
            for (std::size_t k = 0; k < s.modes(); ++k)
                if (xi[k] < 64.0 * kPi / g.length()) s(c, k) = 0.0;
        return idft(s);
    };
    u = highpass(u);
    v = highpass(v);
    const double lhs = integrate(od_inner(u, v));
    const double rhs = dirichlet_form(u, v);
    EXPECT_NEAR(lhs, rhs, 0.01 * std::abs(rhs));
    EXPECT_NEAR(integrate(fg_modulus_sq(u)), 2.0 * energy_half(u), 0.01 * 2.0 * energy_half(u));
}

TEST(OdInner, CauchySchwarz) {
    const Grid g = Grid::make(2, 6.0, 32);
    const Field u = random_band_limited(g, 2, 5, 21);
    const Field v = random_band_limited(g, 2, 5, 22);
    const Annulus a{0.3, 2.5};
    const Field uv = od_inner(u, v, a), uu = fg_modulus_sq(u, a), vv = fg_modulus_sq(v, a);
    for (std::size_t s = 0; s < g.sites(); ++s) EXPECT_LE(uv(0, s) * uv(0, s), uu(0, s) * vv(0, s) + 1e-12);
}

TEST(AnnulusSplit, Additivity) {
    const Grid g1 = Grid::make(1, 10.0, 512);
    const Grid g2 = Grid::make(2, 6.0, 32);
    EXPECT_LE(annulus_split_check(random_band_limited(g1, 2, 30, 5), 0.0, 1.0, 5.0), 1e-12);
    EXPECT_LE(annulus_split_check(random_band_limited(g2, 2, 6, 6), 0.2, 1.1, 3.0), 1e-12);
    const Field c = sample_function(g1, 1, [](const Point&) { return std::vector<double>{2.0}; });
    EXPECT_EQ(annulus_split_check(c, 0.0, 1.0, 5.0), 0.0);
    EXPECT_THROW(annulus_split_check(c, 1.0, 0.5, 2.0), DomainError);
}

TEST(FgGradModulus, WaveAndSuperposition) {
    const Grid g = Grid::make(1, 64.0, 4096);
    const Field c = sample_function(g, 1, [](const Point&) { return std::vector<double>{1.0}; });
    EXPECT_LT(fg_grad_modulus_sq(c).sup_norm(), 1e-12);

    const int k = 40;
    const double xi = mode_frequency(g, k);
    const Field d = fg_grad_modulus_sq(sphere_wave(g, k));
    for (std::size_t s = 0; s < g.sites(); s += 41) EXPECT_NEAR(d(0, s), xi * xi * xi, 0.01 * xi * xi * xi);

    // Scalar waves in disjoint components: the moduli add exactly.
    const int k2 = 160;
    const double xi2 = mode_frequency(g, k2);
    const Field a = sample_function(g, 2, [&](const Point& x) { return std::vector<double>{std::cos(xi * x[0]), 0.0}; });
    const Field b = sample_function(g, 2, [&](const Point& x) { return std::vector<double>{0.0, std::cos(xi2 * x[0])}; });
    const Field sum = fg_grad_modulus_sq(a + b);
    const Field sa = fg_grad_modulus_sq(a), sb = fg_grad_modulus_sq(b);
    for (std::size_t s = 0; s < g.sites(); s += 41) EXPECT_NEAR(sum(0, s), sa(0, s) + sb(0, s), 0.02 * (sa(0, s) + sb(0, s)));
}

TEST(FgModulus, HalfGradientScaling) {
    const Grid g = Grid::make(1, 16.0, 512);
    const Grid gs = Grid::make(1, 8.0, 512);
    const Field u = random_band_limited(g, 2, 20, 8);
    const Field us(gs, 2, u.values());
    const Field a = fg_modulus_sq(u), b = fg_modulus_sq(us);
    for (std::size_t s = 0; s < g.sites(); ++s) EXPECT_NEAR(b(0, s), 2.0 * a(0, s), 0.01 * 2.0 * a(0, s) + 1e-14);
}

TEST(FgModulus, ConvolutionDomination) {
    const Grid g = Grid::make(1, 16.0, 512);
    for (unsigned seed : {31u, 32u, 33u}) {
        const Field u = random_band_limited(g, 2, 30, seed);
        // Periodized Gaussian: positive, unit mass.
        auto mollify = [](const Field& f) {
            return apply_radial_multiplier(f, [](double xi) { return std::exp(-0.5 * 0.09 * xi * xi); });
        };
        Field root = fg_modulus_sq(u);
        for (double& v : root.component(0)) v = std::sqrt(v);
        const Field rhs = mollify(root);
        const Field lhs = fg_modulus_sq(mollify(u));
        const double slack = 1e-3 * rhs.sup_norm();
        for (std::size_t s = 0; s < g.sites(); ++s) EXPECT_LE(std::sqrt(lhs(0, s)), rhs(0, s) + slack);
    }
}

TEST(FgModulus, PoissonLocalGrowthEstimate) {
    const Grid g = Grid::make(1, 200.0, 4096);
    const Field local = fg_modulus_sq(poisson_field(g), {0.0, 1.0});
    double fitted = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < g.sites(); ++s) {
        const double x = g.site_point(s)[0];
        if (std::abs(x) > 50.0) continue;
        fitted = std::max(fitted, local(0, s) * (1.0 + x * x));
    }
    EXPECT_TRUE(std::isfinite(fitted));
    EXPECT_LT(fitted, 0.05);
    // Envelope decays for x >= 1.
    for (double x = 1.0; x <= 50.0; x += 1.0) {
        const std::size_t s = g.site(static_cast<int>(std::lround((x + 100.0) / g.spacing())));
        EXPECT_LE(local(0, s), previous);
        previous = local(0, s);
    }
}

TEST(EnergyDensity, SpectralMatchesQuadrature) {
    const Grid g = Grid::make(1, 32.0, 1024);
    const Field u = sphere_wave(g, 3);
    const Field q = fg_modulus_sq(u);
    const Field s = energy_density_spectral(u);
    const double bound = truncation_bias_bound(u);
    for (std::size_t i = 0; i < g.sites(); ++i) {
        EXPECT_NEAR(s(0, i), mode_frequency(g, 3), 1e-10);
        EXPECT_GE(s(0, i) - q(0, i), -1e-3);
        EXPECT_LE(s(0, i) - q(0, i), bound + 1e-3);
    }
    const Field r = random_band_limited(g, 2, 20, 12);
    const Field qr = fg_modulus_sq(r), sr = energy_density_spectral(r);
    const double br = truncation_bias_bound(r);
    for (std::size_t i = 0; i < g.sites(); ++i) EXPECT_LE(std::abs(sr(0, i) - qr(0, i)), br + 1e-3);
}
