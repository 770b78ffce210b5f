#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "halfflow/errors.hpp"
#include "halfflow/experiments.hpp"
#include "halfflow/solver.hpp"
#include "halfflow/spectral.hpp"

using namespace halfflow;

namespace {

double max_sphere_deviation(const Field& a) {
    double worst = 0.0;
    for (std::size_t s = 0; s < a.sites(); ++s) worst = std::max(worst, std::abs(a.magnitude_at(s) - 1.0));
    return worst;
}

// u(x, t) = F(x / t) with F(y) = (cos atan y, sin atan y).
SpaceTimeField synthetic_expander(const Grid& g, const TimeMesh& mesh) {
    std::vector<Field> frames;
    for (double t : mesh.nodes()) {
        frames.push_back(sample_function(g, 2, [t](const Point& x) {
            const double th = std::atan(x[0] / t);
            return std::vector<double>{std::cos(th), std::sin(th)};
        }));
    }
    return {mesh, frames};
}

}  // namespace

TEST(DataKind, NamesRoundTrip) {
    for (DataKind k : {DataKind::Constant, DataKind::SphereWave, DataKind::Jump1D, DataKind::Homogeneous2D,
                       DataKind::PerturbedConstant}) {
        EXPECT_EQ(parse_data_kind(to_string(k)), k);
    }
    EXPECT_THROW(parse_data_kind("spiral"), ConfigError);
}

TEST(MakeData, ConstantAndDegenerateCases) {
    const Grid g = Grid::make(1, 16.0, 128);
    DataSpec s;
    s.value = {0.6, 0.8};
    const Field c = make_data(s, g);
    for (std::size_t i = 0; i < c.sites(); ++i) {
        EXPECT_EQ(c(0, i), 0.6);
        EXPECT_EQ(c(1, i), 0.8);
    }
    s.kind = DataKind::Jump1D;
    s.a0 = {0.0, 1.0};
    s.a1 = {0.0, 1.0};
    const Field j = make_data(s, g);
    for (std::size_t i = 0; i < j.sites(); ++i) EXPECT_EQ(j(1, i), 1.0);

    const Grid g2 = Grid::make(2, 8.0, 32);
    DataSpec h;
    h.kind = DataKind::Homogeneous2D;
    h.kappa = 0.0;
    const Field hz = make_data(h, g2);
    for (std::size_t i = 0; i < hz.sites(); ++i) {
        EXPECT_EQ(hz(0, i), 1.0);
        EXPECT_EQ(hz(1, i), 0.0);
    }
}

TEST(MakeData, SphereKindsAreUnitValued) {
    const Grid g = Grid::make(1, 16.0, 256);
    for (DataKind k : {DataKind::SphereWave, DataKind::Jump1D, DataKind::PerturbedConstant}) {
        DataSpec s;
        s.kind = k;
        EXPECT_LE(max_sphere_deviation(make_data(s, g)), 1e-14) << to_string(k);
    }
    DataSpec h;
    h.kind = DataKind::Homogeneous2D;
    h.kappa = 0.7;
    EXPECT_LE(max_sphere_deviation(make_data(h, Grid::make(2, 8.0, 32))), 1e-14);
}

TEST(MakeData, JumpPositionsAtQuarterLength) {
    const Grid g = Grid::make(1, 16.0, 64);
    DataSpec s;
    s.kind = DataKind::Jump1D;
    s.angle = 1.0;
    const Field a = make_data(s, g);
    const auto [a0, a1] = jump_states(s);
    for (std::size_t i = 0; i < a.sites(); ++i) {
        const double x = g.site_point(i)[0];
        const auto v = a.value_at(i);
        if (std::abs(std::abs(x) - 4.0) < 1e-12) {
            EXPECT_NEAR(v[1] / v[0], std::tan(0.5), 1e-12);  // normalized midpoint
        } else if (std::abs(x) < 4.0) {
            EXPECT_EQ(v, a0);
        } else {
            EXPECT_EQ(v, a1);
        }
    }
}

TEST(MakeData, MismatchesAreConfigErrors) {
    DataSpec s;
    s.kind = DataKind::Jump1D;
    EXPECT_THROW(make_data(s, Grid::make(2, 8.0, 16)), ConfigError);
    s.kind = DataKind::Homogeneous2D;
    EXPECT_THROW(make_data(s, Grid::make(1, 8.0, 16)), ConfigError);
    s.kind = DataKind::SphereWave;
    s.m = 1;
    EXPECT_THROW(make_data(s, Grid::make(1, 8.0, 16)), ConfigError);
    DataSpec c;
    c.value = {1.0, 0.0, 0.0};
    EXPECT_THROW(make_data(c, Grid::make(1, 8.0, 16)), ConfigError);
}

TEST(MakeData, HomogeneousReflectionSymmetry) {
    // x1 -> -x1 flips sin(alpha), i.e. conjugates the map; exact away from the seam row x1 = -L/2.
    const Grid g = Grid::make(2, 8.0, 32);
    DataSpec h;
    h.kind = DataKind::Homogeneous2D;
    h.kappa = 0.4;
    const Field a = make_data(h, g);
    for (int i = 0; i < 32; ++i) {
        for (int j = 1; j < 32; ++j) {
            const std::size_t s = g.site(i, j), r = g.site(i, 32 - j);
            EXPECT_NEAR(a(0, s), a(0, r), 1e-12);
            EXPECT_NEAR(a(1, s), -a(1, r), 1e-12);
        }
    }
}

TEST(Oracles, SingleJumpClosedForm) {
    const std::vector<double> a0{1.0, 0.0}, a1{0.0, 1.0};
    EXPECT_EQ(jump_extension_oracle(0.0, 0.5, a0, a1), (std::vector<double>{0.5, 0.5}));
    const auto far = jump_extension_oracle(1e12, 1.0, a0, a1);
    EXPECT_NEAR(far[0], 0.0, 1e-9);
    EXPECT_NEAR(far[1], 1.0, 1e-9);
    const auto diag = jump_extension_oracle(0.3, 0.3, a0, a1);
    EXPECT_NEAR(diag[0], 0.5 - 0.25, 1e-15);
    EXPECT_NEAR(diag[1], 0.5 + 0.25, 1e-15);
    EXPECT_THROW(jump_extension_oracle(0.0, 0.0, a0, a1), DomainError);
}

TEST(Oracles, TwoJumpSemigroupMatchesPeriodicClosedForm) {
    const double L = 32.0;
    const Grid g = Grid::make(1, L, 8192);
    DataSpec s;
    s.kind = DataKind::Jump1D;
    s.angle = 1.0;
    const Field a = make_data(s, g);
    const auto [a0, a1] = jump_states(s);
    // The unit (not arithmetic) midpoint at the jump sites costs O(dx / t), so t stays >= 64 dx.
    for (double t : {0.25, 0.5, L / 20.0}) {
        const Field u = poisson_semigroup(a, t);
        double worst = 0.0;
        for (std::size_t i = 0; i < u.sites(); ++i) {
            const auto v = two_jump_oracle(g.site_point(i)[0], t, L, a0, a1);
            for (int c = 0; c < 2; ++c) worst = std::max(worst, std::abs(u(c, i) - v[c]));
        }
        EXPECT_LE(worst, 1e-3) << "t = " << t;
    }
}

TEST(Oracles, LocalJumpProfileNearJump) {
    // Near x = L/4 the periodic profile is the single-jump arctan up to O(t/L) image corrections.
    const double L = 64.0;
    const std::vector<double> a0{1.0, 0.0}, a1{0.0, 1.0};
    for (double t : {0.01, 0.1}) {
        for (double y : {-0.5, -0.05, 0.0, 0.2, 1.0}) {
            const auto p = two_jump_oracle(L / 4 + y, t, L, a0, a1);
            const auto q = jump_extension_oracle(y, t, a0, a1);
            EXPECT_NEAR(p[0], q[0], 0.2 * (t + std::abs(y)) / L * 4.0);
        }
    }
}

TEST(SelfSimilarity, SyntheticExpanderHasSmallDefect) {
    const Grid g = Grid::make(1, 32.0, 2048);
    const TimeMesh mesh = TimeMesh::geometric(1.0, 32, 1.15);
    const SpaceTimeField U = synthetic_expander(g, mesh);
    const SimilarityWindow w = resolved_window(g, {0.0, 0.0}, 2.0);
    const double rho = mesh.ratio();
    EXPECT_LE(self_similarity_defect(U, {rho * rho, std::pow(rho, 4)}, w), 1e-3);
    const ExpanderReport e = expander_profile(U, w);
    EXPECT_LE(e.defect, 1e-3);
    EXPECT_GE(e.t_star, w.t_min);
    EXPECT_GT(e.frames_compared, 0u);
    EXPECT_THROW(self_similarity_defect(U, {1.5}, w), InterfaceError);
}

TEST(SelfSimilarity, ConstantProfileHasZeroDefect) {
    const Grid g = Grid::make(2, 8.0, 64);
    DataSpec h;
    h.kind = DataKind::Homogeneous2D;
    h.kappa = 0.0;
    SolverConfig cfg;
    const SolutionBundle b = picard_solve(make_data(h, g), cfg);
    const ExpanderReport e = expander_profile(b.u, resolved_window(g, {0.0, 0.0}, 1.0));
    EXPECT_LE(e.defect, 1e-14);
}

TEST(SelfSimilarity, SmallJumpSolveVersusSmoothControl) {
    const double L = 32.0;
    const Grid g = Grid::make(1, L, 1024);
    SolverConfig cfg;
    const double rho = cfg.grading;
    const std::vector<double> lambdas{rho * rho, std::pow(rho, 4)};
    const SimilarityWindow w = resolved_window(g, {L / 4, 0.0}, 2.0);

    DataSpec s;
    s.kind = DataKind::Jump1D;
    s.angle = 0.3;
    const SolutionBundle jump = picard_solve(make_data(s, g), cfg);
    const double magnitude = 2.0 * std::sin(0.15);
    const double d = self_similarity_defect(jump.u, lambdas, w);
    EXPECT_LE(d, 0.05 * magnitude);

    // Refinement does not make the defect worse (beyond 1e-3).
    const Grid g2 = Grid::make(1, L, 2048);
    const SolutionBundle fine = picard_solve(make_data(s, g2), cfg);
    EXPECT_LE(self_similarity_defect(fine.u, lambdas, resolved_window(g2, {L / 4, 0.0}, 2.0)), d + 1e-3);

    DataSpec wave;
    wave.kind = DataKind::SphereWave;
    wave.mode = 4;
    const SolutionBundle smooth = picard_solve(make_data(wave, g), cfg);
    EXPECT_GE(self_similarity_defect(smooth.u, lambdas, w), 0.3);
}

TEST(Embedding, FamilyOrderingsAndCsv) {
    std::vector<NamedField> family;
    const Grid g = Grid::make(1, 64.0, 1024);
    DataSpec s;
    family.emplace_back("constant", make_data(s, g));
    s.kind = DataKind::Jump1D;
    for (double th : {0.2, 0.4}) {
        s.angle = th;
        family.emplace_back("jump", make_data(s, g));
    }
    const EmbeddingStudy st = embedding_study(family);
    ASSERT_EQ(st.rows.size(), 3u);
    EXPECT_EQ(st.rows[0].q0, 0.0);
    EXPECT_EQ(st.rows[0].a_inf, 0.0);
    EXPECT_EQ(st.rows[0].bmo, 0.0);
    EXPECT_LE(st.rows[0].besov, 1e-12);
    EXPECT_TRUE(st.a_below_q0);
    EXPECT_GT(st.bmo_constant, 0.0);
    // Seminorms of jump data scale with the chord 2 sin(theta / 2).
    const double chord = std::sin(0.2) / std::sin(0.1);
    EXPECT_NEAR(st.rows[2].q0 / st.rows[1].q0, chord, 0.03 * chord);
    EXPECT_NEAR(st.rows[2].a_inf / st.rows[1].a_inf, chord, 0.03 * chord);
    EXPECT_NEAR(st.rows[2].bmo / st.rows[1].bmo, chord, 0.03 * chord);

    const auto path = std::filesystem::temp_directory_path() / "halfflow_embedding.csv";
    write_embedding_csv(st, path);
    std::ifstream is(path);
    std::string header;
    std::getline(is, header);
    EXPECT_EQ(header, "name,besov,q0,bmo,a_inf");
    std::filesystem::remove(path);
}

TEST(Embedding, DefaultFamilySize) { EXPECT_GE(default_data_family().size(), 12u); }
