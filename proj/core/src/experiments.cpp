#include "halfflow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "halfflow/errors.hpp"
#include "halfflow/io.hpp"
#include "halfflow/norms.hpp"

namespace halfflow {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> unit(int m, int axis = 0) {
    std::vector<double> e(m, 0.0);
    e[axis] = 1.0;
    return e;
}

std::vector<double> planar(int m, double angle) {
    std::vector<double> v(m, 0.0);
    v[0] = std::cos(angle);
    v[1] = std::sin(angle);
    return v;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

std::string to_string(DataKind kind) {
    switch (kind) {
        case DataKind::Constant: return "constant";
        case DataKind::SphereWave: return "sphere-wave";
        case DataKind::Jump1D: return "jump-1d";
        case DataKind::Homogeneous2D: return "homogeneous-2d";
        case DataKind::PerturbedConstant: return "perturbed-constant";
    }
    return "unknown";
}

DataKind parse_data_kind(std::string_view name) {
    for (DataKind k : {DataKind::Constant, DataKind::SphereWave, DataKind::Jump1D, DataKind::Homogeneous2D,
                       DataKind::PerturbedConstant}) {
        if (name == to_string(k)) return k;
    }
    throw ConfigError("unknown data kind '" + std::string(name) + "'");
}

std::pair<std::vector<double>, std::vector<double>> jump_states(const DataSpec& spec) {
    require(spec.m >= 2, "jump-1d needs m >= 2");
    std::vector<double> a0 = spec.a0.empty() ? unit(spec.m) : spec.a0;
    std::vector<double> a1 = spec.a1.empty() ? planar(spec.m, spec.angle) : spec.a1;
    require(static_cast<int>(a0.size()) == spec.m && static_cast<int>(a1.size()) == spec.m,
            "jump-1d states must have m components");
    return {a0, a1};
}

Field make_data(const DataSpec& spec, const Grid& grid) {
    require(spec.m >= 1, "m must be >= 1");
    const int m = spec.m;
    switch (spec.kind) {
        case DataKind::Constant: {
            const std::vector<double> v = spec.value.empty() ? unit(m) : spec.value;
            require(static_cast<int>(v.size()) == m, "constant value must have m components");
            return Field::constant(grid, v);
        }
        case DataKind::SphereWave: {
            require(m >= 2, "sphere-wave needs m >= 2");
            const double xi = 2.0 * kPi * spec.mode / grid.length();
            const double A = spec.amplitude;
            return sample_function(grid, m, [&](const Point& x) {
                std::vector<double> v = planar(m, xi * x[0]);
                for (double& c : v) c *= A;
                return v;
            });
        }
        case DataKind::Jump1D: {
            require(grid.dim() == 1, "jump-1d needs n = 1");
            const auto [a0, a1] = jump_states(spec);
            std::vector<double> mid(m);
            double norm = 0.0;
            for (int c = 0; c < m; ++c) {
                mid[c] = a0[c] + a1[c];
                norm += mid[c] * mid[c];
            }
            norm = std::sqrt(norm);
            if (norm > 0.0) {
                for (double& c : mid) c /= norm;
            } else {
                mid = a0;
            }
            const double q = 0.25 * grid.length();
            const double eps = 1e-9 * grid.spacing();
            return sample_function(grid, m, [&](const Point& x) {
                const double d = std::abs(std::abs(x[0]) - q);
                if (d < eps) return mid;
                return std::abs(x[0]) < q ? a0 : a1;
            });
        }
        case DataKind::Homogeneous2D: {
            require(grid.dim() == 2, "homogeneous-2d needs n = 2");
            require(m >= 2, "homogeneous-2d needs m >= 2");
            const double kappa = spec.kappa;
            return sample_function(grid, m, [&](const Point& x) {
                const double r = std::hypot(x[0], x[1]);
                // The origin takes the limit along +e1 (alpha = 0).
                const double s = r == 0.0 ? 0.0 : x[1] / r;
                return planar(m, kappa * s);
            });
        }
        case DataKind::PerturbedConstant: {
            require(m >= 2, "perturbed-constant needs m >= 2");
            require(spec.width > 0.0, "perturbed-constant width must be positive");
            const double A = spec.phase_amplitude;
            const double w2 = spec.width * spec.width;
            return sample_function(grid, m, [&](const Point& x) {
                const double r2 = x[0] * x[0] + (grid.dim() == 2 ? x[1] * x[1] : 0.0);
                return planar(m, A * std::exp(-0.5 * r2 / w2));
            });
        }
    }
    throw ConfigError("unknown data kind");
}

std::vector<double> jump_extension_oracle(double x, double t, std::span<const double> a0,
                                          std::span<const double> a1) {
    if (!(t > 0.0)) throw DomainError("jump_extension_oracle: t must be positive");
    if (a0.size() != a1.size()) throw ShapeError("jump_extension_oracle: state sizes differ");
    const double w = (2.0 / kPi) * std::atan(x / t);
    std::vector<double> v(a0.size());
    for (std::size_t c = 0; c < v.size(); ++c) v[c] = 0.5 * (a0[c] + a1[c]) + 0.5 * (a1[c] - a0[c]) * w;
    return v;
}

std::vector<double> two_jump_oracle(double x, double t, double L, std::span<const double> a0,
                                    std::span<const double> a1) {
    if (!(t > 0.0)) throw DomainError("two_jump_oracle: t must be positive");
    if (a0.size() != a1.size()) throw ShapeError("two_jump_oracle: state sizes differ");
    const double w = 2.0 * kPi / L;
    const double s = (2.0 / kPi) * std::atan(std::cos(w * x) / std::sinh(w * t));
    std::vector<double> v(a0.size());
    for (std::size_t c = 0; c < v.size(); ++c) v[c] = 0.5 * (a0[c] + a1[c]) + 0.5 * (a0[c] - a1[c]) * s;
    return v;
}

SimilarityWindow resolved_window(const Grid& grid, const Point& center, double radius) {
    SimilarityWindow w;
    w.center = center;
    w.radius = radius;
    w.t_min = 4.0 * grid.spacing();
    return w;
}

namespace {

double vector_distance(const std::vector<double>& a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
    return std::sqrt(s);
}

std::vector<double> value_at(const Field& f, std::size_t site) { return f.value_at(site); }

Point along(const Point& c, const Point& d, double s) { return {c[0] + s * d[0], c[1] + s * d[1]}; }

}  // namespace

double self_similarity_defect(const SpaceTimeField& U, const std::vector<double>& lambdas,
                              const SimilarityWindow& window) {
    const Grid& g = U.grid();
    const auto sites = window_sites(g, window.center, window.radius + 1e-12);
    const TimeMesh& mesh = U.mesh;
    double worst = 0.0;
    std::size_t pairs = 0;
    for (double lambda : lambdas) {
        for (std::size_t j = 0; j < mesh.size(); ++j) {
            const double t = mesh[j];
            if (t < window.t_min || t > window.t_max) continue;
            const auto k = mesh.find(lambda * t, 1e-6);
            if (!k || mesh[*k] > window.t_max) continue;
            ++pairs;
            for (std::size_t s : sites) {
                const Point d = g.periodic_delta(window.center, g.site_point(s));
                const auto scaled = interpolate(U.frames[*k], along(window.center, d, lambda));
                worst = std::max(worst, vector_distance(scaled, value_at(U.frames[j], s)));
            }
        }
    }
    if (pairs == 0) throw InterfaceError("self_similarity_defect: no (t, lambda t) node pairs in the window");
    return worst;
}

ExpanderReport expander_profile(const SpaceTimeField& U, const SimilarityWindow& window,
                                std::optional<double> t_star) {
    const TimeMesh& mesh = U.mesh;
    std::vector<std::size_t> inside;
    for (std::size_t j = 0; j < mesh.size(); ++j) {
        if (mesh[j] >= window.t_min && mesh[j] <= window.t_max) inside.push_back(j);
    }
    if (inside.size() < 2) throw InterfaceError("expander_profile: fewer than two frames in the window");
    std::size_t ref = inside[inside.size() / 2];
    if (t_star) {
        const auto k = mesh.find(*t_star);
        if (!k) throw InterfaceError("expander_profile: t* is not a mesh node");
        ref = *k;
    }
    const Grid& g = U.grid();
    const double ts = mesh[ref];
    const auto sites = window_sites(g, window.center, window.radius + 1e-12);
    double worst = 0.0;
    std::size_t compared = 0;
    for (std::size_t j = ref + 1; j < mesh.size(); ++j) {
        if (mesh[j] > window.t_max) break;
        ++compared;
        const double shrink = ts / mesh[j];
        for (std::size_t s : sites) {
            const Point d = g.periodic_delta(window.center, g.site_point(s));
            const auto profile = interpolate(U.frames[ref], along(window.center, d, shrink));
            worst = std::max(worst, vector_distance(profile, value_at(U.frames[j], s)));
        }
    }
    if (compared == 0) throw InterfaceError("expander_profile: no frames after t*");
    return {U.frames[ref], ts, worst, window, compared};
}

EmbeddingStudy embedding_study(const std::vector<NamedField>& family) {
    EmbeddingStudy study{{}, 0.0, 0.0, true};
    for (const auto& [name, a] : family) {
        const SupSampling smp = SupSampling::make(a.grid());
        EmbeddingRow row{name, besov_seminorm(a).value, q0_seminorm(a, smp).value, bmo_seminorm(a, smp).value,
                         carleson_A_seminorm(a, std::numeric_limits<double>::infinity(), smp).value};
        if (row.q0 > 0.0) {
            study.bmo_constant = std::max(study.bmo_constant, row.bmo / row.q0);
            study.a_over_q0_max = std::max(study.a_over_q0_max, row.a_inf / row.q0);
        }
        if (row.a_inf > 1.1 * row.q0 + 1e-12) study.a_below_q0 = false;
        study.rows.push_back(std::move(row));
    }
    return study;
}

void write_embedding_csv(const EmbeddingStudy& study, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    os << "name,besov,q0,bmo,a_inf\n";
    for (const auto& r : study.rows) {
        os << r.name << ',' << format_double(r.besov) << ',' << format_double(r.q0) << ',' << format_double(r.bmo)
           << ',' << format_double(r.a_inf) << '\n';
    }
}

Field random_phase_field(const Grid& g, int kmin, int kmax, unsigned seed, double scale) {
    if (kmin < 1 || kmax < kmin) throw ConfigError("random_phase_field: need 1 <= kmin <= kmax");
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::array<double, 3>> terms;
    for (int k = kmin; k <= kmax; ++k) {
        const double b = scale * normal(rng) / k;
        const double c = scale * normal(rng) / k;
        terms.push_back({static_cast<double>(k), b, c});
    }
    const double w = 2.0 * kPi / g.length();
    return sample_function(g, 2, [&](const Point& x) {
        double phase = 0.0;
        for (const auto& t : terms) phase += t[1] * std::cos(t[0] * w * x[0]) + t[2] * std::sin(t[0] * w * x[0]);
        return planar(2, phase);
    });
}

std::vector<NamedField> default_data_family() {
    const Grid g1 = Grid::make(1, 64.0, 1024);
    const Grid g2 = Grid::make(2, 16.0, 64);
    std::vector<NamedField> out;
    DataSpec s;
    out.emplace_back("constant", make_data(s, g1));
    s.kind = DataKind::SphereWave;
    for (int mode : {4, 8, 16}) {
        s.mode = mode;
        out.emplace_back("sphere-wave-" + std::to_string(mode), make_data(s, g1));
    }
    s.kind = DataKind::Jump1D;
    for (double angle : {0.3, 1.0, 3.0}) {
        s.angle = angle;
        out.emplace_back("jump-" + format_double(angle), make_data(s, g1));
    }
    s.kind = DataKind::PerturbedConstant;
    for (double amp : {0.1, 0.5}) {
        s.phase_amplitude = amp;
        out.emplace_back("perturbed-" + format_double(amp), make_data(s, g1));
    }
    for (unsigned seed : {1u, 2u}) {
        out.emplace_back("random-band-" + std::to_string(seed), random_phase_field(g1, 1, 12, seed));
    }
    s.kind = DataKind::Homogeneous2D;
    for (double kappa : {0.2, 1.0}) {
        s.kappa = kappa;
        out.emplace_back("homogeneous-2d-" + format_double(kappa), make_data(s, g2));
    }
    return out;
}

}  // namespace halfflow
