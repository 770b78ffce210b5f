#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "halfflow/grid.hpp"

namespace halfflow {

enum class DataKind { Constant, SphereWave, Jump1D, Homogeneous2D, PerturbedConstant };

/// "constant", "sphere-wave", "jump-1d", "homogeneous-2d", "perturbed-constant".
std::string to_string(DataKind kind);
/// Throws ConfigError on unknown names.
DataKind parse_data_kind(std::string_view name);

struct DataSpec {
    DataKind kind = DataKind::Constant;
    int m = 2;
    /// constant: the value (default e1).
    std::vector<double> value;
    /// sphere-wave: a = amplitude (cos xi x, sin xi x, 0, ...), xi = 2 pi mode / L.
    int mode = 1;
    double amplitude = 1.0;
    /// jump-1d: a0 inside (-L/4, L/4), a1 outside; default a0 = e1, a1 = (cos angle, sin angle).
    double angle = 0.3;
    std::vector<double> a0, a1;
    /// homogeneous-2d: (cos(kappa sin alpha), sin(kappa sin alpha)), alpha the polar angle.
    double kappa = 0.2;
    /// perturbed-constant: e1 rotated by phase phase_amplitude * exp(-|x|^2 / (2 width^2)).
    double phase_amplitude = 0.1;
    double width = 1.0;
};

/**
 * Sample the data on the grid. Sphere kinds have |a| = 1 at every site; the two
 * jump sites of jump-1d carry the normalized midpoint of a0 and a1. Throws
 * ConfigError on kind/dimension/component mismatches.
 */
Field make_data(const DataSpec& spec, const Grid& grid);

/// Jump-1d end states (a0, a1) for a spec.
std::pair<std::vector<double>, std::vector<double>> jump_states(const DataSpec& spec);

/// Poisson extension of a single jump from a0 (x < 0) to a1 (x > 0) on R. Throws DomainError for t <= 0.
std::vector<double> jump_extension_oracle(double x, double t, std::span<const double> a0, std::span<const double> a1);

/**
 * Poisson extension of periodic jump-1d data on the torus of length L:
 * (a0 + a1)/2 + (a0 - a1)/2 * (2/pi) atan(cos(w x) / sinh(w t)), w = 2 pi / L.
 */
std::vector<double> two_jump_oracle(double x, double t, double L, std::span<const double> a0,
                                    std::span<const double> a1);

/// Sites within `radius` of `center`, frames with t in [t_min, t_max].
struct SimilarityWindow {
    Point center{0.0, 0.0};
    double radius = 1.0;
    double t_min = 0.0;
    double t_max = std::numeric_limits<double>::infinity();
};

/// Window whose t_min = 4 dx keeps the profile resolved by the grid.
SimilarityWindow resolved_window(const Grid& grid, const Point& center, double radius);

/**
 * max over lambda, node pairs (t, lambda t) inside [t_min, t_max] and sites x with
 * |x - c| <= radius of |u(c + lambda (x - c), lambda t) - u(x, t)|, the first value
 * by interpolation. Throws InterfaceError when no pair exists.
 */
double self_similarity_defect(const SpaceTimeField& U, const std::vector<double>& lambdas,
                              const SimilarityWindow& window);

struct ExpanderReport {
    Field profile;  ///< U = u(., t*)
    double t_star;
    double defect;  ///< sup over later frames and window sites of |u(x, t) - U(c + (x - c) t*/t)|
    SimilarityWindow window;
    std::size_t frames_compared;
};

/// t* defaults to the median node within [t_min, t_max].
ExpanderReport expander_profile(const SpaceTimeField& U, const SimilarityWindow& window,
                                std::optional<double> t_star = std::nullopt);

struct EmbeddingRow {
    std::string name;
    double besov, q0, bmo, a_inf;
};

struct EmbeddingStudy {
    std::vector<EmbeddingRow> rows;
    double bmo_constant;       ///< fitted max bmo / q0 over rows with q0 > 0
    double a_over_q0_max;      ///< max a_inf / q0 over rows with q0 > 0
    bool a_below_q0;           ///< a_inf <= 1.1 q0 on every row
};

using NamedField = std::pair<std::string, Field>;

/// besov, q0, bmo and A_infinity per member (default sampling per grid).
EmbeddingStudy embedding_study(const std::vector<NamedField>& family);

/// One row per member: name, besov, q0, bmo, a_inf.
void write_embedding_csv(const EmbeddingStudy& study, const std::filesystem::path& path);

/// e1 rotated by a random phase sum_k (b_k cos + c_k sin)(2 pi k x0 / L), k in [kmin, kmax], b, c ~ N(0, scale^2 / k^2).
Field random_phase_field(const Grid& grid, int kmin, int kmax, unsigned seed, double scale = 1.0);

/**
 * Constants, sphere waves, jumps, perturbed constants and random band-limited
 * fields on 1D grids plus homogeneous maps on a 2D grid (>= 12 members).
 */
std::vector<NamedField> default_data_family();

}  // namespace halfflow
