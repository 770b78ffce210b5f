#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "halfflow/experiments.hpp"
#include "halfflow/solver.hpp"

namespace halfflow {

enum class Command { Validate, Norms, Solve, Expander, Sweep };

std::string to_string(Command command);
/// Throws ConfigError on unknown names.
Command parse_command(std::string_view name);

/**
 * Flat run configuration. Keys and defaults:
 *
 *   command = validate            validate | norms | solve | expander | sweep
 *   n = 1, L = 32, N = 512, m = 2 grid and target dimension
 *   data = constant               data kind; data.mode = 1, data.amplitude = 1,
 *                                 data.angle = 0.3, data.a0 / data.a1 / data.value (lists),
 *                                 data.kappa = 0.2, data.phase_amplitude = 0.1, data.width = 1;
 *                                 data = random-phase uses data.kmin = 1, data.kmax = 8,
 *                                 data.amplitude (phase scale) and seed
 *   solver.T = 1, solver.M = 48, solver.grading = 1.15, solver.max_iter = 40,
 *   solver.tol = 1e-8, solver.use_cutoff = true, solver.eps_check = 0.5,
 *   solver.check_smallness = true, solver.zero_forcing = false,
 *   solver.density = spectral     spectral | quadrature
 *   solver.cross_check = false    also run step_solve and report the difference
 *   sampling.x_stride = 4, sampling.per_octave = 4, sampling.T_top = L/4
 *   norms.T                       decay-profile horizons in [16 dx, L/8];
 *                                 default the three largest sampled radii
 *   expander.center               default L/4 for jump-1d, else the origin
 *   expander.radius = 2
 *   sweep.key, sweep.values       parameter grid; sweep.command = solve
 *   out = halfflow_out, seed = 1, threads = 0 (0 = library default)
 */
struct RunConfig {
    Command command = Command::Validate;
    int n = 1;
    double L = 32.0;
    int N = 512;
    int m = 2;
    DataSpec data;
    bool random_phase = false;
    int kmin = 1;
    int kmax = 8;
    SolverConfig solver;
    bool cross_check = false;
    int x_stride = 4;
    int per_octave = 4;
    std::optional<double> T_top;
    std::vector<double> norm_T;
    std::vector<double> expander_center;
    double expander_radius = 2.0;
    std::string sweep_key;
    std::vector<std::string> sweep_values;
    Command sweep_command = Command::Solve;
    std::filesystem::path out = "halfflow_out";
    unsigned seed = 1;
    int threads = 0;
    /// Key/value pairs as given, in file order.
    std::vector<std::pair<std::string, std::string>> entries;

    Grid grid() const { return Grid::make(n, L, N); }
};

/**
 * Parse `key = value` lines with `#` comments. Errors (ConfigError) name the
 * line: unknown keys, duplicates (both lines), type and range errors.
 */
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNonconvergence = 1;
inline constexpr int kExitConfig = 2;

/**
 * Execute the command, writing <out>/manifest.json and JSON reports, frame CSVs
 * and table CSVs under reports/, frames/ and tables/. Errors are written to reports/error.json and mapped to exit
 * codes (1 nonconvergence or failed validation, 2 configuration).
 */
int run(const RunConfig& config);

/// Apply the thread count: explicit > HALFFLOW_THREADS > config.threads.
int resolve_threads(const RunConfig& config, std::optional<int> explicit_threads);

/// Write {"status": "error", "kind", "message", "history"} to `path`.
void write_error_record(const std::filesystem::path& path, const std::string& kind, const std::string& message,
                        const std::vector<double>& history = {});

}  // namespace halfflow
