#include "halfflow/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "halfflow/errors.hpp"
#include "halfflow/io.hpp"
#include "halfflow/norms.hpp"
#include "halfflow/validation.hpp"

namespace halfflow {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(value);
    while (std::getline(is, item, ',')) out.push_back(trim(item));
    if (out.empty()) out.push_back({});
    return out;
}

[[noreturn]] void fail(int line, const std::string& key, const std::string& what) {
    std::ostringstream os;
    os << "line " << line << ": " << key << ": " << what;
    throw ConfigError(os.str());
}

double to_double(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos == v.size() && std::isfinite(x)) return x;
    } catch (const std::exception&) {
    }
    fail(line, key, "expected a finite number, got '" + v + "'");
}

int to_int(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos == v.size() && x >= -(1L << 30) && x <= (1L << 30)) return static_cast<int>(x);
    } catch (const std::exception&) {
    }
    fail(line, key, "expected an integer, got '" + v + "'");
}

bool to_bool(const std::string& v, int line, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(line, key, "expected true or false, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& v, int line, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(to_double(item, line, key));
    return out;
}

double positive(double x, int line, const std::string& key) {
    if (!(x > 0.0)) fail(line, key, "must be positive");
    return x;
}

int at_least(int x, int lo, int line, const std::string& key) {
    if (x < lo) fail(line, key, "must be >= " + std::to_string(lo));
    return x;
}

using Setter = std::function<void(RunConfig&, const std::string&, int, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        t["command"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            try {
                c.command = parse_command(v);
            } catch (const ConfigError& e) {
                fail(line, k, e.what());
            }
        };
        t["n"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.n = to_int(v, line, k);
            if (c.n != 1 && c.n != 2) fail(line, k, "dimension must be 1 or 2");
        };
        t["L"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.L = positive(to_double(v, line, k), line, k);
        };
        t["N"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.N = to_int(v, line, k);
            if (c.N < 16 || (c.N & (c.N - 1)) != 0) fail(line, k, "N=" + v + " must be a power of two >= 16");
        };
        t["m"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.m = at_least(to_int(v, line, k), 2, line, k);
            c.data.m = c.m;
        };
        t["data"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            if (v == "random-phase") {
                c.random_phase = true;
                return;
            }
            c.random_phase = false;
            try {
                c.data.kind = parse_data_kind(v);
            } catch (const ConfigError& e) {
                fail(line, k, e.what());
            }
        };
        t["data.mode"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.data.mode = at_least(to_int(v, line, k), 1, line, k);
        };
        t["data.amplitude"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.data.amplitude = to_double(v, line, k);
        };
        t["data.angle"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.data.angle = to_double(v, line, k);
        };
        t["data.value"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.data.value = to_doubles(v, line, k);
        };
        t["data.a0"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.data.a0 = to_doubles(v, line, k);
        };
        t["data.a1"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.data.a1 = to_doubles(v, line, k);
        };
        t["data.kappa"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.data.kappa = to_double(v, line, k);
        };
        t["data.phase_amplitude"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.data.phase_amplitude = to_double(v, line, k);
        };
        t["data.width"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.data.width = positive(to_double(v, line, k), line, k);
        };
        t["data.kmin"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.kmin = at_least(to_int(v, line, k), 1, line, k);
        };
        t["data.kmax"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.kmax = at_least(to_int(v, line, k), 1, line, k);
        };
        t["solver.T"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.solver.T = positive(to_double(v, line, k), line, k);
        };
        t["solver.M"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.solver.M = at_least(to_int(v, line, k), 16, line, k);
        };
        t["solver.grading"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.solver.grading = to_double(v, line, k);
            if (!(c.solver.grading > 1.0)) fail(line, k, "must exceed 1");
        };
        t["solver.max_iter"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.solver.max_iter = at_least(to_int(v, line, k), 1, line, k);
        };
        t["solver.tol"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.solver.tol = positive(to_double(v, line, k), line, k);
        };
        t["solver.use_cutoff"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.solver.use_cutoff = to_bool(v, line, k);
        };
        t["solver.eps_check"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.solver.eps_check = positive(to_double(v, line, k), line, k);
        };
        t["solver.check_smallness"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.solver.check_smallness = to_bool(v, line, k);
        };
        t["solver.zero_forcing"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.solver.zero_forcing = to_bool(v, line, k);
        };
        t["solver.density"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            if (v == "spectral")
                c.solver.density = DensityMethod::Spectral;
            else if (v == "quadrature")
                c.solver.density = DensityMethod::Quadrature;
            else
                fail(line, k, "expected spectral or quadrature, got '" + v + "'");
        };
        t["solver.cross_check"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.cross_check = to_bool(v, line, k);
        };
        t["sampling.x_stride"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.x_stride = at_least(to_int(v, line, k), 1, line, k);
        };
        t["sampling.per_octave"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.per_octave = at_least(to_int(v, line, k), 1, line, k);
        };
        t["sampling.T_top"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.T_top = positive(to_double(v, line, k), line, k);
        };
        t["norms.T"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.norm_T = to_doubles(v, line, k);
            for (double T : c.norm_T) positive(T, line, k);
        };
        t["expander.center"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.expander_center = to_doubles(v, line, k);
            if (c.expander_center.size() > 2) fail(line, k, "at most 2 coordinates");
        };
        t["expander.radius"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.expander_radius = positive(to_double(v, line, k), line, k);
        };
        t["sweep.key"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.sweep_key = v;
            if (v.rfind("sweep.", 0) == 0 || v == "command" || v == "out")
                fail(line, k, "cannot sweep '" + v + "'");
        };
        t["sweep.values"] = [](RunConfig& c, const std::string& v, int, const std::string&) {
            c.sweep_values = split_list(v);
        };
        t["sweep.command"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            try {
                c.sweep_command = parse_command(v);
            } catch (const ConfigError& e) {
                fail(line, k, e.what());
            }
            if (c.sweep_command == Command::Sweep) fail(line, k, "sweeps cannot nest");
        };
        t["out"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            if (v.empty()) fail(line, k, "empty path");
            c.out = v;
        };
        t["seed"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.seed = static_cast<unsigned>(at_least(to_int(v, line, k), 0, line, k));
        };
        t["threads"] = [](RunConfig& c, const std::string& v, int line, const std::string& k) {
            c.threads = at_least(to_int(v, line, k), 0, line, k);
        };
        return t;
    }();
    return table;
}

/// Text of `entries` with `key` set to `value`, for sweep points.
std::string sweep_point_text(const RunConfig& c, const std::string& value, const fs::path& out) {
    std::ostringstream os;
    bool replaced = false;
    for (const auto& [k, v] : c.entries) {
        if (k.rfind("sweep.", 0) == 0 || k == "command" || k == "out") continue;
        if (k == c.sweep_key) {
            os << k << " = " << value << '\n';
            replaced = true;
        } else {
            os << k << " = " << v << '\n';
        }
    }
    if (!replaced) os << c.sweep_key << " = " << value << '\n';
    os << "command = " << to_string(c.sweep_command) << '\n';
    os << "out = " << out.string() << '\n';
    return os.str();
}

fs::path sweep_point_dir(const fs::path& out, std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof name, "point_%03zu", i);
    return out / name;
}

void write_json(const fs::path& path, const json& j) {
    fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

json seminorm_json(const SeminormReport& r) { return json::parse(to_json(r)); }

json config_json(const RunConfig& c) {
    json j;
    j["command"] = to_string(c.command);
    j["n"] = c.n;
    j["L"] = c.L;
    j["N"] = c.N;
    j["m"] = c.m;
    j["data"] = c.random_phase ? std::string("random-phase") : to_string(c.data.kind);
    j["seed"] = c.seed;
    j["solver"] = {{"T", c.solver.T},
                   {"M", c.solver.M},
                   {"grading", c.solver.grading},
                   {"max_iter", c.solver.max_iter},
                   {"use_cutoff", c.solver.use_cutoff},
                   {"zero_forcing", c.solver.zero_forcing},
                   {"cross_check", c.cross_check}};
    j["sampling"] = {{"x_stride", c.x_stride}, {"per_octave", c.per_octave}};
    if (c.T_top) j["sampling"]["T_top"] = *c.T_top;
    return j;
}

Field initial_data(const RunConfig& c, const Grid& g) {
    if (c.random_phase) {
        if (c.m != 2) throw ConfigError("random-phase data requires m = 2");
        return random_phase_field(g, c.kmin, c.kmax, c.seed, c.data.amplitude);
    }
    DataSpec spec = c.data;
    spec.m = c.m;
    return make_data(spec, g);
}

Point expander_center(const RunConfig& c) {
    if (!c.expander_center.empty()) {
        Point p{0.0, 0.0};
        for (std::size_t i = 0; i < c.expander_center.size(); ++i) p[i] = c.expander_center[i];
        return p;
    }
    if (!c.random_phase && c.data.kind == DataKind::Jump1D) return {0.25 * c.L, 0.0};
    return {0.0, 0.0};
}

/// Scale for relative expander defects: jump chord, kappa, or 1.
double data_scale(const RunConfig& c) {
    if (c.random_phase) return 1.0;
    if (c.data.kind == DataKind::Jump1D) {
        DataSpec spec = c.data;
        spec.m = c.m;
        const auto [a0, a1] = jump_states(spec);
        double s = 0.0;
        for (std::size_t i = 0; i < a0.size(); ++i) s += (a0[i] - a1[i]) * (a0[i] - a1[i]);
        return std::sqrt(s);
    }
    if (c.data.kind == DataKind::Homogeneous2D) return std::abs(c.data.kappa);
    return 1.0;
}

int run_validate(const RunConfig& c, json& summary) {
    const auto report = run_validation();
    write_json(c.out / "reports" / "validation.json", json::parse(to_json(report)));
    {
        fs::create_directories(c.out / "tables");
        std::ofstream os(c.out / "tables" / "constants.csv");
        os << "name,constant,median,log_slope,bounded\n";
        for (const auto& k : report.constants)
            os << k.name << ',' << format_double(k.constant) << ',' << format_double(k.median) << ','
               << format_double(k.log_slope) << ',' << (k.bounded ? 1 : 0) << '\n';
    }
    std::size_t passed = 0;
    for (const auto& ch : report.checks) passed += ch.passed ? 1 : 0;
    summary["checks"] = report.checks.size();
    summary["passed"] = passed;
    summary["all_passed"] = report.all_passed;
    return report.all_passed ? kExitOk : kExitNonconvergence;
}

int run_norms(const RunConfig& c, json& summary) {
    const Grid g = c.grid();
    const Field a = initial_data(c, g);
    const auto sampling = SupSampling::make(g, c.T_top, c.x_stride, c.per_octave);
    std::vector<double> Ts = c.norm_T;
    if (Ts.empty()) {
        // Up to three largest sampled radii <= L/8.
        std::vector<double> r = sampling.r_set;
        std::sort(r.begin(), r.end(), std::greater<>());
        for (double x : r)
            if (x <= c.L / 8.0 * (1.0 + 1e-12) && Ts.size() < 3) Ts.push_back(x);
    }
    const double r_min = *std::min_element(sampling.r_set.begin(), sampling.r_set.end());
    for (double T : Ts)
        if (T > c.L / 8.0 * (1.0 + 1e-12) || T < r_min)
            throw ConfigError("norms.T: horizons must lie in [" + format_double(r_min) + ", L/8]");

    json j;
    j["carleson_A"] = json::array();
    for (double T : Ts) {
        auto r = seminorm_json(carleson_A_seminorm(a, T, sampling));
        json e;
        e["T"] = T;
        e["report"] = r;
        j["carleson_A"].push_back(e);
    }
    j["carleson_A_inf"] = seminorm_json(carleson_A_seminorm(a, std::numeric_limits<double>::infinity(), sampling));
    j["q0"] = seminorm_json(q0_seminorm(a, sampling));
    j["bmo"] = seminorm_json(bmo_seminorm(a, sampling));
    j["besov"] = seminorm_json(besov_seminorm(a));
    const auto tail = tail_carleson_oracle(a);
    j["tail_oracle"] = {{"lhs", tail.lhs}, {"rhs", tail.rhs}, {"relative_defect", tail.relative_defect}};
    write_json(c.out / "reports" / "norms.json", j);

    const auto decay = decay_profile(a, Ts, sampling);
    std::vector<std::vector<double>> rows;
    for (const auto& r : decay) rows.push_back({r.T, r.value});
    fs::create_directories(c.out / "tables");
    write_table_csv(c.out / "tables" / "decay.csv", {"T", "carleson_A"}, rows);
    fs::create_directories(c.out / "frames");
    write_field_csv(c.out / "frames" / "initial.csv", a);

    summary["carleson_A_inf"] = j["carleson_A_inf"]["value"];
    summary["q0"] = j["q0"]["value"];
    return kExitOk;
}

/// Solve, write the bundle and residuals; returns the bundle.
SolutionBundle solve_and_report(const RunConfig& c, json& summary) {
    const Grid g = c.grid();
    const Field a = initial_data(c, g);
    SolutionBundle bundle = picard_solve(a, c.solver);
    write_bundle(bundle, c.out);

    json j;
    j["converged"] = bundle.converged;
    j["iterations"] = bundle.history.size();
    const double a_sup = a.sup_norm();
    j["initial_sup"] = a_sup;
    j["mild_residual"] = mild_residual(bundle, c.solver);
    j["weak_residual"] = weak_residual(bundle, c.solver, default_weak_battery(a.components()));
    j["weak_tests"] = default_weak_battery(a.components()).size();
    j["constraint_residual"] = constraint_residual(bundle, c.solver);
    j["max_sphere_deviation"] = *std::max_element(bundle.sphere_deviation.begin(), bundle.sphere_deviation.end());
    if (c.cross_check) {
        const SolutionBundle step = step_solve(a, c.solver);
        double diff = 0.0;
        for (std::size_t k = 0; k < bundle.u.frames.size(); ++k)
            diff = std::max(diff, sup_distance(bundle.u.frames[k], step.u.frames[k]));
        j["cross_check"] = {{"method", "step"}, {"sup_difference", diff}, {"tolerance", 5.0 * c.solver.tol}};
    }
    write_json(c.out / "reports" / "solve.json", j);

    fs::create_directories(c.out / "tables");
    std::vector<std::vector<double>> rows;
    const auto& t = bundle.u.mesh.nodes();
    for (std::size_t k = 0; k < t.size(); ++k)
        rows.push_back({t[k], bundle.sphere_deviation[k], bundle.energy[k], bundle.x0_sup[k], bundle.head_share[k]});
    write_table_csv(c.out / "tables" / "series.csv",
                    {"t", "sphere_deviation", "energy", "x0_sup", "head_share"}, rows);
    rows.clear();
    for (std::size_t i = 0; i < bundle.history.size(); ++i)
        rows.push_back({static_cast<double>(i + 1), bundle.history[i]});
    write_table_csv(c.out / "tables" / "history.csv", {"iteration", "difference"}, rows);

    summary["iterations"] = bundle.history.size();
    summary["max_sphere_deviation"] = j["max_sphere_deviation"];
    summary["weak_residual"] = j["weak_residual"];
    if (c.cross_check) summary["cross_check"] = j["cross_check"]["sup_difference"];
    return bundle;
}

int run_solve(const RunConfig& c, json& summary) {
    solve_and_report(c, summary);
    return kExitOk;
}

int run_expander(const RunConfig& c, json& summary) {
    const SolutionBundle bundle = solve_and_report(c, summary);
    const Point center = expander_center(c);
    const auto window = resolved_window(bundle.u.grid(), center, c.expander_radius);
    const auto report = expander_profile(bundle.u, window);
    const double rho = c.solver.grading;
    const double self_sim = self_similarity_defect(bundle.u, {rho * rho, std::pow(rho, 4)}, window);
    const double scale = data_scale(c);

    json j;
    j["center"] = {center[0], center[1]};
    j["radius"] = c.expander_radius;
    j["t_min"] = window.t_min;
    j["t_star"] = report.t_star;
    j["frames_compared"] = report.frames_compared;
    j["expander_defect"] = report.defect;
    j["self_similarity_defect"] = self_sim;
    j["lambdas"] = {rho * rho, std::pow(rho, 4)};
    j["data_scale"] = scale;
    j["relative_expander_defect"] = report.defect / scale;
    j["relative_self_similarity_defect"] = self_sim / scale;
    write_json(c.out / "reports" / "expander.json", j);
    write_field_csv(c.out / "frames" / "profile.csv", report.profile);

    summary["relative_expander_defect"] = j["relative_expander_defect"];
    summary["relative_self_similarity_defect"] = j["relative_self_similarity_defect"];
    return kExitOk;
}

void write_manifest(const RunConfig& c, int code, double seconds, const json& summary) {
    json j;
    j["tool"] = "halfflow";
    j["version"] = "0.1.0";
    j["command"] = to_string(c.command);
    j["exit_code"] = code;
    json echo = json::array();
    for (const auto& [k, v] : c.entries) echo.push_back({k, v});
    j["config_echo"] = echo;
    j["config"] = config_json(c);
    j["tolerances"] = {{"solver.tol", c.solver.tol},
                       {"solver.eps_check", c.solver.eps_check},
                       {"cross_check", 5.0 * c.solver.tol},
                       {"weak_residual_scale", "L^n sup|a|"}};
    j["summary"] = summary;
    j["timing"] = {{"seconds", seconds}};
    write_json(c.out / "manifest.json", j);
}

int execute(const RunConfig& c, json& summary);

int run_sweep(const RunConfig& c, json& summary) {
    if (c.sweep_key.empty() || c.sweep_values.empty())
        throw ConfigError("sweep requires sweep.key and sweep.values");
    fs::create_directories(c.out / "tables");
    std::ostringstream table;
    table << "point,key,value,exit_code\n";
    int worst = kExitOk;
    json points = json::array();
    for (std::size_t i = 0; i < c.sweep_values.size(); ++i) {
        const fs::path dir = sweep_point_dir(c.out, i);
        const RunConfig point = parse_config(sweep_point_text(c, c.sweep_values[i], dir));
        const int code = run(point);
        worst = std::max(worst, code);
        table << i << ',' << c.sweep_key << ',' << c.sweep_values[i] << ',' << code << '\n';
        points.push_back({{"value", c.sweep_values[i]}, {"dir", dir.filename().string()}, {"exit_code", code}});
    }
    std::ofstream(c.out / "tables" / "sweep.csv") << table.str();
    summary["points"] = points;
    return worst;
}

int execute(const RunConfig& c, json& summary) {
    switch (c.command) {
        case Command::Validate: return run_validate(c, summary);
        case Command::Norms: return run_norms(c, summary);
        case Command::Solve: return run_solve(c, summary);
        case Command::Expander: return run_expander(c, summary);
        case Command::Sweep: return run_sweep(c, summary);
    }
    return kExitConfig;
}

}  // namespace

std::string to_string(Command command) {
    switch (command) {
        case Command::Validate: return "validate";
        case Command::Norms: return "norms";
        case Command::Solve: return "solve";
        case Command::Expander: return "expander";
        case Command::Sweep: return "sweep";
    }
    return "unknown";
}

Command parse_command(std::string_view name) {
    for (Command c : {Command::Validate, Command::Norms, Command::Solve, Command::Expander, Command::Sweep})
        if (to_string(c) == name) return c;
    throw ConfigError("unknown command '" + std::string(name) +
                      "' (expected validate, norms, solve, expander or sweep)");
}

RunConfig parse_config(std::string_view text) {
    RunConfig c;
    std::map<std::string, int> seen;
    std::istringstream is{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "line " << line << ": expected 'key = value', got '" << s << "'";
            throw ConfigError(os.str());
        }
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) {
            std::ostringstream os;
            os << "line " << line << ": missing key";
            throw ConfigError(os.str());
        }
        const auto it = setters().find(key);
        if (it == setters().end()) fail(line, key, "unknown key '" + key + "'");
        if (const auto prev = seen.find(key); prev != seen.end()) {
            std::ostringstream os;
            os << "duplicate key '" << key << "' on lines " << prev->second << " and " << line;
            throw ConfigError(os.str());
        }
        seen[key] = line;
        if (value.empty()) fail(line, key, "missing value");
        it->second(c, value, line, key);
        c.entries.emplace_back(key, value);
    }

    // Cross-key checks.
    c.data.m = c.m;
    c.grid();
    c.solver.validate();
    if (c.kmax < c.kmin) throw ConfigError("data.kmax must be >= data.kmin");
    if (!c.random_phase && c.data.kind == DataKind::Homogeneous2D && c.n != 2)
        throw ConfigError("data: homogeneous-2d requires n = 2");
    if (!c.random_phase && c.data.kind == DataKind::Jump1D && c.n != 1)
        throw ConfigError("data: jump-1d requires n = 1");
    if (c.command == Command::Sweep) {
        if (c.sweep_key.empty()) throw ConfigError("sweep.key is required for command = sweep");
        if (c.sweep_values.empty()) throw ConfigError("sweep.values is required for command = sweep");
        if (!setters().count(c.sweep_key)) throw ConfigError("sweep.key: unknown key '" + c.sweep_key + "'");
        for (std::size_t i = 0; i < c.sweep_values.size(); ++i) {
            try {
                parse_config(sweep_point_text(c, c.sweep_values[i], sweep_point_dir(c.out, i)));
            } catch (const ConfigError& e) {
                throw ConfigError("sweep value '" + c.sweep_values[i] + "': " + e.what());
            }
        }
    }
    return c;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return parse_config(os.str());
}

int resolve_threads(const RunConfig& config, std::optional<int> explicit_threads) {
    int k = config.threads;
    if (const char* env = std::getenv("HALFFLOW_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end == '\0' && v > 0) k = static_cast<int>(v);
    }
    if (explicit_threads && *explicit_threads > 0) k = *explicit_threads;
#ifdef _OPENMP
    if (k > 0) omp_set_num_threads(k);
    return k > 0 ? k : omp_get_max_threads();
#else
    return 1;
#endif
}

void write_error_record(const fs::path& path, const std::string& kind, const std::string& message,
                        const std::vector<double>& history) {
    json j;
    j["status"] = "error";
    j["kind"] = kind;
    j["message"] = message;
    j["history"] = history;
    write_json(path, j);
}

int run(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    json summary = json::object();
    int code = kExitOk;
    const fs::path error_path = config.out / "reports" / "error.json";
    try {
        fs::create_directories(config.out);
        fs::remove(error_path);
        code = execute(config, summary);
    } catch (const NonconvergenceError& e) {
        write_error_record(error_path, "nonconvergence", e.what(), e.history());
        code = kExitNonconvergence;
    } catch (const ConfigError& e) {
        write_error_record(error_path, "config", e.what());
        code = kExitConfig;
    } catch (const std::exception& e) {
        write_error_record(error_path, "error", e.what());
        code = kExitNonconvergence;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(config, code, seconds, summary);
    return code;
}

}  // namespace halfflow
