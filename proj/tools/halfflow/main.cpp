#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "halfflow/cli.hpp"
#include "halfflow/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"halfflow: half-harmonic map heat flow lab"};
    app.require_subcommand(1, 1);
    std::string config_path;
    std::string out;
    int threads = 0;
    for (const char* name : {"validate", "norms", "solve", "expander", "sweep"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key = value config file")->required();
        sub->add_option("--out", out, "output directory (overrides the out key)");
        sub->add_option("--threads", threads, "thread count (overrides HALFFLOW_THREADS)")->check(CLI::NonNegativeNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return halfflow::kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    halfflow::RunConfig config;
    try {
        config = halfflow::load_config(config_path);
        if (!out.empty()) config.out = out;
        if (halfflow::parse_command(command) != config.command) {
            // The subcommand wins; re-parse so command-specific checks apply.
            std::string text;
            for (const auto& [k, v] : config.entries)
                if (k != "command") text += k + " = " + v + "\n";
            text += "command = " + command + "\n";
            const auto dir = config.out;
            config = halfflow::parse_config(text);
            config.out = dir;
        }
    } catch (const halfflow::ConfigError& e) {
        std::cerr << "halfflow: " << e.what() << '\n';
        const std::filesystem::path dir = out.empty() ? std::filesystem::path("halfflow_out") : std::filesystem::path(out);
        try {
            halfflow::write_error_record(dir / "reports" / "error.json", "config", e.what());
        } catch (const std::exception&) {
        }
        return halfflow::kExitConfig;
    }
    halfflow::resolve_threads(config, threads > 0 ? std::optional<int>(threads) : std::nullopt);
    const int code = halfflow::run(config);
    if (code != halfflow::kExitOk) std::cerr << "halfflow: " << command << " exited with " << code << " (see "
                                             << (config.out / "reports" / "error.json").string() << ")\n";
    return code;
}
