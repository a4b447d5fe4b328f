// Batch driver: run catalog scenarios, list the catalog, classify a parameter point.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O failure.

#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "optodimer/optodimer.hpp"

namespace {

using namespace optodimer;

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;
constexpr int exit_io = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// "fig4" expands to fig4a..fig4f, "all" to the whole catalog.
std::vector<std::string> expand_scenarios(const std::string& id) {
    if (id == "all") return catalog::ids();
    if (id == "custom" || is_catalog_id(id)) return {id};
    std::vector<std::string> out;
    for (const auto& c : catalog::ids())
        if (c.rfind(id, 0) == 0) out.push_back(c);
    if (out.empty()) throw ConfigError("unknown scenario id '" + id + "'");
    return out;
}

struct RunOptions {
    std::string scenario;
    std::string config_path;
    std::string out_dir;
    std::string engines;
    double rtol = 0.0;
    double atol = 0.0;
    std::string truncation;
    bool svg = false;
};

ScenarioConfig build_config(const RunOptions& o, const std::string& id, const std::string& config_text) {
    ScenarioConfig c = parse_config(config_text, id);
    if (!o.out_dir.empty()) c.out_dir = o.out_dir;
    if (!o.engines.empty()) c.engines = parse_engines(o.engines);
    if (o.rtol > 0.0) c.rtol = o.rtol;
    if (o.atol > 0.0) c.atol = o.atol;
    if (!o.truncation.empty()) {
        if (o.truncation == "auto") {
            c.truncation.reset();
        } else {
            try {
                c.truncation = std::stoi(o.truncation);
            } catch (const std::exception&) {
                throw ConfigError("--truncation expects an integer or 'auto'");
            }
        }
    }
    if (o.svg) c.svg = true;
    validate(c);
    return c;
}

int classify_exit(const std::exception_ptr& ep, std::string& message) {
    try {
        std::rethrow_exception(ep);
    } catch (const ConfigError& e) {
        message = e.what();
        return exit_config;
    } catch (const IoError& e) {
        message = e.what();
        return exit_io;
    } catch (const std::exception& e) {
        message = e.what();
        return exit_numerical;
    }
}

int run_command(const RunOptions& o) {
    std::vector<ScenarioConfig> configs;
    try {
        const std::string text = o.config_path.empty() ? std::string() : read_file(o.config_path);
        for (const auto& id : expand_scenarios(o.scenario)) configs.push_back(build_config(o, id, text));
    } catch (...) {
        std::string msg;
        const int code = classify_exit(std::current_exception(), msg);
        std::cerr << "error: " << msg << '\n';
        return code;
    }

    // Scenarios run concurrently in batches of hardware_concurrency().
    const size_t workers = std::max<size_t>(1, std::thread::hardware_concurrency());
    int worst = 0;
    for (size_t start = 0; start < configs.size(); start += workers) {
        std::vector<std::future<std::pair<int, std::string>>> jobs;
        for (size_t i = start; i < std::min(configs.size(), start + workers); ++i) {
            jobs.push_back(std::async(std::launch::async, [&cfg = configs[i]]() -> std::pair<int, std::string> {
                try {
                    const auto res = run_scenario(cfg);
                    std::ostringstream os;
                    os << cfg.id << ": " << to_string(res.regime.tag);
                    for (const auto& f : res.files) os << "\n  wrote " << f.string();
                    return {0, os.str()};
                } catch (...) {
                    std::string msg;
                    const int code = classify_exit(std::current_exception(), msg);
                    return {code, cfg.id + ": error: " + msg};
                }
            }));
        }
        for (auto& j : jobs) {
            const auto [code, text] = j.get();
            (code == 0 ? std::cout : std::cerr) << text << '\n';
            worst = std::max(worst, code);
        }
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lossy optomechanical dimer: Lindblad, non-Hermitian and Gaussian moment dynamics"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "Run a scenario (fig1a..fig6c, a prefix such as fig4, all, or custom)");
    run->add_option("--scenario", run_opts.scenario, "Scenario id")->required();
    run->add_option("--config", run_opts.config_path, "Config file (key = value with [section] headers)");
    run->add_option("--out", run_opts.out_dir, "Output directory");
    run->add_option("--engines", run_opts.engines, "Comma-separated subset of lindblad,nonhermitian,gaussian");
    run->add_option("--rtol", run_opts.rtol, "Relative integration tolerance");
    run->add_option("--atol", run_opts.atol, "Absolute integration tolerance");
    run->add_option("--truncation", run_opts.truncation, "Per-mode Fock dimension, or auto");
    run->add_flag("--svg", run_opts.svg, "Also write an SVG overlay plot");

    auto* list = app.add_subcommand("list-scenarios", "List the scenario catalog");

    double g = 0.0, gamma_a = 0.0, gamma_b = 0.0, omega_b = SystemParams{}.omega_b, tol = default_classify_tol;
    auto* cls = app.add_subcommand("classify", "Classify the PT regime of a parameter point");
    cls->add_option("--g", g, "Enhanced coupling (rad/s)")->required();
    cls->add_option("--gamma-a", gamma_a, "Optical decay rate (rad/s)")->required();
    cls->add_option("--gamma-b", gamma_b, "Mechanical decay rate (rad/s)")->required();
    cls->add_option("--omega-b", omega_b, "Mechanical frequency (rad/s), for ratios");
    cls->add_option("--tol", tol, "Relative classification tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    if (*run) return run_command(run_opts);
    if (*list) {
        for (const auto& id : catalog::ids()) {
            const auto c = catalog_scenario(id);
            std::string engines;
            for (Engine e : c.engines) engines += (engines.empty() ? "" : ",") + to_string(e);
            std::cout << id << "  " << c.title << "  [" << engines << "]\n";
        }
        return 0;
    }
    if (*cls) {
        try {
            std::cout << format_classify(classify(g, gamma_a, gamma_b, omega_b, tol));
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return exit_config;
        }
        return 0;
    }
    return 0;
}
