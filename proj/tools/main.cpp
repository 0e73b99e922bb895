#include "bregopt/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

// plain-text config: one `key = value` per line, '#' starts a comment
std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = value;
    }
    return kv;
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
    std::string cleaned = text;
    for (auto& c : cleaned)
        if (c == ',') c = ' ';
    std::istringstream in(cleaned);
    std::vector<T> out;
    T v;
    while (in >> v) out.push_back(v);
    return out;
}

int do_run(bregopt::ExperimentConfig& config, const std::vector<double>& h_values,
           const std::vector<long long>& node_counts, const std::string& formats) {
    using namespace bregopt;
    auto spec = catalog<double>(config.example);
    for (long long n : node_counts) config.resolutions.push_back(static_cast<Index>(n));
    for (double h : h_values) {
        config.resolutions.push_back(nodes_for_h(h, spec.domain_lower, spec.domain_upper));
        config.h_values.push_back(h);
    }
    config.write_csv = formats.find("csv") != std::string::npos;
    config.write_markdown = formats.find("md") != std::string::npos;

    for (Index n : config.resolutions) {
        const Index dof = spec.dimension == 1 ? n : n * n;
        if (dof > 250'000)
            std::cerr << "note: " << dof
                      << " DOF exceeds the desk-scale default; expect a long run\n";
    }

    auto artifacts = cmd_run(config);
    for (const auto& p : artifacts.csv_paths) std::cout << "wrote " << p << '\n';
    if (!artifacts.markdown_path.empty()) std::cout << "wrote " << artifacts.markdown_path << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bregman iteration rate experiments for bang-bang optimal control"};
    app.require_subcommand(1);

    bregopt::ExperimentConfig config;
    std::vector<double> h_values;
    std::vector<long long> node_counts;
    std::string formats = "csv,md";
    std::string config_path;

    auto* run = app.add_subcommand("run", "run an example and emit rate tables");
    run->set_help_flag("--help", "print help");  // frees -h for the mesh-size flag
    run->add_option("--config", config_path, "plain-text config file with key = value lines");
    run->add_option("--example", config.example, "catalog example name");
    run->add_option("--h", h_values, "mesh size(s); converted to node counts");
    run->add_option("--nodes", node_counts, "node count(s) per axis");
    run->add_option("--alpha", config.alpha, "constant regularization parameter")
        ->capture_default_str();
    run->add_option("--iters", config.iterations, "iteration count K")->capture_default_str();
    run->add_option("--out", config.output_dir, "output directory")->capture_default_str();
    run->add_option("--format", formats, "comma list of csv,md")->capture_default_str();
    run->add_option("--tol", config.settings.fixed_point_tol, "subproblem sup-norm tolerance")
        ->capture_default_str();
    run->add_option("--max-newton", config.settings.max_newton_steps,
                    "active-set steps per subproblem")
        ->capture_default_str();
    run->add_option("--cg-tol", config.settings.cg_rel_tol, "inner CG relative tolerance")
        ->capture_default_str();

    auto* check = app.add_subcommand("check", "run the invariant suite");
    auto* list = app.add_subcommand("list", "list the example catalog");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (!config_path.empty()) {
                // config supplies values only where no flag was given
                auto kv = parse_config_file(config_path);
                auto use = [&](const char* flag, const char* key) {
                    return kv.count(key) > 0 && run->count(flag) == 0;
                };
                if (use("--example", "example")) config.example = kv["example"];
                if (use("--h", "h")) h_values = parse_list<double>(kv["h"]);
                if (use("--nodes", "nodes")) node_counts = parse_list<long long>(kv["nodes"]);
                if (use("--alpha", "alpha")) config.alpha = std::stod(kv["alpha"]);
                if (use("--iters", "iters")) config.iterations = std::stoll(kv["iters"]);
                if (use("--out", "out")) config.output_dir = kv["out"];
                if (use("--format", "format")) formats = kv["format"];
                if (use("--tol", "tol")) config.settings.fixed_point_tol = std::stod(kv["tol"]);
                if (use("--max-newton", "max-newton"))
                    config.settings.max_newton_steps = std::stoi(kv["max-newton"]);
                if (use("--cg-tol", "cg-tol")) config.settings.cg_rel_tol = std::stod(kv["cg-tol"]);
            }
            if (config.example.empty()) {
                std::cerr << "error: --example is required (flag or config file)\n";
                return 2;
            }
            if (h_values.empty() && node_counts.empty()) {
                std::cerr << "error: need --h or --nodes (flag or config file)\n";
                return 2;
            }
            return do_run(config, h_values, node_counts, formats);
        }
        if (check->parsed()) {
            auto results = bregopt::cmd_check();
            std::cout << bregopt::checks::format_results(results);
            const bool ok = bregopt::checks::all_passed(results);
            std::cout << (ok ? "all checks passed\n" : "CHECK FAILURES\n");
            return ok ? 0 : 2;
        }
        if (list->parsed()) {
            std::cout << bregopt::cmd_list();
            return 0;
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    }
    return 0;
}
