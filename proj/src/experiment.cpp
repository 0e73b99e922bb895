#include "bregopt/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace bregopt {

void ExperimentConfig::validate() const {
    if (example.empty()) throw std::invalid_argument("config: example name is required");
    if (resolutions.empty()) throw std::invalid_argument("config: at least one resolution");
    for (Index n : resolutions)
        if (n < 3) throw std::invalid_argument("config: resolutions must be >= 3 nodes");
    if (iterations < 4) throw std::invalid_argument("config: need K >= 4 (first kappa_k is k=4)");
    if (!(alpha > 0)) throw std::invalid_argument("config: alpha must be positive");
    settings.validate();
}

Index nodes_for_h(double h, double a, double b) {
    if (!(h > 0)) throw std::invalid_argument("h must be positive");
    const double n = (b - a) / h + 1.0;
    const Index rounded = static_cast<Index>(std::llround(n));
    if (rounded < 3) throw std::invalid_argument("h too coarse for the domain");
    return rounded;
}

RateReport<double> run_example(const std::string& example, Index nodes, double alpha,
                               Index iterations, const SolverSettings<double>& settings,
                               const std::string& grid_label, CsvWriter* csv) {
    auto spec = catalog<double>(example);
    Grid<double> grid(spec.dimension, spec.domain_lower, spec.domain_upper, nodes);
    auto problem = build_bangbang(spec, BoxBounds<double>(-1.0, 1.0), grid);

    RateReport<double> report;
    report.grid_label = grid_label.empty() ? "n=" + std::to_string(nodes) : grid_label;
    report.error_sq.resize(static_cast<std::size_t>(iterations) + 1);
    report.residual.resize(static_cast<std::size_t>(iterations) + 1);
    report.newton_steps.assign(static_cast<std::size_t>(iterations) + 1, 0);

    GridFunction<double> u0 = project_box(GridFunction<double>::zero(grid), problem.bounds);
    GridFunction<double> e0(grid, u0.values() - problem.exact_control.values());
    GridFunction<double> r0(grid, problem.op.forward(u0).values() - problem.target.values());
    report.error_sq[0] = inner_l2(e0, e0);
    report.residual[0] = 0.5 * inner_l2(r0, r0);

    run_bregman(problem, AlphaSchedule<double>::constant(alpha), iterations, settings,
                [&](const IterationState<double>& s) {
                    const auto k = static_cast<std::size_t>(s.k);
                    report.error_sq[k] = *s.error_sq;
                    report.residual[k] = s.residual;
                    report.newton_steps[k] = s.newton_steps;
                    if (csv) {
                        std::optional<double> kap;
                        if (s.k % 2 == 0) kap = kappa_numeric(report.error_sq, s.k);
                        csv->row(s.k, s.residual, *s.error_sq, kap);
                    }
                });
    return report;
}

RunArtifacts cmd_run(const ExperimentConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.output_dir);

    RunArtifacts artifacts;
    for (std::size_t i = 0; i < config.resolutions.size(); ++i) {
        const Index n = config.resolutions[i];
        std::string label = "n=" + std::to_string(n);
        if (i < config.h_values.size()) {
            std::ostringstream os;
            os << "h=" << config.h_values[i];
            label = os.str();
        }
        std::optional<CsvWriter> csv;
        if (config.write_csv) {
            auto path = config.output_dir + "/" + config.example + "_n" + std::to_string(n) + ".csv";
            csv.emplace(path);
            artifacts.csv_paths.push_back(path);
        }
        artifacts.reports.push_back(run_example(config.example, n, config.alpha,
                                                config.iterations, config.settings, label,
                                                csv ? &*csv : nullptr));
    }

    if (config.write_markdown) {
        artifacts.markdown_path = config.output_dir + "/" + config.example + "_rates.md";
        std::ofstream md(artifacts.markdown_path);
        if (!md) throw std::runtime_error("cannot open " + artifacts.markdown_path);
        md << markdown_rate_table(config.example, artifacts.reports);
    }
    return artifacts;
}

std::vector<checks::CheckResult> cmd_check() {
    using namespace checks;
    std::vector<CheckResult> results;

    for (auto [dim, n] : {std::pair<int, Index>{1, 101}, {1, 2001}, {2, 24}, {2, 48}}) {
        Grid<double> grid(dim, 0.0, 1.0, n);
        PoissonOperator<double> op(grid);
        results.push_back(adjoint_symmetry_check(
            grid, [&op](const GridFunction<double>& u) { return op.forward(u); },
            [&op](const GridFunction<double>& r) { return op.adjoint(r); }, 100, 1e-11,
            0x5eed0 + static_cast<std::uint64_t>(n)));
    }

    {
        Grid<double> grid(1, -1.0, 1.0, 501);
        results.push_back(projection_check(grid, BoxBounds<double>(-1.0, 1.0), 50, 0x5eed1));
    }

    {
        auto spec = catalog<double>("ex1-1d-k1");
        Grid<double> grid(1, spec.domain_lower, spec.domain_upper, 501);
        auto problem = build_bangbang(spec, BoxBounds<double>(-1.0, 1.0), grid);
        auto sub = run_invariant_checks(problem, 48, SolverSettings<double>{}, 0x5eed2,
                                        "ex1-1d-k1 n=501 K=48");
        results.insert(results.end(), sub.begin(), sub.end());
    }
    {
        auto spec = catalog<double>("ex4-2d-k1");
        Grid<double> grid(2, spec.domain_lower, spec.domain_upper, 24);
        auto problem = build_bangbang(spec, BoxBounds<double>(-1.0, 1.0), grid);
        auto sub = run_invariant_checks(problem, 16, SolverSettings<double>{}, 0x5eed3,
                                        "ex4-2d-k1 n=24 K=16");
        results.insert(results.end(), sub.begin(), sub.end());
    }

    results.push_back(subproblem_oracle_check<double>(10, 1e-6, 1'000'000L, 0x5eed4));

    auto meas = measure_exponent_checks<double>();
    results.insert(results.end(), meas.begin(), meas.end());

    results.push_back(synthetic_kappa_check<double>());
    return results;
}

std::string cmd_list() {
    std::ostringstream out;
    for (const auto& name : catalog_names<double>()) {
        auto spec = catalog<double>(name);
        out << name << "  " << spec.dimension << "D on [" << spec.domain_lower << ","
            << spec.domain_upper << "]" << (spec.dimension == 2 ? "^2" : "")
            << "  kappa=" << spec.kappa << '\n';
    }
    return out.str();
}

} // namespace bregopt
