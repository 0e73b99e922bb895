#pragma once

#include "bregopt/analysis.hpp"
#include "bregopt/checks.hpp"
#include "bregopt/report.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bregopt {

/// One experiment: a catalog example run at one or more grid resolutions.
struct ExperimentConfig {
    std::string example;
    std::vector<Index> resolutions;          // nodes per axis
    std::vector<double> h_values;            // mesh-size labels, parallel to
                                             // resolutions when set via --h
    double alpha = 1.0;
    Index iterations = 2048;
    SolverSettings<double> settings;
    std::string output_dir = "out";
    bool write_csv = true;
    bool write_markdown = true;

    void validate() const;
};

/// Convert a mesh size h to a node count on [a,b].
Index nodes_for_h(double h, double a, double b);

struct RunArtifacts {
    std::vector<RateReport<double>> reports;  // one per resolution
    std::vector<std::string> csv_paths;
    std::string markdown_path;
};

/// Execute the configured runs, writing one CSV per resolution and a
/// combined Markdown rate table. Partial CSV rows are flushed row by row.
RunArtifacts cmd_run(const ExperimentConfig& config);

/// Run the invariant suite; returns the per-check results.
std::vector<checks::CheckResult> cmd_check();

/// Catalog listing for the `list` subcommand.
std::string cmd_list();

/// Run one example at one resolution and return the scalar history
/// (used by cmd_run and by the acceptance suite).
RateReport<double> run_example(const std::string& example, Index nodes, double alpha,
                               Index iterations, const SolverSettings<double>& settings,
                               const std::string& grid_label = "",
                               CsvWriter* csv = nullptr);

} // namespace bregopt
