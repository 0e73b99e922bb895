#pragma once

#include "bregopt/analysis.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bregopt {

namespace detail {
inline std::string full_precision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
inline std::string three_decimals(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}
} // namespace detail

/// Streaming CSV writer: header `k,residual,error_sq,kappa_k`, one row per
/// iteration, kappa column empty where undefined. Rows are flushed as they
/// are written so partial results survive a failed run.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path);
        out_ << "k,residual,error_sq,kappa_k\n";
        out_.flush();
    }

    void row(Index k, double residual, double error_sq, std::optional<double> kappa) {
        out_ << k << ',' << detail::full_precision(residual) << ','
             << detail::full_precision(error_sq) << ',';
        if (kappa) out_ << detail::full_precision(*kappa);
        out_ << '\n';
        out_.flush();
    }

private:
    std::ofstream out_;
};

/// Markdown rate table: one row per dyadic k in
/// {4, 8, ..., K}, one kappa_k column per resolution, 3 decimals.
template <typename Scalar>
std::string markdown_rate_table(const std::string& example,
                                const std::vector<RateReport<Scalar>>& reports) {
    if (reports.empty()) throw std::invalid_argument("markdown_rate_table: no reports");
    Index max_k = reports.front().max_k();
    for (const auto& r : reports) max_k = std::min(max_k, r.max_k());

    std::string md = "# " + example + "\n\n| k |";
    for (const auto& r : reports) md += " kappa_k (" + r.grid_label + ") |";
    md += "\n|---|";
    for (std::size_t i = 0; i < reports.size(); ++i) md += "---|";
    md += "\n";
    for (Index k = 4; k <= max_k; k *= 2) {
        md += "| " + std::to_string(k) + " |";
        for (const auto& r : reports) {
            auto kap = r.kappa(k);
            md += kap ? " " + detail::three_decimals(static_cast<double>(*kap)) + " |" : "  |";
        }
        md += "\n";
    }
    return md;
}

} // namespace bregopt
