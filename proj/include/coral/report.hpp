#pragma once

#include "coral/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace coral {

struct ReportRow {
    std::string experiment;
    std::string algorithm;
    std::string instance;
    std::size_t n = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double subopt = 0.0;
    double objective = 0.0;
    double alpha = 0.0;
    double runtime_ms = 0.0;  // measured; excluded from the rerun-identity digest
};

struct PerNStat {
    std::size_t n = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    int trials = 0;
};

struct SlopeFit {
    bool defined = false;       // at least two medians above the exact-regime floor
    bool exact_regime = false;  // every median below the floor
    double slope = 0.0;
    double stderr_slope = 0.0;
    double intercept = 0.0;
    int points_used = 0;
};

struct ExperimentReport {
    std::string name;
    std::string config_echo;  // serialized JSON of the resolved config
    std::uint64_t master_seed = 0;
    std::vector<ReportRow> rows;
    std::vector<PerNStat> per_n;
    SlopeFit slope;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::pair<std::string, bool>> checks;
    double wall_clock_sec = 0.0;
};

/// OLS on (log2 N, log2 median), excluding medians below 1e-9 (solver-exact
/// regime).
SlopeFit fit_loglog_slope(const std::vector<PerNStat>& per_n);

std::vector<PerNStat> summarize_rows(const std::vector<ReportRow>& rows);

struct EmittedPaths {
    std::string csv;
    std::string json;
};

/// Writes rows as CSV and the summary as JSON. Reruns with the same config
/// and seed reproduce both byte-identically apart from the runtime_ms column
/// and wall-clock field; content_digest covers exactly the stable part.
EmittedPaths emit_report(const ExperimentReport& report, const std::string& out_dir);

/// Digest of the deterministic content (all columns except runtime_ms).
std::uint64_t report_content_digest(const ExperimentReport& report);

bool all_checks_pass(const ExperimentReport& report);

}  // namespace coral
