#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace metacog::cli {

/// One fit report, flattened. Type 1 intervals are 95% Delta-method
/// intervals; `ci_*` is the report's bootstrap interval when it has one.
struct SummaryRow {
    std::string source;  ///< path of the fit report the row was read from
    std::string model_id, task, risk, mode;
    double d_prime = 0.0;
    std::optional<double> d_prime_low, d_prime_high;
    double c = 0.0;
    std::optional<double> c_low, c_high;
    std::optional<double> c_prime;
    std::optional<double> meta_d, meta_c, m_ratio;
    std::string ci_statistic;
    std::optional<double> ci_low, ci_high, ci_level;
};

/// P(correct | confidence) for one trial log and confidence level.
struct AccuracyRow {
    std::string source;  ///< trial log path
    std::string model_id, task, risk;
    int confidence = 0;
    std::int64_t n = 0;
    std::int64_t n_correct = 0;
    double accuracy = 0.0;
};

/// Criterion c of one (model, task, mode) series at one risk configuration.
struct CriterionRow {
    std::string source;  ///< fit report path
    std::string model_id, task, mode, risk;
    double c = 0.0;
    std::optional<double> c_low, c_high;
};

struct ReportBundle {
    std::vector<SummaryRow> summary;
    std::vector<AccuracyRow> accuracy;
    std::vector<CriterionRow> criterion;
    std::vector<std::string> inputs;   ///< every file that contributed
    std::vector<std::string> skipped;  ///< "<path>: <reason>" for unreadable candidates
};

/// Collects the fit reports (*.json) and trial logs (*.jsonl) found directly
/// inside each directory. Throws std::invalid_argument when none are found.
ReportBundle build_report(const std::vector<std::filesystem::path>& dirs);

/// Writes summary.csv, summary.json, accuracy_by_confidence.csv and
/// criterion_by_risk.csv into `out_dir`; returns the paths written.
std::vector<std::filesystem::path> write_report(const ReportBundle& bundle, const std::filesystem::path& out_dir);

/// Re-reads the CSVs in `out_dir` against their column schemas. Returns a
/// list of problems (empty when everything checks out).
std::vector<std::string> validate_report(const std::filesystem::path& out_dir);

nlohmann::json to_json(const ReportBundle& bundle);

/// Shortest text that parses back to exactly `v`.
std::string format_number(double v);

extern const std::vector<std::string> kSummaryColumns;
extern const std::vector<std::string> kAccuracyColumns;
extern const std::vector<std::string> kCriterionColumns;

}  // namespace metacog::cli
