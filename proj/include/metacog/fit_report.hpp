#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "metacog/bootstrap.hpp"
#include "metacog/metad.hpp"

namespace metacog {

/// Fit report as persisted on disk. Meta-d' fields are absent for
/// type-1-only reports (c-calibration runs).
struct FitReport {
    std::optional<double> meta_d;
    std::optional<double> meta_c;
    std::vector<double> t2_criteria_s1;
    std::vector<double> t2_criteria_s2;
    double d_prime = 0.0;
    double c = 0.0;
    std::optional<double> c_prime;
    std::optional<double> m_ratio;
    std::optional<double> log_likelihood;
    std::optional<bool> converged;
    std::optional<int> iterations;
    // Type 1 inputs, kept so Delta-method comparisons can be made from reports.
    double hr = 0.0;
    double far = 0.0;
    double n_s1 = 0.0;
    double n_s2 = 0.0;
    std::optional<BootstrapResult> ci;
    nlohmann::json meta = nlohmann::json::object();  ///< model_id, task, risk, mode, source, ...

    bool type1_only() const noexcept { return !meta_d.has_value(); }
};

FitReport make_fit_report(const FitResult& fit, std::optional<BootstrapResult> ci = std::nullopt,
                          nlohmann::json meta = nlohmann::json::object());
FitReport make_type1_report(const Type1Stats& stats, nlohmann::json meta = nlohmann::json::object());

nlohmann::json to_json(const FitReport& report);
/// Throws std::runtime_error naming the missing/ill-typed field.
FitReport fit_report_from_json(const nlohmann::json& j);

void write_fit_report(const std::filesystem::path& path, const FitReport& report);
FitReport read_fit_report(const std::filesystem::path& path);

}  // namespace metacog
