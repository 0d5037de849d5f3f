#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metacog/metad.hpp"

namespace metacog {

enum class Statistic { MetaD, MRatio, LogMRatio, DPrime };

std::string_view to_string(Statistic s) noexcept;
std::optional<Statistic> parse_statistic(std::string_view text) noexcept;

/// Value of `stat` for a fit; nullopt when undefined (e.g. log of a
/// non-positive M_ratio).
std::optional<double> statistic_value(const FitResult& fit, Statistic stat) noexcept;

struct BootstrapOptions {
    int n_boot = 1000;
    double level = 0.95;
    std::uint64_t seed = 0;
    int threads = 1;
    /// When false every replicate is the fitted model's expected counts
    /// (no sampling noise); used to check the interval collapses.
    bool resample = true;
    FitOptions fit;
};

struct BootstrapResult {
    std::string statistic;  ///< e.g. "meta_d" or "difference:m_ratio"
    double point = 0.0;
    double low = 0.0;
    double high = 0.0;
    double level = 0.95;
    int n_boot = 0;
    std::uint64_t seed = 0;
    int failed = 0;
    double standard_error = 0.0;  ///< SD of the successful replicates
    std::vector<std::string> diagnostics;
};

/// Cell probabilities P(resp, conf | stim) of a fitted model: observed
/// type 1 rates times the fitted type 2 conditionals.
RatingCounts fitted_cell_probabilities(const FitResult& fit, int h);

/// The resampled counts of replicate `index` (exposed for determinism checks).
RatingCounts bootstrap_replicate(const FitResult& fit, const RatingCounts& observed, std::uint64_t seed,
                                 std::uint64_t index, bool resample = true);

/// Parametric bootstrap percentile interval. Failed refits are excluded and
/// counted; throws std::runtime_error when more than 20% fail.
BootstrapResult bootstrap_ci(const RatingCounts& counts, Statistic stat, const BootstrapOptions& opts);

/// Interval for stat(a) - stat(b), resampling both datasets independently.
BootstrapResult bootstrap_difference_ci(const RatingCounts& a, const RatingCounts& b, Statistic stat,
                                        const BootstrapOptions& opts);

/// Type-7 (linear interpolation) quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace metacog
