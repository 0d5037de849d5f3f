#pragma once

#include <optional>
#include <string_view>

namespace metacog {

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Region of practical equivalence for a difference.
struct Rope {
    double low = -0.1;
    double high = 0.1;

    /// [-0.05, 0.05], used for log M_ratio differences.
    static constexpr Rope log_m_ratio() noexcept { return {-0.05, 0.05}; }
    /// [-0.1, 0.1], used for d' and c differences.
    static constexpr Rope type1() noexcept { return {-0.1, 0.1}; }
};

enum class RopeVerdict { PracticallySignificant, Negligible, Inconclusive };

std::string_view to_string(RopeVerdict v) noexcept;

/// An estimate with its Delta-method variance.
struct DeltaEstimate {
    double value = 0.0;
    double variance = 0.0;
    double n_s1 = 0.0;
    double n_s2 = 0.0;
};

/// Var(d') = HR(1-HR) / (n_s2 phi(z(HR))^2) + FAR(1-FAR) / (n_s1 phi(z(FAR))^2).
/// Throws std::domain_error for rates outside (0, 1) or counts below 1.
double delta_var_dprime(double hr, double far, double n_s1, double n_s2);

/// Var(c) = Var(d') / 4 for the same inputs.
double delta_var_c(double hr, double far, double n_s1, double n_s2);

/// Var(c') by first-order expansion of c / d' in (HR, FAR).
double delta_var_c_prime(double hr, double far, double n_s1, double n_s2);

DeltaEstimate delta_dprime(double hr, double far, double n_s1, double n_s2);
DeltaEstimate delta_c(double hr, double far, double n_s1, double n_s2);

/// Two-sided critical value z(1 - alpha / (2 m)).
double bonferroni_threshold(double alpha, int m_comparisons);

/// Entirely outside -> practically significant, entirely inside -> negligible,
/// otherwise (including touching a bound) inconclusive.
RopeVerdict rope_classify(Interval ci, Rope rope);

struct ComparisonResult {
    double diff = 0.0;
    double z = 0.0;
    double alpha = 0.05;
    double alpha_corrected = 0.05;
    int m_comparisons = 1;
    double z_threshold = 0.0;
    bool statistically_significant = false;
    Interval ci;  ///< unadjusted (1 - alpha) interval
    Rope rope;
    RopeVerdict rope_verdict = RopeVerdict::Inconclusive;
};

/// Two-sided Z test of `diff` with a Bonferroni-corrected threshold, plus the
/// ROPE verdict on the unadjusted interval. Throws std::invalid_argument for
/// var_diff <= 0.
ComparisonResult z_test(double diff, double var_diff, int m_comparisons = 27, double alpha = 0.05,
                        Rope rope = Rope::type1());

}  // namespace metacog
