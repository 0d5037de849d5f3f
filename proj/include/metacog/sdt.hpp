#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "metacog/normal.hpp"

namespace metacog {

/// Stimulus class and, with the same encoding, the type 1 response.
/// S2 is the "signal" class: S2 responses to S2 stimuli are hits.
enum class Stimulus : int { S1 = 0, S2 = 1 };
using Response = Stimulus;

std::string_view to_string(Stimulus s) noexcept;
/// Accepts "S1"/"S2" (any case) and "0"/"1".
std::optional<Stimulus> parse_stimulus(std::string_view text) noexcept;

/// Type 1 response tallies. Stored as reals so padded or expected counts
/// travel through the same code paths as observed ones.
struct Type1Counts {
    double s1_resp_s1 = 0.0;
    double s1_resp_s2 = 0.0;
    double s2_resp_s1 = 0.0;
    double s2_resp_s2 = 0.0;

    double n_s1() const noexcept { return s1_resp_s1 + s1_resp_s2; }
    double n_s2() const noexcept { return s2_resp_s1 + s2_resp_s2; }
    double total() const noexcept { return n_s1() + n_s2(); }
    double& at(Stimulus stim, Response resp) noexcept;
    double at(Stimulus stim, Response resp) const noexcept;

    /// Throws std::invalid_argument on negative/non-finite cells.
    void validate() const;
};

/// (stimulus, response, confidence) tallies for a confidence scale 1..h.
class RatingCounts {
public:
    RatingCounts() = default;
    explicit RatingCounts(int h);

    int h() const noexcept { return h_; }
    /// Confidence is 1-based.
    double& at(Stimulus stim, Response resp, int confidence);
    double at(Stimulus stim, Response resp, int confidence) const;

    Type1Counts type1() const noexcept;
    double response_total(Stimulus stim, Response resp) const noexcept;
    double total() const noexcept;
    bool has_zero_cell() const noexcept;
    bool is_integral() const noexcept;

    /// Flat view in (stimulus, response, confidence) row-major order.
    const std::vector<double>& cells() const noexcept { return cells_; }
    std::vector<double>& cells() noexcept { return cells_; }

    /// Throws std::invalid_argument on h < 2, negative/non-finite cells, or
    /// a stimulus class without trials.
    void validate() const;

    bool operator==(const RatingCounts&) const = default;

private:
    std::size_t index(Stimulus stim, Response resp, int confidence) const;

    int h_ = 0;
    std::vector<double> cells_;
};

enum class EdgeCorrection {
    Never,           ///< degenerate rates are an error
    WhenDegenerate,  ///< log-linear correction on a row whose raw rate is 0 or 1
    Always,          ///< log-linear correction on both rows
};

std::string_view to_string(EdgeCorrection e) noexcept;
std::optional<EdgeCorrection> parse_edge_correction(std::string_view text) noexcept;

struct Rates {
    double hr = 0.0;
    double far = 0.0;
};

/// Hit and false-alarm rates, strictly inside (0, 1).
///
/// Log-linear correction adds 0.5 to each cell of the affected stimulus row
/// and 1 to its denominator. Throws std::invalid_argument when a stimulus
/// class has no trials, std::domain_error for degenerate rates under Never.
Rates type1_rates(const Type1Counts& counts,
                  EdgeCorrection correction = EdgeCorrection::WhenDegenerate);

/// z(HR) - z(FAR).
double d_prime(double hr, double far);

/// -0.5 * (z(HR) + z(FAR)).
double criterion_c(double hr, double far);

/// c / d'. Throws std::domain_error("undefined normalized criterion") when d' = 0.
double c_prime(double c, double d_prime);

struct Type1Stats {
    double hr = 0.0;
    double far = 0.0;
    double d_prime = 0.0;
    double c = 0.0;
    std::optional<double> c_prime;  ///< absent when d' = 0
    double n_s1 = 0.0;
    double n_s2 = 0.0;
};

Type1Stats type1_stats(const Type1Counts& counts,
                       EdgeCorrection correction = EdgeCorrection::WhenDegenerate);

}  // namespace metacog
