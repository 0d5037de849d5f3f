#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "metacog/metad.hpp"
#include "metacog/rng.hpp"
#include "metacog/sdt.hpp"

namespace metacog {

/// Generative equal-variance SDT observer. Type 1 behaviour follows
/// (d_prime, c); confidence follows the meta-d' model with
/// meta_c = (c / d_prime) * meta_d.
struct ObserverSpec {
    double d_prime = 1.0;
    double c = 0.0;
    std::optional<double> meta_d;  ///< defaults to d_prime (ideal observer)
    std::vector<double> t2_criteria_s1;
    std::vector<double> t2_criteria_s2;

    int h() const noexcept { return static_cast<int>(t2_criteria_s1.size()) + 1; }
    double effective_meta_d() const noexcept { return meta_d.value_or(d_prime); }
    double meta_c() const noexcept;
    MetaDParams metad_params() const;
    double hit_rate() const noexcept;
    double false_alarm_rate() const noexcept;
    /// Throws std::invalid_argument on d' < 0, meta_d < 0, h < 2 or bad ordering.
    void validate() const;
};

struct SimOptions {
    std::int64_t n_trials = 1000;
    std::optional<std::int64_t> n_s1;  ///< defaults to n_trials / 2
    bool deterministic_type1 = true;
    bool sample_type2 = true;
    std::uint64_t seed = 0;

    std::int64_t stimulus_count(Stimulus s) const noexcept;
    void validate() const;
};

/// Noise-free cell expectations n_stim * P(resp, conf | stim).
RatingCounts expected_counts(const ObserverSpec& spec, std::int64_t n_trials,
                             std::optional<std::int64_t> n_s1 = std::nullopt);

/// Integer counts from the observer. Deterministic type 1 counts are the
/// rounded expectations (row totals preserved); type 2 counts are multinomial
/// draws within each (stimulus, response) cell or rounded expectations.
RatingCounts simulate_counts(const ObserverSpec& spec, const SimOptions& opts);

/// Round half away from zero, then move the residual onto the largest cell
/// so the entries sum to `total` exactly.
std::vector<std::int64_t> round_preserving_total(const std::vector<double>& values, std::int64_t total);

/// Draw a single trial for a presented stimulus: (response, confidence).
std::pair<Response, int> sample_trial(const ObserverSpec& spec, Stimulus stim, Rng& rng);

}  // namespace metacog
