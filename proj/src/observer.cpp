#include "metacog/observer.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <stdexcept>

#include "metacog/normal.hpp"

namespace metacog {

double ObserverSpec::meta_c() const noexcept {
    if (d_prime > 0.0) return c / d_prime * effective_meta_d();
    return c;
}

MetaDParams ObserverSpec::metad_params() const {
    return MetaDParams{effective_meta_d(), meta_c(), t2_criteria_s1, t2_criteria_s2};
}

double ObserverSpec::hit_rate() const noexcept { return normal_sf(c - 0.5 * d_prime); }

double ObserverSpec::false_alarm_rate() const noexcept { return normal_sf(c + 0.5 * d_prime); }

void ObserverSpec::validate() const {
    if (!(d_prime >= 0.0) || !std::isfinite(d_prime)) throw std::invalid_argument("observer: d' must be >= 0");
    if (!std::isfinite(c)) throw std::invalid_argument("observer: c must be finite");
    if (!(effective_meta_d() >= 0.0)) throw std::invalid_argument("observer: meta-d' must be >= 0");
    if (t2_criteria_s1.empty() || t2_criteria_s1.size() != t2_criteria_s2.size()) {
        throw std::invalid_argument("observer: need h-1 >= 1 type 2 criteria on each side");
    }
    if (!metad_params().is_ordered()) {
        throw std::invalid_argument("observer: thresholds must increase strictly around meta-c");
    }
}

std::int64_t SimOptions::stimulus_count(Stimulus s) const noexcept {
    const std::int64_t s1 = n_s1.value_or(n_trials / 2);
    return s == Stimulus::S1 ? s1 : n_trials - s1;
}

void SimOptions::validate() const {
    if (n_trials < 2) throw std::invalid_argument("simulation: n_trials must be >= 2");
    const auto s1 = n_s1.value_or(n_trials / 2);
    if (s1 < 0 || s1 > n_trials) throw std::invalid_argument("simulation: n_s1 must be in [0, n_trials]");
}

std::vector<std::int64_t> round_preserving_total(const std::vector<double>& values, std::int64_t total) {
    std::vector<std::int64_t> out(values.size());
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = static_cast<std::int64_t>(std::round(values[i]));
        sum += out[i];
    }
    // The residual goes to the largest cell; if that would drive it below
    // zero the remainder spills onto the next largest, and so on.
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::int64_t residual = total - sum;
    for (std::size_t i = 0; residual != 0 && i < order.size(); ++i) {
        auto& cell = out[order[i]];
        const std::int64_t step = residual > 0 ? residual : std::max(residual, -cell);
        cell += step;
        residual -= step;
    }
    return out;
}

RatingCounts expected_counts(const ObserverSpec& spec, std::int64_t n_trials, std::optional<std::int64_t> n_s1) {
    spec.validate();
    SimOptions opts;
    opts.n_trials = n_trials;
    opts.n_s1 = n_s1;
    opts.validate();
    const int h = spec.h();
    const auto probs = type2_probs(spec.metad_params(), h);
    RatingCounts out(h);
    for (auto stim : {Stimulus::S1, Stimulus::S2}) {
        const double n = static_cast<double>(opts.stimulus_count(stim));
        const double p_s2 = stim == Stimulus::S2 ? spec.hit_rate() : spec.false_alarm_rate();
        for (auto resp : {Stimulus::S1, Stimulus::S2}) {
            const double mass = n * (resp == Stimulus::S2 ? p_s2 : 1.0 - p_s2);
            for (int k = 1; k <= h; ++k) out.at(stim, resp, k) = mass * probs.at(stim, resp, k);
        }
    }
    return out;
}

RatingCounts simulate_counts(const ObserverSpec& spec, const SimOptions& opts) {
    spec.validate();
    opts.validate();
    const int h = spec.h();
    const auto probs = type2_probs(spec.metad_params(), h);
    Rng rng(opts.seed);
    RatingCounts out(h);
    std::vector<double> conditional(static_cast<std::size_t>(h));

    for (auto stim : {Stimulus::S1, Stimulus::S2}) {
        const std::int64_t n = opts.stimulus_count(stim);
        const double p_s2 = stim == Stimulus::S2 ? spec.hit_rate() : spec.false_alarm_rate();
        std::int64_t resp_counts[2];
        if (opts.deterministic_type1) {
            const auto r = round_preserving_total({static_cast<double>(n) * (1.0 - p_s2), static_cast<double>(n) * p_s2}, n);
            resp_counts[0] = r[0];
            resp_counts[1] = r[1];
        } else {
            std::binomial_distribution<std::int64_t> dist(n, p_s2);
            resp_counts[1] = n > 0 ? dist(rng) : 0;
            resp_counts[0] = n - resp_counts[1];
        }
        for (auto resp : {Stimulus::S1, Stimulus::S2}) {
            const std::int64_t m = resp_counts[static_cast<int>(resp)];
            if (m == 0 && opts.deterministic_type1 && opts.sample_type2) {
                throw std::runtime_error("simulate_counts: rounding left an empty (" + std::string(to_string(stim)) +
                                         ", " + std::string(to_string(resp)) +
                                         ") cell; increase n_trials or disable type 2 sampling");
            }
            for (int k = 1; k <= h; ++k) conditional[static_cast<std::size_t>(k - 1)] = probs.at(stim, resp, k);
            std::vector<std::int64_t> conf;
            if (opts.sample_type2) {
                conf = sample_multinomial(rng, m, conditional);
            } else {
                std::vector<double> expect(conditional);
                for (double& e : expect) e *= static_cast<double>(m);
                conf = round_preserving_total(expect, m);
            }
            for (int k = 1; k <= h; ++k) out.at(stim, resp, k) = static_cast<double>(conf[static_cast<std::size_t>(k - 1)]);
        }
    }
    return out;
}

std::pair<Response, int> sample_trial(const ObserverSpec& spec, Stimulus stim, Rng& rng) {
    const double p_s2 = stim == Stimulus::S2 ? spec.hit_rate() : spec.false_alarm_rate();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Response resp = unif(rng) < p_s2 ? Stimulus::S2 : Stimulus::S1;
    const auto probs = type2_probs(spec.metad_params(), spec.h());
    double u = unif(rng);
    for (int k = 1; k < spec.h(); ++k) {
        u -= probs.at(stim, resp, k);
        if (u < 0.0) return {resp, k};
    }
    return {resp, spec.h()};
}

}  // namespace metacog
