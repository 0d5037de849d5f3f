#include "metacog/bootstrap.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "metacog/rng.hpp"

namespace metacog {

namespace {

struct Replicate {
    std::optional<double> value;
    std::string failure;
};

// Runs body(i) for i in [0, n) on a small pool; results land by index.
void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    const int width = std::max(1, std::min(threads, n));
    if (width == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(width));
    for (int t = 0; t < width; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) body(i);
        });
    }
}

Replicate evaluate(const RatingCounts& counts, Statistic stat, const FitOptions& fit_opts) {
    try {
        const FitResult fit = fit_meta_d(counts, fit_opts);
        if (!fit.converged) return {std::nullopt, "no convergence: " + fit.diagnostics};
        auto v = statistic_value(fit, stat);
        if (!v) return {std::nullopt, "statistic undefined"};
        return {v, {}};
    } catch (const std::exception& e) {
        return {std::nullopt, e.what()};
    }
}

BootstrapResult summarize(std::vector<Replicate> reps, double point, std::string name, const BootstrapOptions& opts) {
    BootstrapResult out;
    out.statistic = std::move(name);
    out.point = point;
    out.level = opts.level;
    out.n_boot = opts.n_boot;
    out.seed = opts.seed;
    std::vector<double> values;
    values.reserve(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) {
        if (reps[i].value) {
            values.push_back(*reps[i].value);
        } else {
            ++out.failed;
            out.diagnostics.push_back("replicate " + std::to_string(i) + ": " + reps[i].failure);
        }
    }
    if (out.failed * 5 > opts.n_boot) {
        throw std::runtime_error("bootstrap: " + std::to_string(out.failed) + " of " + std::to_string(opts.n_boot) +
                                 " replicates failed (limit 20%)");
    }
    std::sort(values.begin(), values.end());
    const double alpha = 1.0 - opts.level;
    out.low = quantile_sorted(values, alpha / 2.0);
    out.high = quantile_sorted(values, 1.0 - alpha / 2.0);
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    out.standard_error = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    return out;
}

void check_options(const BootstrapOptions& opts) {
    if (opts.n_boot < 100) throw std::invalid_argument("bootstrap: n_boot must be >= 100");
    if (!(opts.level > 0.0 && opts.level < 1.0)) throw std::invalid_argument("bootstrap: level must be in (0, 1)");
}

FitResult fit_point(const RatingCounts& counts, const FitOptions& fit_opts) {
    FitResult fit = fit_meta_d(counts, fit_opts);
    if (!fit.converged) throw std::runtime_error("bootstrap: point fit did not converge: " + fit.diagnostics);
    return fit;
}

}  // namespace

std::string_view to_string(Statistic s) noexcept {
    switch (s) {
        case Statistic::MetaD: return "meta_d";
        case Statistic::MRatio: return "m_ratio";
        case Statistic::LogMRatio: return "log_m_ratio";
        case Statistic::DPrime: return "d_prime";
    }
    return "meta_d";
}

std::optional<Statistic> parse_statistic(std::string_view text) noexcept {
    if (text == "meta_d") return Statistic::MetaD;
    if (text == "m_ratio") return Statistic::MRatio;
    if (text == "log_m_ratio") return Statistic::LogMRatio;
    if (text == "d_prime") return Statistic::DPrime;
    return std::nullopt;
}

std::optional<double> statistic_value(const FitResult& fit, Statistic stat) noexcept {
    switch (stat) {
        case Statistic::MetaD: return fit.params.meta_d;
        case Statistic::DPrime: return fit.type1.d_prime;
        case Statistic::MRatio: return fit.m_ratio;
        case Statistic::LogMRatio:
            if (fit.m_ratio && *fit.m_ratio > 0.0) return std::log(*fit.m_ratio);
            return std::nullopt;
    }
    return std::nullopt;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

RatingCounts fitted_cell_probabilities(const FitResult& fit, int h) {
    const auto t2 = type2_probs(fit.params, h);
    RatingCounts p(h);
    for (auto stim : {Stimulus::S1, Stimulus::S2}) {
        const double p_s2 = stim == Stimulus::S2 ? fit.type1.hr : fit.type1.far;
        for (auto resp : {Stimulus::S1, Stimulus::S2}) {
            const double pr = resp == Stimulus::S2 ? p_s2 : 1.0 - p_s2;
            for (int k = 1; k <= h; ++k) p.at(stim, resp, k) = pr * t2.at(stim, resp, k);
        }
    }
    return p;
}

RatingCounts bootstrap_replicate(const FitResult& fit, const RatingCounts& observed, std::uint64_t seed,
                                 std::uint64_t index, bool resample) {
    const int h = observed.h();
    const RatingCounts probs = fitted_cell_probabilities(fit, h);
    const auto t1 = observed.type1();
    RatingCounts out(h);
    Rng rng(derive_seed(seed, index));
    for (auto stim : {Stimulus::S1, Stimulus::S2}) {
        const double n = stim == Stimulus::S1 ? t1.n_s1() : t1.n_s2();
        std::vector<double> row;
        for (auto resp : {Stimulus::S1, Stimulus::S2}) {
            for (int k = 1; k <= h; ++k) row.push_back(probs.at(stim, resp, k));
        }
        std::vector<double> drawn(row.size());
        if (resample) {
            const auto c = sample_multinomial(rng, static_cast<std::int64_t>(std::llround(n)), row);
            std::transform(c.begin(), c.end(), drawn.begin(), [](std::int64_t v) { return static_cast<double>(v); });
        } else {
            std::transform(row.begin(), row.end(), drawn.begin(), [n](double p) { return p * n; });
        }
        std::size_t i = 0;
        for (auto resp : {Stimulus::S1, Stimulus::S2}) {
            for (int k = 1; k <= h; ++k) out.at(stim, resp, k) = drawn[i++];
        }
    }
    return out;
}

BootstrapResult bootstrap_ci(const RatingCounts& counts, Statistic stat, const BootstrapOptions& opts) {
    check_options(opts);
    const FitResult point_fit = fit_point(counts, opts.fit);
    const auto point = statistic_value(point_fit, stat);
    if (!point) throw std::runtime_error("bootstrap: statistic undefined at the point estimate");

    std::vector<Replicate> reps(static_cast<std::size_t>(opts.n_boot));
    parallel_for(opts.n_boot, opts.threads, [&](int i) {
        const auto sample = bootstrap_replicate(point_fit, counts, opts.seed, static_cast<std::uint64_t>(i), opts.resample);
        reps[static_cast<std::size_t>(i)] = evaluate(sample, stat, opts.fit);
    });
    return summarize(std::move(reps), *point, std::string(to_string(stat)), opts);
}

BootstrapResult bootstrap_difference_ci(const RatingCounts& a, const RatingCounts& b, Statistic stat,
                                        const BootstrapOptions& opts) {
    check_options(opts);
    const FitResult fit_a = fit_point(a, opts.fit);
    const FitResult fit_b = fit_point(b, opts.fit);
    const auto va = statistic_value(fit_a, stat);
    const auto vb = statistic_value(fit_b, stat);
    if (!va || !vb) throw std::runtime_error("bootstrap: statistic undefined at the point estimate");

    // Dataset b uses a disjoint seed stream.
    const std::uint64_t seed_b = mix64(opts.seed ^ 0x5bd1e9955bd1e995ULL);
    std::vector<Replicate> reps(static_cast<std::size_t>(opts.n_boot));
    parallel_for(opts.n_boot, opts.threads, [&](int i) {
        const auto idx = static_cast<std::uint64_t>(i);
        const auto ra = evaluate(bootstrap_replicate(fit_a, a, opts.seed, idx, opts.resample), stat, opts.fit);
        const auto rb = evaluate(bootstrap_replicate(fit_b, b, seed_b, idx, opts.resample), stat, opts.fit);
        auto& slot = reps[static_cast<std::size_t>(i)];
        if (ra.value && rb.value) {
            slot.value = *ra.value - *rb.value;
        } else {
            slot.failure = ra.value ? "second: " + rb.failure : "first: " + ra.failure;
        }
    });
    return summarize(std::move(reps), *va - *vb, "difference:" + std::string(to_string(stat)), opts);
}

}  // namespace metacog
