#include "metacog/metad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>

#include "metacog/normal.hpp"
#include "metacog/simplex.hpp"

namespace metacog {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinProb = 1e-300;
constexpr double kMinGap = 0.02;

std::size_t slot(Stimulus stim, Response resp, int h, int confidence) {
    return static_cast<std::size_t>((static_cast<int>(stim) * 2 + static_cast<int>(resp)) * h + confidence - 1);
}

// Free parameters: [meta_d, log gaps walking left from meta_c, log gaps walking right].
MetaDParams decode(std::span<const double> z, int h, double c_prime) {
    MetaDParams p;
    p.meta_d = z[0];
    p.meta_c = c_prime * p.meta_d;
    const auto m = static_cast<std::size_t>(h - 1);
    p.t2_criteria_s1.assign(m, 0.0);
    p.t2_criteria_s2.assign(m, 0.0);
    double t = p.meta_c;
    for (std::size_t k = 0; k < m; ++k) {
        t -= std::exp(z[1 + k]);
        p.t2_criteria_s1[m - 1 - k] = t;
    }
    t = p.meta_c;
    for (std::size_t k = 0; k < m; ++k) {
        t += std::exp(z[1 + m + k]);
        p.t2_criteria_s2[k] = t;
    }
    return p;
}

double clamp_rate(double num, double den) { return (num + 0.5) / (den + 1.0); }

// Criterion locations implied by cumulative confidence rates, read as if each
// confidence boundary were itself a type 1 criterion.
std::vector<double> initial_free_params(const RatingCounts& counts, const Type1Stats& t1) {
    const int h = counts.h();
    const auto m = static_cast<std::size_t>(h - 1);
    const double n_s1 = counts.type1().n_s1();
    const double n_s2 = counts.type1().n_s2();
    const double meta_c = t1.c;

    // S2 side: boundary between confidence k and k+1 for S2 responses.
    std::vector<double> right(m), left(m);
    for (int k = 1; k < h; ++k) {
        double hi_s1 = 0.0, hi_s2 = 0.0;
        for (int j = k + 1; j <= h; ++j) {
            hi_s1 += counts.at(Stimulus::S1, Stimulus::S2, j);
            hi_s2 += counts.at(Stimulus::S2, Stimulus::S2, j);
        }
        right[static_cast<std::size_t>(k - 1)] =
            -0.5 * (probit(clamp_rate(hi_s2, n_s2)) + probit(clamp_rate(hi_s1, n_s1)));
    }
    // S1 side: "respond S2, or S1 with confidence <= k" places a criterion left of meta_c.
    for (int k = 1; k < h; ++k) {
        double above_s1 = counts.response_total(Stimulus::S1, Stimulus::S2);
        double above_s2 = counts.response_total(Stimulus::S2, Stimulus::S2);
        for (int j = 1; j <= k; ++j) {
            above_s1 += counts.at(Stimulus::S1, Stimulus::S1, j);
            above_s2 += counts.at(Stimulus::S2, Stimulus::S1, j);
        }
        left[static_cast<std::size_t>(k - 1)] =
            -0.5 * (probit(clamp_rate(above_s2, n_s2)) + probit(clamp_rate(above_s1, n_s1)));
    }

    std::vector<double> z(1 + 2 * m);
    z[0] = t1.d_prime;
    double prev = meta_c;
    for (std::size_t k = 0; k < m; ++k) {
        const double gap = std::max(prev - left[k], kMinGap);
        z[1 + k] = std::log(gap);
        prev -= gap;
    }
    prev = meta_c;
    for (std::size_t k = 0; k < m; ++k) {
        const double gap = std::max(right[k] - prev, kMinGap);
        z[1 + m + k] = std::log(gap);
        prev += gap;
    }
    return z;
}

}  // namespace

std::vector<double> MetaDParams::thresholds() const {
    std::vector<double> t(t2_criteria_s1);
    t.push_back(meta_c);
    t.insert(t.end(), t2_criteria_s2.begin(), t2_criteria_s2.end());
    return t;
}

bool MetaDParams::is_ordered() const noexcept {
    if (t2_criteria_s1.size() != t2_criteria_s2.size() || t2_criteria_s1.empty()) return false;
    const auto t = thresholds();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i])) return false;
        if (i > 0 && !(t[i] > t[i - 1])) return false;
    }
    return std::isfinite(meta_d);
}

Type2ProbTable::Type2ProbTable(int h) : h_(h), p_(static_cast<std::size_t>(4 * h), 0.0) {
    if (h < 2) throw std::invalid_argument("confidence scale needs h >= 2");
}

double Type2ProbTable::at(Stimulus stim, Response resp, int confidence) const {
    if (confidence < 1 || confidence > h_) throw std::out_of_range("confidence outside 1..h");
    return p_[slot(stim, resp, h_, confidence)];
}

double& Type2ProbTable::at(Stimulus stim, Response resp, int confidence) {
    if (confidence < 1 || confidence > h_) throw std::out_of_range("confidence outside 1..h");
    return p_[slot(stim, resp, h_, confidence)];
}

double Type2ProbTable::response_mass(Stimulus stim, Response resp) const noexcept {
    return mass_[static_cast<int>(stim)][static_cast<int>(resp)];
}

void Type2ProbTable::set_response_mass(Stimulus stim, Response resp, double mass) noexcept {
    mass_[static_cast<int>(stim)][static_cast<int>(resp)] = mass;
}

Type2ProbTable type2_probs(const MetaDParams& params, int h) {
    if (params.h() != h || static_cast<int>(params.t2_criteria_s2.size()) != h - 1) {
        throw std::invalid_argument("type2_probs: expected h-1 criteria on each side");
    }
    if (!params.is_ordered()) {
        throw std::invalid_argument("type2_probs: thresholds must be strictly increasing");
    }
    Type2ProbTable table(h);
    const auto t = params.thresholds();
    auto threshold = [&](int j) {  // j in 0..2h, t_0 = -inf, t_2h = +inf
        if (j <= 0) return -kInf;
        if (j >= 2 * h) return kInf;
        return t[static_cast<std::size_t>(j - 1)];
    };
    for (auto stim : {Stimulus::S1, Stimulus::S2}) {
        const double mu = stim == Stimulus::S1 ? -0.5 * params.meta_d : 0.5 * params.meta_d;
        const double mass_s1 = normal_cdf(params.meta_c - mu);
        const double mass_s2 = normal_sf(params.meta_c - mu);
        table.set_response_mass(stim, Stimulus::S1, mass_s1);
        table.set_response_mass(stim, Stimulus::S2, mass_s2);
        for (int conf = 1; conf <= h; ++conf) {
            // Response S1 interval j = h - conf + 1; response S2 interval j = h + conf.
            const int j1 = h - conf + 1;
            const int j2 = h + conf;
            const double m1 = normal_interval_mass(threshold(j1 - 1), threshold(j1), mu);
            const double m2 = normal_interval_mass(threshold(j2 - 1), threshold(j2), mu);
            table.at(stim, Stimulus::S1, conf) = mass_s1 > 0.0 ? m1 / mass_s1 : 0.0;
            table.at(stim, Stimulus::S2, conf) = mass_s2 > 0.0 ? m2 / mass_s2 : 0.0;
        }
    }
    return table;
}

double type2_log_likelihood(const RatingCounts& counts, const MetaDParams& params) {
    const int h = counts.h();
    const auto probs = type2_probs(params, h);
    double ll = 0.0;
    for (auto stim : {Stimulus::S1, Stimulus::S2}) {
        for (auto resp : {Stimulus::S1, Stimulus::S2}) {
            for (int k = 1; k <= h; ++k) {
                const double n = counts.at(stim, resp, k);
                if (n > 0.0) ll += n * std::log(std::max(probs.at(stim, resp, k), kMinProb));
            }
        }
    }
    return ll;
}

std::string_view to_string(CellPadding p) noexcept {
    switch (p) {
        case CellPadding::Never: return "never";
        case CellPadding::WhenDegenerate: return "when-degenerate";
        case CellPadding::Always: return "always";
    }
    return "when-degenerate";
}

std::optional<CellPadding> parse_cell_padding(std::string_view text) noexcept {
    if (text == "never") return CellPadding::Never;
    if (text == "when-degenerate") return CellPadding::WhenDegenerate;
    if (text == "always") return CellPadding::Always;
    return std::nullopt;
}

RatingCounts apply_cell_padding(const RatingCounts& counts, CellPadding policy) {
    const bool pad = policy == CellPadding::Always ||
                     (policy == CellPadding::WhenDegenerate && counts.has_zero_cell());
    if (!pad) return counts;
    RatingCounts out = counts;
    const double add = 1.0 / (2.0 * counts.h());
    for (double& v : out.cells()) v += add;
    return out;
}

FitResult fit_meta_d(const RatingCounts& raw, const FitOptions& options) {
    raw.validate();
    FitResult result;
    result.type1 = type1_stats(raw.type1(), options.edge_correction);
    if (!result.type1.c_prime) {
        throw std::invalid_argument("fit_meta_d: type 1 d' is zero, normalized criterion undefined");
    }
    const double cp = *result.type1.c_prime;
    const RatingCounts counts = apply_cell_padding(raw, options.padding);
    result.padded = counts != raw;
    const int h = counts.h();

    // Cell probabilities are evaluated inline; this is the hot loop of every fit.
    const auto objective = [&](std::span<const double> z) {
        const MetaDParams p = decode(z, h, cp);
        if (!p.is_ordered()) return kInf;
        const auto probs = type2_probs(p, h);
        double ll = 0.0;
        const auto& cells = counts.cells();
        for (auto stim : {Stimulus::S1, Stimulus::S2}) {
            for (auto resp : {Stimulus::S1, Stimulus::S2}) {
                for (int k = 1; k <= h; ++k) {
                    const double n = cells[slot(stim, resp, h, k)];
                    if (n > 0.0) ll += n * std::log(std::max(probs.at(stim, resp, k), kMinProb));
                }
            }
        }
        return -ll;
    };

    std::vector<double> z = initial_free_params(counts, result.type1);
    const auto& opt = options.optimizer;
    SimplexOptions sopts;
    sopts.ftol_rel = opt.rel_tolerance * 1e-3;
    sopts.xtol = 1e-10;

    double best = objective(z);
    bool settled = false;
    int restarts = 0;
    for (; restarts <= opt.max_restarts; ++restarts) {
        sopts.max_evaluations = opt.max_evaluations - result.evaluations;
        if (sopts.max_evaluations <= 0) break;
        sopts.initial_step = restarts == 0 ? 0.25 : 0.05;
        const SimplexResult r = nelder_mead(objective, z, sopts);
        result.evaluations += r.evaluations;
        result.iterations += r.iterations;
        const double improvement = best - r.value;
        if (r.value <= best) {
            z = r.x;
            best = r.value;
        }
        if (restarts > 0 && r.tolerance_met &&
            improvement <= opt.rel_tolerance * std::max(1.0, std::fabs(best))) {
            settled = true;
            break;
        }
    }

    result.params = decode(z, h, cp);
    result.log_likelihood = -best;
    result.converged = settled && std::isfinite(best);
    if (result.type1.d_prime > 0.0) result.m_ratio = result.params.meta_d / result.type1.d_prime;

    std::ostringstream diag;
    diag << "restarts=" << restarts << " evaluations=" << result.evaluations;
    if (!result.converged) diag << " (tolerance not met)";
    if (result.padded) diag << " padded=1/" << 2 * h;
    result.diagnostics = diag.str();
    return result;
}

double m_ratio(double meta_d, double d_prime) {
    if (!(d_prime > 0.0)) throw std::domain_error("m_ratio: d' must be positive");
    return meta_d / d_prime;
}

}  // namespace metacog
