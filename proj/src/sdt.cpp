#include "metacog/sdt.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace metacog {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

void check_cell(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument(std::string(what) + ": counts must be finite and non-negative");
    }
}

// Proportion of S2 responses in one stimulus row, corrected if requested.
double row_rate(double resp_s2, double n, EdgeCorrection correction, const char* name) {
    const double raw = resp_s2 / n;
    const bool degenerate = resp_s2 <= 0.0 || resp_s2 >= n;
    switch (correction) {
        case EdgeCorrection::Always:
            return (resp_s2 + 0.5) / (n + 1.0);
        case EdgeCorrection::WhenDegenerate:
            return degenerate ? (resp_s2 + 0.5) / (n + 1.0) : raw;
        case EdgeCorrection::Never:
            if (degenerate) {
                throw std::domain_error(std::string("degenerate ") + name +
                                        " with edge correction disabled");
            }
            return raw;
    }
    return raw;
}

}  // namespace

std::string_view to_string(Stimulus s) noexcept { return s == Stimulus::S1 ? "S1" : "S2"; }

std::optional<Stimulus> parse_stimulus(std::string_view text) noexcept {
    if (iequals(text, "S1") || text == "0") return Stimulus::S1;
    if (iequals(text, "S2") || text == "1") return Stimulus::S2;
    return std::nullopt;
}

double& Type1Counts::at(Stimulus stim, Response resp) noexcept {
    if (stim == Stimulus::S1) return resp == Stimulus::S1 ? s1_resp_s1 : s1_resp_s2;
    return resp == Stimulus::S1 ? s2_resp_s1 : s2_resp_s2;
}

double Type1Counts::at(Stimulus stim, Response resp) const noexcept {
    return const_cast<Type1Counts&>(*this).at(stim, resp);
}

void Type1Counts::validate() const {
    check_cell(s1_resp_s1, "type 1 counts");
    check_cell(s1_resp_s2, "type 1 counts");
    check_cell(s2_resp_s1, "type 1 counts");
    check_cell(s2_resp_s2, "type 1 counts");
}

RatingCounts::RatingCounts(int h) : h_(h) {
    if (h < 2) throw std::invalid_argument("confidence scale needs h >= 2");
    cells_.assign(static_cast<std::size_t>(4 * h), 0.0);
}

std::size_t RatingCounts::index(Stimulus stim, Response resp, int confidence) const {
    if (confidence < 1 || confidence > h_) {
        throw std::out_of_range("confidence " + std::to_string(confidence) + " outside 1.." +
                                std::to_string(h_));
    }
    return static_cast<std::size_t>((static_cast<int>(stim) * 2 + static_cast<int>(resp)) * h_ +
                                    (confidence - 1));
}

double& RatingCounts::at(Stimulus stim, Response resp, int confidence) {
    return cells_[index(stim, resp, confidence)];
}

double RatingCounts::at(Stimulus stim, Response resp, int confidence) const {
    return cells_[index(stim, resp, confidence)];
}

double RatingCounts::response_total(Stimulus stim, Response resp) const noexcept {
    double sum = 0.0;
    const auto base = static_cast<std::size_t>((static_cast<int>(stim) * 2 + static_cast<int>(resp)) * h_);
    for (int k = 0; k < h_; ++k) sum += cells_[base + static_cast<std::size_t>(k)];
    return sum;
}

Type1Counts RatingCounts::type1() const noexcept {
    return {response_total(Stimulus::S1, Stimulus::S1), response_total(Stimulus::S1, Stimulus::S2),
            response_total(Stimulus::S2, Stimulus::S1), response_total(Stimulus::S2, Stimulus::S2)};
}

double RatingCounts::total() const noexcept {
    double sum = 0.0;
    for (double v : cells_) sum += v;
    return sum;
}

bool RatingCounts::has_zero_cell() const noexcept {
    return std::any_of(cells_.begin(), cells_.end(), [](double v) { return v <= 0.0; });
}

bool RatingCounts::is_integral() const noexcept {
    return std::all_of(cells_.begin(), cells_.end(), [](double v) { return v == std::floor(v); });
}

void RatingCounts::validate() const {
    if (h_ < 2 || cells_.size() != static_cast<std::size_t>(4 * h_)) {
        throw std::invalid_argument("rating counts must be 2 x 2 x h with h >= 2");
    }
    for (double v : cells_) check_cell(v, "rating counts");
    const auto t1 = type1();
    if (t1.n_s1() <= 0.0 || t1.n_s2() <= 0.0) {
        throw std::invalid_argument("each stimulus class needs at least one trial");
    }
}

std::string_view to_string(EdgeCorrection e) noexcept {
    switch (e) {
        case EdgeCorrection::Never: return "never";
        case EdgeCorrection::WhenDegenerate: return "when-degenerate";
        case EdgeCorrection::Always: return "always";
    }
    return "when-degenerate";
}

std::optional<EdgeCorrection> parse_edge_correction(std::string_view text) noexcept {
    if (text == "never") return EdgeCorrection::Never;
    if (text == "when-degenerate" || text == "only-when-degenerate") return EdgeCorrection::WhenDegenerate;
    if (text == "always") return EdgeCorrection::Always;
    return std::nullopt;
}

Rates type1_rates(const Type1Counts& counts, EdgeCorrection correction) {
    counts.validate();
    if (counts.n_s1() <= 0.0 || counts.n_s2() <= 0.0) {
        throw std::invalid_argument("type1_rates: each stimulus class needs at least one trial");
    }
    return {row_rate(counts.s2_resp_s2, counts.n_s2(), correction, "hit rate"),
            row_rate(counts.s1_resp_s2, counts.n_s1(), correction, "false-alarm rate")};
}

double d_prime(double hr, double far) { return probit(hr) - probit(far); }

double criterion_c(double hr, double far) { return -0.5 * (probit(hr) + probit(far)); }

double c_prime(double c, double d_prime) {
    if (d_prime == 0.0) throw std::domain_error("undefined normalized criterion");
    return c / d_prime;
}

Type1Stats type1_stats(const Type1Counts& counts, EdgeCorrection correction) {
    const Rates r = type1_rates(counts, correction);
    Type1Stats s;
    s.hr = r.hr;
    s.far = r.far;
    s.d_prime = d_prime(r.hr, r.far);
    s.c = criterion_c(r.hr, r.far);
    if (s.d_prime != 0.0) s.c_prime = s.c / s.d_prime;
    s.n_s1 = counts.n_s1();
    s.n_s2 = counts.n_s2();
    return s;
}

}  // namespace metacog
