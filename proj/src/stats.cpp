#include "metacog/stats.hpp"

#include <cmath>
#include <stdexcept>

#include "metacog/normal.hpp"

namespace metacog {

namespace {

void check_inputs(double hr, double far, double n_s1, double n_s2) {
    if (!(hr > 0.0 && hr < 1.0) || !(far > 0.0 && far < 1.0)) {
        throw std::domain_error("delta method: rates must lie strictly inside (0, 1)");
    }
    if (!(n_s1 >= 1.0) || !(n_s2 >= 1.0)) throw std::domain_error("delta method: counts must be >= 1");
}

// Var(z(p_hat)) for a binomial proportion.
double z_variance(double p, double n) {
    const double dens = normal_pdf(probit(p));
    return p * (1.0 - p) / (n * dens * dens);
}

}  // namespace

std::string_view to_string(RopeVerdict v) noexcept {
    switch (v) {
        case RopeVerdict::PracticallySignificant: return "practically_significant";
        case RopeVerdict::Negligible: return "negligible";
        case RopeVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

double delta_var_dprime(double hr, double far, double n_s1, double n_s2) {
    check_inputs(hr, far, n_s1, n_s2);
    return z_variance(hr, n_s2) + z_variance(far, n_s1);
}

double delta_var_c(double hr, double far, double n_s1, double n_s2) {
    return 0.25 * delta_var_dprime(hr, far, n_s1, n_s2);
}

double delta_var_c_prime(double hr, double far, double n_s1, double n_s2) {
    check_inputs(hr, far, n_s1, n_s2);
    const double zh = probit(hr);
    const double zf = probit(far);
    const double d = zh - zf;
    if (d == 0.0) throw std::domain_error("undefined normalized criterion");
    // c' = -(zh + zf) / (2 (zh - zf)); partials w.r.t. zh and zf.
    const double dzh = zf / (d * d);
    const double dzf = -zh / (d * d);
    return dzh * dzh * z_variance(hr, n_s2) + dzf * dzf * z_variance(far, n_s1);
}

DeltaEstimate delta_dprime(double hr, double far, double n_s1, double n_s2) {
    return {probit(hr) - probit(far), delta_var_dprime(hr, far, n_s1, n_s2), n_s1, n_s2};
}

DeltaEstimate delta_c(double hr, double far, double n_s1, double n_s2) {
    return {-0.5 * (probit(hr) + probit(far)), delta_var_c(hr, far, n_s1, n_s2), n_s1, n_s2};
}

double bonferroni_threshold(double alpha, int m_comparisons) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (m_comparisons < 1) throw std::invalid_argument("need at least one comparison");
    return probit(1.0 - alpha / m_comparisons / 2.0);
}

RopeVerdict rope_classify(Interval ci, Rope rope) {
    if (ci.high < rope.low || ci.low > rope.high) return RopeVerdict::PracticallySignificant;
    if (ci.low > rope.low && ci.high < rope.high) return RopeVerdict::Negligible;
    return RopeVerdict::Inconclusive;
}

ComparisonResult z_test(double diff, double var_diff, int m_comparisons, double alpha, Rope rope) {
    if (!(var_diff > 0.0) || !std::isfinite(var_diff)) throw std::invalid_argument("z_test: variance must be > 0");
    if (!(rope.low < rope.high)) throw std::invalid_argument("z_test: ROPE needs low < high");
    ComparisonResult r;
    const double se = std::sqrt(var_diff);
    r.diff = diff;
    r.z = diff / se;
    r.alpha = alpha;
    r.m_comparisons = m_comparisons;
    r.alpha_corrected = alpha / m_comparisons;
    r.z_threshold = bonferroni_threshold(alpha, m_comparisons);
    r.statistically_significant = std::fabs(r.z) >= r.z_threshold;
    const double half = probit(1.0 - alpha / 2.0) * se;
    r.ci = {diff - half, diff + half};
    r.rope = rope;
    r.rope_verdict = rope_classify(r.ci, rope);
    return r;
}

}  // namespace metacog
