#include "metacog/normal.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace metacog {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrt2Pi = 2.50662827463100050242;

// Acklam's coefficients; relative error ~1.2e-9 before refinement.
constexpr std::array<double, 6> kA{-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
constexpr std::array<double, 5> kB{-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
constexpr std::array<double, 6> kC{-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
constexpr std::array<double, 4> kD{7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
constexpr double kLowBreak = 0.02425;

// Lower half only (0 < p <= 0.5); the upper half is handled by symmetry so
// the residual Phi(x) - p is always evaluated where erfc is relatively exact.
double probit_lower(double p) {
    double x;
    if (p < kLowBreak) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
            ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((kA[0] * r + kA[1]) * r + kA[2]) * r + kA[3]) * r + kA[4]) * r + kA[5]) * q /
            (((((kB[0] * r + kB[1]) * r + kB[2]) * r + kB[3]) * r + kB[4]) * r + 1.0);
    }
    if (x == 0.0) return x;
    // Halley step.
    const double e = normal_cdf(x) - p;
    const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace

double normal_pdf(double x) noexcept { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x * kInvSqrt2); }

double probit(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("probit: probability must lie in (0, 1), got " + std::to_string(p));
    }
    if (p > 0.5) return -probit_lower(1.0 - p);
    return probit_lower(p);
}

double normal_interval_mass(double lo, double hi, double mean) noexcept {
    const double a = lo - mean;
    const double b = hi - mean;
    if (a >= b) return 0.0;
    // Difference of upper tails when the interval sits right of the mean.
    if (a > 0.0) return normal_sf(a) - normal_sf(b);
    return normal_cdf(b) - normal_cdf(a);
}

}  // namespace metacog
