#pragma once

// Standard normal distribution primitives shared by every estimator.

namespace metacog {

/// Standard normal density.
double normal_pdf(double x) noexcept;

/// Standard normal CDF, Phi(x).
double normal_cdf(double x) noexcept;

/// Upper tail 1 - Phi(x), computed without cancellation.
double normal_sf(double x) noexcept;

/// Inverse of the standard normal CDF.
///
/// Rational approximation followed by one Halley refinement against the
/// erfc-based CDF; absolute error below 1e-10 over [1e-12, 1 - 1e-12].
/// Throws std::domain_error unless 0 < p < 1.
double probit(double p);

/// Mass of N(mean, 1) between lo and hi (lo <= hi, either may be infinite).
double normal_interval_mass(double lo, double hi, double mean) noexcept;

}  // namespace metacog
