#pragma once

//! Scalar special functions shared across the library: digamma, unit-ball
//! volumes, and the standard normal CDF / quantile.

namespace elliptest {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

//! Digamma function psi(x) for x > 0. Accurate to ~1e-13 absolute.
//! Throws InvalidInput for x <= 0 or non-finite x.
double digamma(double x);

//! Volume of the unit ball in R^d: pi^{d/2} / Gamma(1 + d/2). d >= 1.
double unit_ball_volume(int d);

//! log of unit_ball_volume(d); preferred inside log-domain accumulations.
double log_unit_ball_volume(int d);

//! Standard normal CDF, evaluated via erfc for full-tail accuracy.
double normal_cdf(double x);

//! Standard normal quantile for q in (0, 1). Accurate to ~1e-14 after one
//! Halley refinement of a rational initial guess.
double normal_quantile(double q);

}  // namespace elliptest
