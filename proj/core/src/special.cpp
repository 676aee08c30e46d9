#include "elliptest/special.hpp"

#include <cmath>

#include "elliptest/errors.hpp"

namespace elliptest {

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw InvalidInput("digamma requires a finite argument > 0");
  }
  // Upward recurrence psi(x) = psi(x+1) - 1/x until the asymptotic series is
  // accurate, then the Stirling-type expansion in 1/x^2.
  double acc = 0.0;
  while (x < 8.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli-number coefficients of the asymptotic series. Truncation error
  // at x >= 8 is below 1e-13.
  double series = inv2 * (1.0 / 12.0 + inv2 * (-1.0 / 120.0 + inv2 * (1.0 / 252.0 + inv2 * (-1.0 / 240.0 + inv2 * (1.0 / 132.0 + inv2 * (-691.0 / 32760.0 + inv2 * (1.0 / 12.0)))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

double unit_ball_volume(int d) {
  return std::exp(log_unit_ball_volume(d));
}

double log_unit_ball_volume(int d) {
  if (d < 1) {
    throw InvalidInput("unit_ball_volume requires dimension >= 1");
  }
  const double half = 0.5 * static_cast<double>(d);
  return half * std::log(M_PI) - std::lgamma(1.0 + half);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

namespace {

// Rational approximation initial guess (Acklam-style) for the normal quantile.
double quantile_guess(double q) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01, -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double plow = 0.02425;
  if (q < plow) {
    const double r = std::sqrt(-2.0 * std::log(q));
    return (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
           ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  }
  if (q > 1.0 - plow) {
    const double r = std::sqrt(-2.0 * std::log(1.0 - q));
    return -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
           ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  }
  const double r = q - 0.5;
  const double s = r * r;
  return (((((a[0] * s + a[1]) * s + a[2]) * s + a[3]) * s + a[4]) * s + a[5]) * r /
         (((((b[0] * s + b[1]) * s + b[2]) * s + b[3]) * s + b[4]) * s + 1.0);
}

}  // namespace

double normal_quantile(double q) {
  if (!(q > 0.0) || !(q < 1.0)) {
    throw InvalidInput("normal_quantile requires q in (0, 1)");
  }
  double x = quantile_guess(q);
  // One Halley step against the exact CDF pins the result to ~1e-14.
  const double err = normal_cdf(x) - q;
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  if (pdf > 0.0) {
    const double u = err / pdf;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

}  // namespace elliptest
