#pragma once

// Standard normal density, distribution function and the ratio
// phi(x) / Phi(x) used by the rectifier moment equations.

namespace pbp::normal {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLog2Pi = 1.83787706640934548356;

double pdf(double x);
double log_pdf(double x);
double cdf(double x);
double log_cdf(double x);

// phi(-x) / Phi(x), i.e. the inverse Mills ratio of -x. Below x = -30 the
// three-term asymptotic series -x - 1/x + 2/x^3 is used.
double inverse_mills(double x);

inline constexpr double kMillsSeriesThreshold = -30.0;

// Direct quotient, valid wherever Phi(x) does not underflow (x > -37).
double inverse_mills_direct(double x);
double inverse_mills_series(double x);

// log N(x | mean, variance)
double log_density(double x, double mean, double variance);

}  // namespace pbp::normal
