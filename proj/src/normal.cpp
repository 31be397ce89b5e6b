#include "pbp/normal.hpp"

#include <cmath>
#include <numbers>

namespace pbp::normal {

double pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double log_pdf(double x) { return -0.5 * kLog2Pi - 0.5 * x * x; }

double cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_cdf(double x) {
    if (x > -20.0) return std::log(cdf(x));
    // Asymptotic expansion of log Phi for large negative x.
    const double x2 = x * x;
    const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    return log_pdf(x) - std::log(-x) + std::log(series);
}

double inverse_mills_direct(double x) { return pdf(x) / cdf(x); }

double inverse_mills_series(double x) { return -x - 1.0 / x + 2.0 / (x * x * x); }

double inverse_mills(double x) {
    if (x < kMillsSeriesThreshold) return inverse_mills_series(x);
    return inverse_mills_direct(x);
}

double log_density(double x, double mean, double variance) {
    const double r = x - mean;
    return -0.5 * (kLog2Pi + std::log(variance)) - 0.5 * r * r / variance;
}

}  // namespace pbp::normal
