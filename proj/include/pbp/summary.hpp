#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace pbp {

struct Summary {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(n)
};

inline Summary summarize(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("summary of an empty sample");
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    if (xs.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace pbp
