#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "pbp/posterior.hpp"

namespace pbp {

// Marginal means and variances of a vector of independent random activations.
struct MomentVector {
    std::vector<double> mean;
    std::vector<double> variance;

    std::size_t size() const { return mean.size(); }
};

// Per-unit quantities of the rectifier moment map, kept for the backward pass.
struct ReluAux {
    std::vector<double> alpha;     // m / sqrt(v)
    std::vector<double> gamma;     // phi(-alpha) / Phi(alpha)
    std::vector<double> vprime;    // m + sqrt(v) * gamma
    std::vector<double> cdf;       // Phi(alpha); step(m) on the deterministic branch
    std::vector<double> ccdf;      // Phi(-alpha)
    std::vector<char> deterministic;
};

struct ReluResult {
    MomentVector out;
    ReluAux aux;
};

struct LayerTrace {
    MomentVector input;  // z_{l-1} with the bias entry appended
    MomentVector pre;    // a_l
    MomentVector post;   // b_l (empty for the output layer)
    ReluAux aux;
};

struct ForwardTrace {
    std::vector<LayerTrace> layers;
};

struct OutputMoments {
    double mean = 0.0;
    double variance = 0.0;
    ForwardTrace trace;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Below this pre-activation variance the rectifier is treated as acting on a
// point mass.
inline constexpr double kDeterministicVariance = 1e-30;

MomentVector forward_linear(const LayerPosterior& layer, const MomentVector& z);
ReluResult relu_moments(const MomentVector& a);
MomentVector append_bias(MomentVector b);

// Input vector x has length V_0 (no bias entry).
OutputMoments forward_output_moments(const NetworkPosterior& net, std::span<const double> x);

}  // namespace pbp
