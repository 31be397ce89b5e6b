#pragma once

// Brute-force reference computations used to validate the moment
// propagation, the reverse-mode gradients and the Gamma moment matching.
// None of these routines call into the code paths they check.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>

#include "pbp/factors.hpp"
#include "pbp/posterior.hpp"

namespace pbp::oracle {

struct McEstimate {
    double mean = 0.0;
    double variance = 0.0;
    double mean_se = 0.0;
    double variance_se = 0.0;
    std::size_t samples = 0;
};

// Sample moments of an arbitrary scalar sample.
McEstimate moments_of(std::span<const double> xs);

// Draws W ~ q, evaluates the deterministic scaled ReLU network at x and
// returns the sample moments of the output. Work is split into `chunks`
// independent substreams of `seed`, merged in chunk order.
McEstimate mc_forward_moments(const NetworkPosterior& net, std::span<const double> x, std::size_t samples,
                              std::uint64_t seed, std::size_t chunks = 8);

// max(0, X) with X ~ N(mean, variance).
McEstimate mc_relu_moments(double mean, double variance, std::size_t samples, std::uint64_t seed);

// Central differences of the shift-0 likelihood log normalizer with respect
// to every weight mean and variance; step = rel_step * max(1, |theta|).
GradientStore fd_logz_gradients(const NetworkPosterior& net, std::span<const double> x, double y,
                                double rel_step = 1e-5);

struct TiltedGamma {
    double log_z = 0.0;   // log of integral f(lambda) Gam(lambda | a, b)
    double log_z1 = 0.0;  // same with shape a + 1
    double log_z2 = 0.0;  // same with shape a + 2
    double mean = 0.0;    // E[lambda] under f(lambda) Gam(lambda | a, b) / Z
    double second = 0.0;  // E[lambda^2]
    double error = 0.0;   // largest relative error estimate over the integrals
};

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Adaptive Gauss-Kronrod quadrature on the log(lambda) axis.
TiltedGamma gamma_tilted_moments_quadrature(GammaDist g, const std::function<double(double)>& log_factor,
                                            double rel_tol = 1e-9);

// Exact posterior of N(w | m0, v0) times N(obs | w, noise_var).
GaussianScalar conjugate_gaussian_posterior(GaussianScalar prior, double obs, double noise_var);

}  // namespace pbp::oracle
