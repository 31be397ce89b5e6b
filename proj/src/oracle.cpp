#include "pbp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pbp/parallel.hpp"

namespace pbp::oracle {

namespace {

std::mt19937_64 chunk_stream(std::uint64_t seed, std::size_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), 0x6f7261u};
    return std::mt19937_64(seq);
}

// One draw of the network output with weights sampled from q.
double sampled_output(const NetworkPosterior& net, std::span<const double> x, std::mt19937_64& rng,
                      std::vector<double>& z, std::vector<double>& next) {
    std::normal_distribution<double> std_normal;
    z.assign(x.begin(), x.end());
    z.push_back(1.0);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        const bool hidden = l + 1 < net.layers.size();
        next.assign(layer.rows(), 0.0);
        for (std::size_t i = 0; i < layer.rows(); ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < layer.cols(); ++j) {
                const double w = layer.means(i, j) + std::sqrt(layer.variances(i, j)) * std_normal(rng);
                acc += w * z[j];
            }
            acc /= std::sqrt(static_cast<double>(layer.cols()));
            next[i] = hidden ? std::max(acc, 0.0) : acc;
        }
        z.swap(next);
        if (hidden) z.push_back(1.0);
    }
    return z[0];
}

}  // namespace

McEstimate moments_of(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double x : xs) {
        const double d2 = (x - mean) * (x - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    McEstimate e;
    e.samples = xs.size();
    e.mean = mean;
    e.variance = m2 / (n - 1.0);
    m2 /= n;
    m4 /= n;
    e.mean_se = std::sqrt(e.variance / n);
    e.variance_se = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
    return e;
}

McEstimate mc_forward_moments(const NetworkPosterior& net, std::span<const double> x, std::size_t samples,
                              std::uint64_t seed, std::size_t chunks) {
    chunks = std::max<std::size_t>(1, std::min(chunks, samples));
    std::vector<double> out(samples);
    parallel_map(chunks, std::thread::hardware_concurrency(), [&](std::size_t c) {
        auto rng = chunk_stream(seed, c);
        std::vector<double> z, next;
        const std::size_t begin = c * samples / chunks;
        const std::size_t end = (c + 1) * samples / chunks;
        for (std::size_t s = begin; s < end; ++s) out[s] = sampled_output(net, x, rng, z, next);
        return 0;
    });
    return moments_of(out);
}

McEstimate mc_relu_moments(double mean, double variance, std::size_t samples, std::uint64_t seed) {
    auto rng = chunk_stream(seed, 0);
    std::normal_distribution<double> dist(mean, std::sqrt(variance));
    std::vector<double> out(samples);
    for (double& v : out) v = std::max(dist(rng), 0.0);
    return moments_of(out);
}

GradientStore fd_logz_gradients(const NetworkPosterior& net, std::span<const double> x, double y, double rel_step) {
    if (!(rel_step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    GradientStore g = GradientStore::zeros_like(net);
    NetworkPosterior probe = net;

    auto log_z = [&] {
        const auto out = forward_output_moments(probe, x);
        return log_z_likelihood(y, out.mean, out.variance, probe.noise, 0);
    };
    auto central = [&](double& theta) {
        const double saved = theta;
        const double h = rel_step * std::max(1.0, std::abs(saved));
        if (saved + h == saved) throw std::invalid_argument("finite-difference step underflows");
        theta = saved + h;
        const double up = log_z();
        theta = saved - h;
        const double down = log_z();
        theta = saved;
        return (up - down) / (2.0 * h);
    };

    for (std::size_t l = 0; l < probe.layers.size(); ++l) {
        auto means = probe.layers[l].means.flat();
        auto vars = probe.layers[l].variances.flat();
        for (std::size_t k = 0; k < means.size(); ++k) {
            g.d_mean[l].flat()[k] = central(means[k]);
            g.d_variance[l].flat()[k] = central(vars[k]);
        }
    }
    return g;
}

TiltedGamma gamma_tilted_moments_quadrature(GammaDist g, const std::function<double(double)>& log_factor,
                                            double rel_tol) {
    using boost::math::quadrature::gauss_kronrod;
    const double a = g.shape;
    const double b = g.rate;
    const double inf = std::numeric_limits<double>::infinity();

    // log of lambda^k * f(lambda) * Gam(lambda | a, b) * lambda (the Jacobian of t = log lambda),
    // up to the Gamma normalizer b^a / Gamma(a).
    auto log_integrand = [&](double t, int k) { return (a + k) * t - b * std::exp(t) + log_factor(std::exp(t)); };

    const double mode = std::log(a / b);
    const double shift = log_integrand(mode, 0);
    const double log_norm = a * std::log(b) - std::lgamma(a);

    TiltedGamma out;
    double raw[3];
    for (int k = 0; k < 3; ++k) {
        double err = 0.0;
        auto f = [&](double t) {
            const double v = std::exp(log_integrand(t, k) - shift);
            return std::isfinite(v) ? v : 0.0;
        };
        raw[k] = gauss_kronrod<double, 31>::integrate(f, -inf, inf, 20, rel_tol, &err);
        if (!(raw[k] > 0.0) || !std::isfinite(raw[k])) throw QuadratureError("tilted Gamma integral did not converge");
        out.error = std::max(out.error, err / raw[k]);
    }
    if (out.error > 10.0 * rel_tol) throw QuadratureError("tilted Gamma integral missed its tolerance");

    // Z_k = int f Gam(a + k, b) = raw_k * b^k * Gamma(a) / Gamma(a + k), all scaled by exp(shift) * norm.
    const double log_z = std::log(raw[0]) + shift + log_norm;
    out.log_z = log_z;
    out.log_z1 = std::log(raw[1]) + shift + log_norm + std::log(b) - std::log(a);
    out.log_z2 = std::log(raw[2]) + shift + log_norm + 2.0 * std::log(b) - std::log(a) - std::log(a + 1.0);
    out.mean = raw[1] / raw[0];
    out.second = raw[2] / raw[0];
    return out;
}

GaussianScalar conjugate_gaussian_posterior(GaussianScalar prior, double obs, double noise_var) {
    const double precision = 1.0 / prior.variance + 1.0 / noise_var;
    return {(prior.mean / prior.variance + obs / noise_var) / precision, 1.0 / precision};
}

}  // namespace pbp::oracle
