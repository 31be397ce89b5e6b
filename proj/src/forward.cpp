#include "pbp/forward.hpp"

#include <cmath>
#include <string>

#include "pbp/normal.hpp"

namespace pbp {

MomentVector forward_linear(const LayerPosterior& layer, const MomentVector& z) {
    const std::size_t cols = layer.cols();
    if (z.size() != cols || z.variance.size() != cols)
        throw DimensionMismatch("layer expects " + std::to_string(cols) + " inputs, got " +
                                std::to_string(z.size()));
    const double n = static_cast<double>(cols);
    const double scale = 1.0 / std::sqrt(n);

    MomentVector a;
    a.mean.resize(layer.rows());
    a.variance.resize(layer.rows());
    for (std::size_t i = 0; i < layer.rows(); ++i) {
        auto m = layer.means.row(i);
        auto v = layer.variances.row(i);
        double mean = 0.0;
        double var = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            const double mz = z.mean[j];
            const double vz = z.variance[j];
            mean += m[j] * mz;
            var += m[j] * m[j] * vz + v[j] * (mz * mz + vz);
        }
        a.mean[i] = mean * scale;
        a.variance[i] = var / n;
    }
    return a;
}

ReluResult relu_moments(const MomentVector& a) {
    const std::size_t n = a.size();
    ReluResult r;
    r.out.mean.resize(n);
    r.out.variance.resize(n);
    auto& aux = r.aux;
    aux.alpha.assign(n, 0.0);
    aux.gamma.assign(n, 0.0);
    aux.vprime.assign(n, 0.0);
    aux.cdf.assign(n, 0.0);
    aux.ccdf.assign(n, 0.0);
    aux.deterministic.assign(n, 0);

    for (std::size_t i = 0; i < n; ++i) {
        const double m = a.mean[i];
        const double v = a.variance[i];
        if (v < 0.0 || std::isnan(v))
            throw std::domain_error("negative pre-activation variance at unit " + std::to_string(i));
        if (v < kDeterministicVariance) {
            aux.deterministic[i] = 1;
            aux.cdf[i] = m > 0.0 ? 1.0 : 0.0;
            aux.ccdf[i] = 1.0 - aux.cdf[i];
            r.out.mean[i] = m > 0.0 ? m : 0.0;
            r.out.variance[i] = 0.0;
            continue;
        }
        const double s = std::sqrt(v);
        const double alpha = m / s;
        const double gamma = normal::inverse_mills(alpha);
        const double vprime = m + s * gamma;
        const double cdf = normal::cdf(alpha);
        const double ccdf = normal::cdf(-alpha);
        const double mean_b = cdf * vprime;
        const double var_b = mean_b * vprime * ccdf + cdf * v * (1.0 - gamma * (gamma + alpha));

        aux.alpha[i] = alpha;
        aux.gamma[i] = gamma;
        aux.vprime[i] = vprime;
        aux.cdf[i] = cdf;
        aux.ccdf[i] = ccdf;
        r.out.mean[i] = mean_b;
        r.out.variance[i] = var_b > 0.0 ? var_b : 0.0;
    }
    return r;
}

MomentVector append_bias(MomentVector b) {
    b.mean.push_back(1.0);
    b.variance.push_back(0.0);
    return b;
}

OutputMoments forward_output_moments(const NetworkPosterior& net, std::span<const double> x) {
    if (x.size() != net.input_dim())
        throw DimensionMismatch("expected " + std::to_string(net.input_dim()) + " features, got " +
                                std::to_string(x.size()));
    OutputMoments out;
    out.trace.layers.resize(net.layers.size());

    MomentVector z;
    z.mean.assign(x.begin(), x.end());
    z.variance.assign(x.size(), 0.0);
    z = append_bias(std::move(z));

    const std::size_t last = net.layers.size() - 1;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto& rec = out.trace.layers[l];
        rec.input = std::move(z);
        rec.pre = forward_linear(net.layers[l], rec.input);
        if (l == last) break;
        auto relu = relu_moments(rec.pre);
        rec.post = std::move(relu.out);
        rec.aux = std::move(relu.aux);
        z = append_bias(rec.post);
    }
    out.mean = out.trace.layers[last].pre.mean[0];
    out.variance = out.trace.layers[last].pre.variance[0];
    return out;
}

}  // namespace pbp
