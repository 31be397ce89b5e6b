#include "pbp/factors.hpp"

#include <cmath>

#include "pbp/normal.hpp"

namespace pbp {

namespace {

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

// d/dm and d/dv of log N(target | m, base + v).
struct GaussianLogZGrad {
    double d_mean;
    double d_variance;
};

GaussianLogZGrad gaussian_log_z_grad(double target, double mean, double total_variance) {
    const double r = target - mean;
    return {r / total_variance, -0.5 / total_variance + 0.5 * r * r / (total_variance * total_variance)};
}

LogZTriple prior_triple(GaussianScalar w, GammaDist lambda) {
    return {log_z_prior_factor(w, lambda, 0), log_z_prior_factor(w, lambda, 1), log_z_prior_factor(w, lambda, 2)};
}

}  // namespace

GradientStore GradientStore::zeros_like(const NetworkPosterior& net) {
    GradientStore g;
    for (const auto& layer : net.layers) {
        g.d_mean.emplace_back(layer.rows(), layer.cols(), 0.0);
        g.d_variance.emplace_back(layer.rows(), layer.cols(), 0.0);
    }
    return g;
}

std::optional<GaussianScalar> gaussian_refine(GaussianScalar w, double d_mean, double d_variance) {
    if (w.is_uniform()) throw std::invalid_argument("gaussian_refine needs a finite variance");
    const double v = w.variance;
    GaussianScalar out{w.mean + v * d_mean, v - v * v * (d_mean * d_mean - 2.0 * d_variance)};
    if (!positive_finite(out.variance) || !std::isfinite(out.mean)) return std::nullopt;
    return out;
}

std::optional<GammaDist> gamma_refine(GammaDist g, const LogZTriple& z) {
    const double a = g.shape;
    const double b = g.rate;
    const double shape = 1.0 / (std::exp(z.log_z + z.log_z2 - 2.0 * z.log_z1) * (a + 1.0) / a - 1.0);
    const double rate =
        1.0 / (std::exp(z.log_z2 - z.log_z1) * (a + 1.0) / b - std::exp(z.log_z1 - z.log_z) * a / b);
    if (!positive_finite(shape) || !positive_finite(rate)) return std::nullopt;
    return GammaDist{shape, rate};
}

double log_z_prior_factor(GaussianScalar w, GammaDist lambda, int shift) {
    if (!(lambda.shape + shift > 1.0))
        throw CollapseError("prior-precision shape must exceed 1 to collapse the Student-t");
    if (w.is_uniform()) return -std::numeric_limits<double>::infinity();
    return normal::log_density(w.mean, 0.0, lambda.collapsed_variance(shift) + w.variance);
}

double log_z_likelihood(double y, double m_out, double v_out, GammaDist gamma, int shift) {
    if (!(gamma.shape + shift > 1.0))
        throw CollapseError("noise-precision shape must exceed 1 to collapse the Student-t");
    return normal::log_density(y, m_out, gamma.collapsed_variance(shift) + v_out);
}

GradientStore backward_gradients(const NetworkPosterior& net, const ForwardTrace& trace, double y) {
    GradientStore g = GradientStore::zeros_like(net);
    const std::size_t L = net.layers.size();
    const auto& out = trace.layers[L - 1].pre;
    const auto seed = gaussian_log_z_grad(y, out.mean[0], net.noise.collapsed_variance(0) + out.variance[0]);

    std::vector<double> ga_m{seed.d_mean};
    std::vector<double> ga_v{seed.d_variance};

    for (std::size_t l = L; l-- > 0;) {
        const auto& layer = net.layers[l];
        const auto& z = trace.layers[l].input;
        const std::size_t rows = layer.rows();
        const std::size_t cols = layer.cols();
        const double n = static_cast<double>(cols);
        const double scale = 1.0 / std::sqrt(n);

        std::vector<double> gz_m(cols, 0.0);
        std::vector<double> gz_v(cols, 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            auto M = layer.means.row(i);
            auto V = layer.variances.row(i);
            auto dM = g.d_mean[l].row(i);
            auto dV = g.d_variance[l].row(i);
            const double gm = ga_m[i];
            const double gv = ga_v[i];
            for (std::size_t j = 0; j < cols; ++j) {
                const double mz = z.mean[j];
                const double vz = z.variance[j];
                dM[j] = gm * mz * scale + gv * 2.0 * M[j] * vz / n;
                dV[j] = gv * (mz * mz + vz) / n;
                gz_m[j] += gm * M[j] * scale + gv * 2.0 * V[j] * mz / n;
                gz_v[j] += gv * (M[j] * M[j] + V[j]) / n;
            }
        }
        if (l == 0) break;

        // Through the rectifier of the previous layer; the bias entry is constant.
        const auto& prev = trace.layers[l - 1];
        const auto& aux = prev.aux;
        const std::size_t units = prev.pre.size();
        ga_m.assign(units, 0.0);
        ga_v.assign(units, 0.0);
        for (std::size_t k = 0; k < units; ++k) {
            const double gb_m = gz_m[k];
            const double gb_v = gz_v[k];
            if (aux.deterministic[k]) {
                ga_m[k] = gb_m * aux.cdf[k];
                ga_v[k] = gb_v * aux.cdf[k];
                continue;
            }
            const double s = std::sqrt(prev.pre.variance[k]);
            const double cdf = aux.cdf[k];
            const double phi_over_s = aux.gamma[k] * cdf / s;  // phi(alpha) / sqrt(v)
            const double mean_b = cdf * aux.vprime[k];
            const double dmb_dm = cdf;
            const double dmb_dv = 0.5 * phi_over_s;
            const double dvb_dm = 2.0 * mean_b * aux.ccdf[k];
            const double dvb_dv = cdf - mean_b * phi_over_s;
            ga_m[k] = gb_m * dmb_dm + gb_v * dvb_dm;
            ga_v[k] = gb_m * dmb_dv + gb_v * dvb_dv;
        }
    }
    return g;
}

PriorSiteStore::PriorSiteStore(const NetworkPosterior& net) {
    for (const auto& layer : net.layers) {
        precision_.emplace_back(layer.rows(), layer.cols(), 0.0);
        precision_mean_.emplace_back(layer.rows(), layer.cols(), 0.0);
        shape_.emplace_back(layer.rows(), layer.cols(), 0.0);
        rate_.emplace_back(layer.rows(), layer.cols(), 0.0);
    }
}

PriorSiteStore::Site PriorSiteStore::get(WeightIndex w) const {
    return {precision_[w.layer](w.row, w.col), precision_mean_[w.layer](w.row, w.col),
            shape_[w.layer](w.row, w.col), rate_[w.layer](w.row, w.col)};
}

void PriorSiteStore::set(WeightIndex w, const Site& s) {
    precision_[w.layer](w.row, w.col) = s.precision;
    precision_mean_[w.layer](w.row, w.col) = s.precision_mean;
    shape_[w.layer](w.row, w.col) = s.shape;
    rate_[w.layer](w.row, w.col) = s.rate;
}

PriorUpdate incorporate_prior_factor(NetworkPosterior& net, WeightIndex idx, PriorSiteStore& sites) {
    const GaussianScalar w = net.weight(idx);
    const GammaDist lambda = net.prior;
    auto site = sites.get(idx);

    if (w.is_uniform()) {
        // v -> infinity: m_new = m s/(s+v) -> 0, v_new = v s/(s+v) -> s, and
        // all three normalizer ratios tend to 1 so lambda is unchanged.
        if (!(lambda.shape > 1.0))
            throw CollapseError("prior-precision shape must exceed 1 to collapse the Student-t");
        const double s = lambda.collapsed_variance(0);
        net.set_weight(idx, {0.0, s});
        site.precision += 1.0 / s;
        sites.set(idx, site);
        return PriorUpdate::Applied;
    }

    const double total = lambda.collapsed_variance(0) + w.variance;
    const auto grad = gaussian_log_z_grad(0.0, w.mean, total);
    const auto refined = gaussian_refine(w, grad.d_mean, grad.d_variance);
    if (!refined) return PriorUpdate::GaussianRejected;

    site.precision += 1.0 / refined->variance - 1.0 / w.variance;
    site.precision_mean += refined->mean / refined->variance - w.mean / w.variance;
    net.set_weight(idx, *refined);

    auto result = PriorUpdate::Applied;
    if (auto g = gamma_refine(lambda, prior_triple(w, lambda))) {
        site.shape += g->shape - lambda.shape;
        site.rate += g->rate - lambda.rate;
        net.prior = *g;
    } else {
        result = PriorUpdate::GammaRejected;
    }
    sites.set(idx, site);
    return result;
}

LikelihoodUpdate incorporate_likelihood_factor(NetworkPosterior& net, std::span<const double> x, double y) {
    LikelihoodUpdate report;
    const auto fwd = forward_output_moments(net, x);
    const LogZTriple z{log_z_likelihood(y, fwd.mean, fwd.variance, net.noise, 0),
                       log_z_likelihood(y, fwd.mean, fwd.variance, net.noise, 1),
                       log_z_likelihood(y, fwd.mean, fwd.variance, net.noise, 2)};
    if (!std::isfinite(z.log_z) || !std::isfinite(z.log_z1) || !std::isfinite(z.log_z2)) {
        report.skipped = true;
        return report;
    }

    const GradientStore g = backward_gradients(net, fwd.trace, y);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto& layer = net.layers[l];
        auto means = layer.means.flat();
        auto vars = layer.variances.flat();
        auto dm = g.d_mean[l].flat();
        auto dv = g.d_variance[l].flat();
        for (std::size_t k = 0; k < means.size(); ++k) {
            auto refined = gaussian_refine({means[k], vars[k]}, dm[k], dv[k]);
            if (!refined) {
                ++report.undone;
                continue;
            }
            means[k] = refined->mean;
            vars[k] = refined->variance;
        }
    }

    if (auto gamma = gamma_refine(net.noise, z))
        net.noise = *gamma;
    else
        report.gamma_rejected = true;
    return report;
}

RefreshReport ep_refresh_prior(NetworkPosterior& net, PriorSiteStore& sites) {
    RefreshReport report;
    net.for_each_weight([&](WeightIndex idx) {
        const GaussianScalar w = net.weight(idx);
        const auto site = sites.get(idx);

        const double cav_precision = 1.0 / w.variance - site.precision;
        const double cav_precision_mean = w.mean / w.variance - site.precision_mean;
        const GammaDist cav_gamma{net.prior.shape - site.shape, net.prior.rate - site.rate};
        if (!(cav_precision > 0.0) || !(cav_gamma.shape > 1.0) || !(cav_gamma.rate > 0.0)) {
            ++report.skipped;
            return;
        }
        const GaussianScalar cavity{cav_precision_mean / cav_precision, 1.0 / cav_precision};

        const auto grad = gaussian_log_z_grad(0.0, cavity.mean, cav_gamma.collapsed_variance(0) + cavity.variance);
        const auto refined = gaussian_refine(cavity, grad.d_mean, grad.d_variance);
        const auto gamma = gamma_refine(cav_gamma, prior_triple(cavity, cav_gamma));
        if (!refined || !gamma) {
            ++report.skipped;
            return;
        }

        sites.set(idx, {1.0 / refined->variance - cav_precision,
                        refined->mean / refined->variance - cav_precision_mean, gamma->shape - cav_gamma.shape,
                        gamma->rate - cav_gamma.rate});
        net.set_weight(idx, *refined);
        net.prior = *gamma;
        ++report.refreshed;
    });
    return report;
}

}  // namespace pbp
