#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pbp/forward.hpp"
#include "pbp/matrix.hpp"
#include "pbp/posterior.hpp"

namespace pbp {

// log Z, and log Z with the Gamma shape raised by one and by two.
struct LogZTriple {
    double log_z = 0.0;
    double log_z1 = 0.0;
    double log_z2 = 0.0;
};

struct GradientStore {
    std::vector<Matrix> d_mean;
    std::vector<Matrix> d_variance;

    static GradientStore zeros_like(const NetworkPosterior& net);
};

// Moment-matching refinement of N(m, v) from the gradients of log Z.
// Returns nullopt when the refined variance is not strictly positive and finite.
std::optional<GaussianScalar> gaussian_refine(GaussianScalar w, double d_mean, double d_variance);

// Gamma update matching the first two moments of the tilted distribution.
// Returns nullopt when the result is not a valid Gamma.
std::optional<GammaDist> gamma_refine(GammaDist g, const LogZTriple& z);

class CollapseError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// log N(m | 0, rate/(shape+shift-1) + v): the prior factor integrated against
// the weight marginal and the prior-precision Gamma.
double log_z_prior_factor(GaussianScalar w, GammaDist lambda, int shift);

// log N(y | m_out, rate/(shape+shift-1) + v_out).
double log_z_likelihood(double y, double m_out, double v_out, GammaDist gamma, int shift);

// Exact d log Z / d (mean, variance) of every weight, log Z being the
// likelihood normalizer with shift 0.
GradientStore backward_gradients(const NetworkPosterior& net, const ForwardTrace& trace, double y);

// Approximate factors for the weight priors, in natural parameters. The
// Gamma part of each site is stored as additive contributions to the shape
// and the rate of the prior-precision posterior.
class PriorSiteStore {
public:
    PriorSiteStore() = default;
    explicit PriorSiteStore(const NetworkPosterior& net);

    struct Site {
        double precision = 0.0;
        double precision_mean = 0.0;
        double shape = 0.0;
        double rate = 0.0;
        bool operator==(const Site&) const = default;
    };

    Site get(WeightIndex w) const;
    void set(WeightIndex w, const Site& s);

    std::size_t layer_count() const { return precision_.size(); }
    const Matrix& precision(std::size_t l) const { return precision_[l]; }
    const Matrix& precision_mean(std::size_t l) const { return precision_mean_[l]; }
    const Matrix& shape(std::size_t l) const { return shape_[l]; }
    const Matrix& rate(std::size_t l) const { return rate_[l]; }
    Matrix& precision(std::size_t l) { return precision_[l]; }
    Matrix& precision_mean(std::size_t l) { return precision_mean_[l]; }
    Matrix& shape(std::size_t l) { return shape_[l]; }
    Matrix& rate(std::size_t l) { return rate_[l]; }

    bool operator==(const PriorSiteStore&) const = default;

private:
    std::vector<Matrix> precision_;
    std::vector<Matrix> precision_mean_;
    std::vector<Matrix> shape_;
    std::vector<Matrix> rate_;
};

enum class PriorUpdate { Applied, GaussianRejected, GammaRejected };

// ADF incorporation of one weight's prior factor N(w | 0, 1/lambda).
// A weight in the uniform state takes the closed-form limit v -> infinity.
// On a rejected Gaussian update nothing changes; a rejected Gamma update
// keeps lambda but still applies the Gaussian part.
PriorUpdate incorporate_prior_factor(NetworkPosterior& net, WeightIndex w, PriorSiteStore& sites);

struct LikelihoodUpdate {
    bool skipped = false;        // non-finite log Z, nothing changed
    std::size_t undone = 0;      // weights whose update was rolled back
    bool gamma_rejected = false;
};

// ADF incorporation of the likelihood factor for one (normalized) example.
LikelihoodUpdate incorporate_likelihood_factor(NetworkPosterior& net, std::span<const double> x, double y);

struct RefreshReport {
    std::size_t refreshed = 0;
    std::size_t skipped = 0;
};

// One EP sweep over all prior sites: remove site, recompute tilted moments
// from the cavity, store the new site.
RefreshReport ep_refresh_prior(NetworkPosterior& net, PriorSiteStore& sites);

}  // namespace pbp
