#include "pbp/posterior.hpp"

#include <cmath>
#include <string>

namespace pbp {

NetworkPosterior NetworkPosterior::uniform(const std::vector<std::size_t>& layer_sizes) {
    if (layer_sizes.size() < 2)
        throw InvalidArchitecture("network needs at least an input and an output layer");
    for (std::size_t k = 0; k < layer_sizes.size(); ++k)
        if (layer_sizes[k] == 0)
            throw InvalidArchitecture("layer " + std::to_string(k) + " has zero units");
    if (layer_sizes.back() != 1)
        throw InvalidArchitecture("output layer must have exactly one unit, got " +
                                  std::to_string(layer_sizes.back()));

    NetworkPosterior net;
    net.layer_sizes = layer_sizes;
    for (std::size_t k = 1; k < layer_sizes.size(); ++k)
        net.layers.emplace_back(layer_sizes[k], layer_sizes[k - 1] + 1);
    return net;
}

std::size_t NetworkPosterior::weight_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) n += layer.means.size();
    return n;
}

std::vector<std::size_t> PbpConfig::layer_sizes(std::size_t input_dim) const {
    std::vector<std::size_t> sizes{input_dim};
    sizes.insert(sizes.end(), hidden_layer_sizes.begin(), hidden_layer_sizes.end());
    sizes.push_back(1);
    return sizes;
}

void perturb_means(NetworkPosterior& net, std::mt19937_64& rng) {
    for (auto& layer : net.layers) {
        std::normal_distribution<double> eps(0.0, 1.0 / std::sqrt(static_cast<double>(layer.rows()) + 1.0));
        for (double& m : layer.means.flat()) m = eps(rng);
    }
}

bool variances_valid(const NetworkPosterior& net) {
    for (const auto& layer : net.layers)
        for (double v : layer.variances.flat())
            if (!(v > 0.0) || !std::isfinite(v)) return false;
    return true;
}

}  // namespace pbp
