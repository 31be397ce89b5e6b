#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "pbp/dataset.hpp"
#include "pbp/factors.hpp"
#include "pbp/posterior.hpp"

namespace pbp {

// Everything needed to predict with, or keep refining, a trained network.
struct Model {
    PbpConfig config;
    NetworkPosterior net;
    PriorSiteStore sites;
    NormStats norm;

    bool operator==(const Model&) const = default;
};

inline constexpr int kModelFormatVersion = 1;

class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Layout is documented in docs/model-format.md.
void write_model(std::ostream& out, const Model& model);
Model read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace pbp
