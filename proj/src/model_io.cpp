#include "pbp/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace pbp {

namespace {

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_line(std::ostream& out, const std::string& key, std::span<const double> values) {
    out << key;
    for (double v : values) out << ' ' << format_real(v);
    out << '\n';
}

void write_matrix(std::ostream& out, const std::string& key, const Matrix& m) {
    out << key << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = m.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << format_real(row[j]);
        out << '\n';
    }
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::vector<std::string> line() {
        std::string text;
        while (std::getline(in_, text)) {
            ++line_no_;
            if (!text.empty() && text.back() == '\r') text.pop_back();
            if (text.empty()) continue;
            std::istringstream ss(text);
            std::vector<std::string> tokens;
            for (std::string t; ss >> t;) tokens.push_back(t);
            return tokens;
        }
        fail("unexpected end of file");
    }

    std::vector<std::string> expect(const std::string& key, std::size_t values) {
        auto tokens = line();
        if (tokens.front() != key) fail("expected '" + key + "', found '" + tokens.front() + "'");
        if (tokens.size() != values + 1)
            fail("'" + key + "' needs " + std::to_string(values) + " values, found " +
                 std::to_string(tokens.size() - 1));
        tokens.erase(tokens.begin());
        return tokens;
    }

    double real(const std::string& s) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail("bad number '" + s + "'");
        return v;
    }

    std::uint64_t integer(const std::string& s) {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail("bad integer '" + s + "'");
        return v;
    }

    std::vector<double> reals(const std::string& key, std::size_t n) {
        std::vector<double> out;
        for (const auto& t : expect(key, n)) out.push_back(real(t));
        return out;
    }

    Matrix matrix(const std::string& key, std::size_t rows, std::size_t cols) {
        expect(key, 0);
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            const auto tokens = line();
            if (tokens.size() != cols)
                fail("matrix '" + key + "' row has " + std::to_string(tokens.size()) + " values, expected " +
                     std::to_string(cols));
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = real(tokens[j]);
        }
        return m;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ModelFormatError("model file line " + std::to_string(line_no_) + ": " + what);
    }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

}  // namespace

void write_model(std::ostream& out, const Model& model) {
    const auto& net = model.net;
    const auto& cfg = model.config;
    out << "pbp-model\n";
    out << "format_version " << kModelFormatVersion << '\n';
    out << "layer_sizes " << net.layer_sizes.size();
    for (auto s : net.layer_sizes) out << ' ' << s;
    out << '\n';
    out << "config.epochs " << cfg.epochs << '\n';
    out << "config.seed " << cfg.seed << '\n';
    out << "config.refresh_every " << cfg.refresh_every << '\n';
    write_line(out, "config.prior_lambda", std::vector{cfg.prior_shape_lambda, cfg.prior_rate_lambda});
    write_line(out, "config.prior_gamma", std::vector{cfg.prior_shape_gamma, cfg.prior_rate_gamma});
    write_line(out, "noise", std::vector{net.noise.shape, net.noise.rate});
    write_line(out, "prior", std::vector{net.prior.shape, net.prior.rate});
    write_line(out, "norm.feature_mean", model.norm.feature_mean);
    write_line(out, "norm.feature_std", model.norm.feature_std);
    write_line(out, "norm.target", std::vector{model.norm.target_mean, model.norm.target_std});
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        out << "layer " << l << ' ' << layer.rows() << ' ' << layer.cols() << '\n';
        write_matrix(out, "means", layer.means);
        write_matrix(out, "variances", layer.variances);
        write_matrix(out, "site.precision", model.sites.precision(l));
        write_matrix(out, "site.precision_mean", model.sites.precision_mean(l));
        write_matrix(out, "site.shape", model.sites.shape(l));
        write_matrix(out, "site.rate", model.sites.rate(l));
    }
    out << "end\n";
}

Model read_model(std::istream& in) {
    Reader r(in);
    if (r.line() != std::vector<std::string>{"pbp-model"}) r.fail("not a pbp model file");
    const auto version = r.integer(r.expect("format_version", 1)[0]);
    if (version != static_cast<std::uint64_t>(kModelFormatVersion))
        r.fail("unsupported format version " + std::to_string(version) + " (this build reads version " +
               std::to_string(kModelFormatVersion) + ")");

    auto sizes_line = r.line();
    if (sizes_line.size() < 2 || sizes_line[0] != "layer_sizes") r.fail("expected 'layer_sizes'");
    const auto count = r.integer(sizes_line[1]);
    if (sizes_line.size() != count + 2) r.fail("layer_sizes count does not match");
    std::vector<std::size_t> sizes;
    for (std::size_t k = 0; k < count; ++k) sizes.push_back(r.integer(sizes_line[k + 2]));

    Model m;
    try {
        m.net = NetworkPosterior::uniform(sizes);
    } catch (const InvalidArchitecture& e) {
        r.fail(e.what());
    }
    m.config.hidden_layer_sizes.assign(sizes.begin() + 1, sizes.end() - 1);
    m.config.epochs = static_cast<int>(r.integer(r.expect("config.epochs", 1)[0]));
    m.config.seed = r.integer(r.expect("config.seed", 1)[0]);
    m.config.refresh_every = r.integer(r.expect("config.refresh_every", 1)[0]);
    auto pl = r.reals("config.prior_lambda", 2);
    auto pg = r.reals("config.prior_gamma", 2);
    m.config.prior_shape_lambda = pl[0];
    m.config.prior_rate_lambda = pl[1];
    m.config.prior_shape_gamma = pg[0];
    m.config.prior_rate_gamma = pg[1];
    auto noise = r.reals("noise", 2);
    auto prior = r.reals("prior", 2);
    m.net.noise = {noise[0], noise[1]};
    m.net.prior = {prior[0], prior[1]};
    const std::size_t d = sizes.front();
    m.norm.feature_mean = r.reals("norm.feature_mean", d);
    m.norm.feature_std = r.reals("norm.feature_std", d);
    auto target = r.reals("norm.target", 2);
    m.norm.target_mean = target[0];
    m.norm.target_std = target[1];

    m.sites = PriorSiteStore(m.net);
    for (std::size_t l = 0; l < m.net.layers.size(); ++l) {
        auto& layer = m.net.layers[l];
        const auto header = r.expect("layer", 3);
        if (r.integer(header[0]) != l || r.integer(header[1]) != layer.rows() || r.integer(header[2]) != layer.cols())
            r.fail("layer " + std::to_string(l) + " header does not match layer_sizes");
        layer.means = r.matrix("means", layer.rows(), layer.cols());
        layer.variances = r.matrix("variances", layer.rows(), layer.cols());
        m.sites.precision(l) = r.matrix("site.precision", layer.rows(), layer.cols());
        m.sites.precision_mean(l) = r.matrix("site.precision_mean", layer.rows(), layer.cols());
        m.sites.shape(l) = r.matrix("site.shape", layer.rows(), layer.cols());
        m.sites.rate(l) = r.matrix("site.rate", layer.rows(), layer.cols());
    }
    r.expect("end", 0);
    return m;
}

void save_model(const std::filesystem::path& path, const Model& model) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    write_model(out, model);
    if (!out) throw DataError("error writing " + path.string());
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return read_model(in);
}

}  // namespace pbp
