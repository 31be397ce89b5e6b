#include "pbp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace pbp {

namespace {

std::string trim(std::string_view s) {
    const auto* ws = " \t\r\n\"";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

RawTable read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    RawTable table;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);

        if (table.header.empty() && table.rows.empty()) {
            double probe;
            const bool numeric = std::all_of(fields.begin(), fields.end(),
                                             [&](const std::string& f) { return parse_double(f, probe); });
            if (!numeric) {
                table.header = std::move(fields);
                width = table.header.size();
                continue;
            }
        }
        if (width == 0) width = fields.size();
        if (fields.size() != width)
            throw DataError(path.string() + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " + std::to_string(width));

        std::vector<double> row(width);
        for (std::size_t c = 0; c < width; ++c) {
            if (!parse_double(fields[c], row[c]) || !std::isfinite(row[c]))
                throw DataError(path.string() + ": row " + std::to_string(table.rows.size() + 1) + " (line " +
                                std::to_string(line_no) + "), column " + std::to_string(c + 1) +
                                ": not a finite number: '" + fields[c] + "'");
        }
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) throw DataError(path.string() + ": no data rows");
    return table;
}

std::size_t resolve_target(const RawTable& t, const std::string& selector, const std::string& source) {
    const std::size_t width = t.rows.front().size();
    if (selector == "last") return width - 1;
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(selector.data(), selector.data() + selector.size(), idx);
    if (ec == std::errc() && ptr == selector.data() + selector.size()) {
        if (idx >= width)
            throw DataError(source + ": target column index " + selector + " out of range (" +
                            std::to_string(width) + " columns)");
        return idx;
    }
    const auto it = std::find(t.header.begin(), t.header.end(), selector);
    if (it == t.header.end()) throw DataError(source + ": no column named '" + selector + "'");
    return static_cast<std::size_t>(it - t.header.begin());
}

}  // namespace

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.features = Matrix(rows.size(), dim());
    out.targets.reserve(rows.size());
    out.feature_names = feature_names;
    out.target_name = target_name;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto src = features.row(rows[r]);
        std::copy(src.begin(), src.end(), out.features.row(r).begin());
        out.targets.push_back(targets[rows[r]]);
    }
    return out;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column) {
    const RawTable t = read_table(path);
    const std::size_t width = t.rows.front().size();
    if (width < 2) throw DataError(path.string() + ": need at least one feature and a target column");
    const std::size_t target = resolve_target(t, target_column, path.string());

    Dataset d;
    d.features = Matrix(t.rows.size(), width - 1);
    d.targets.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        std::size_t k = 0;
        for (std::size_t c = 0; c < width; ++c) {
            if (c == target)
                d.targets.push_back(t.rows[r][c]);
            else
                d.features(r, k++) = t.rows[r][c];
        }
    }
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (c == target)
            d.target_name = t.header[c];
        else
            d.feature_names.push_back(t.header[c]);
    }
    return d;
}

Matrix load_feature_csv(const std::filesystem::path& path) {
    const RawTable t = read_table(path);
    Matrix m(t.rows.size(), t.rows.front().size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) std::copy(t.rows[r].begin(), t.rows[r].end(), m.row(r).begin());
    return m;
}

TrainTestSplit split(const Dataset& data, double test_fraction, std::mt19937_64& rng) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("test fraction must lie strictly between 0 and 1");
    const std::size_t n = data.size();
    const auto n_train = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * (1.0 - test_fraction)));
    if (n_train == 0 || n_train >= n)
        throw std::invalid_argument("split of " + std::to_string(n) + " rows leaves an empty part");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);

    TrainTestSplit s;
    s.train_rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test_rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    s.train = data.subset(s.train_rows);
    s.test = data.subset(s.test_rows);
    return s;
}

NormStats NormStats::identity(std::size_t dim) {
    NormStats s;
    s.feature_mean.assign(dim, 0.0);
    s.feature_std.assign(dim, 1.0);
    return s;
}

NormStats NormStats::fit(const Dataset& train) {
    const std::size_t n = train.size();
    const std::size_t d = train.dim();
    if (n == 0) throw DataError("cannot normalize an empty training set");

    auto population_std = [](double sum_sq, double count) {
        const double sd = std::sqrt(sum_sq / count);
        return sd > 0.0 ? sd : 1.0;
    };

    NormStats s;
    s.feature_mean.assign(d, 0.0);
    s.feature_std.assign(d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) s.feature_mean[c] += train.features(r, c);
    for (double& m : s.feature_mean) m /= static_cast<double>(n);
    for (std::size_t c = 0; c < d; ++c) {
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double e = train.features(r, c) - s.feature_mean[c];
            ss += e * e;
        }
        s.feature_std[c] = population_std(ss, static_cast<double>(n));
    }

    s.target_mean = std::accumulate(train.targets.begin(), train.targets.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double y : train.targets) ss += (y - s.target_mean) * (y - s.target_mean);
    s.target_std = population_std(ss, static_cast<double>(n));
    return s;
}

std::vector<double> NormStats::normalize_features(std::span<const double> x) const {
    if (x.size() != feature_mean.size())
        throw DataError("expected " + std::to_string(feature_mean.size()) + " features, got " +
                        std::to_string(x.size()));
    std::vector<double> out(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) out[c] = (x[c] - feature_mean[c]) / feature_std[c];
    return out;
}

Dataset apply(const NormStats& stats, const Dataset& data) {
    Dataset out = data;
    for (std::size_t r = 0; r < data.size(); ++r) {
        const auto x = stats.normalize_features(data.features.row(r));
        std::copy(x.begin(), x.end(), out.features.row(r).begin());
        out.targets[r] = stats.normalize_target(data.targets[r]);
    }
    return out;
}

Normalized normalize(const Dataset& train) {
    Normalized n;
    n.stats = NormStats::fit(train);
    n.data = apply(n.stats, train);
    return n;
}

}  // namespace pbp
