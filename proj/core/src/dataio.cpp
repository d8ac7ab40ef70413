#include "scml/dataio.hpp"

#include "scml/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace scml {

namespace {

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"')) {
        s.remove_suffix(1);
    }
    return s;
}

std::optional<double> parse_number(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) {
        return std::nullopt;
    }
    if (cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            nl = text.size();
        }
        auto line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        start = nl + 1;
    }
    // Trailing blank lines are not rows.
    while (!lines.empty() && trim(lines.back()).empty()) {
        lines.pop_back();
    }
    return lines;
}

struct RowHash {
    std::size_t operator()(const std::vector<double>& row) const noexcept {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (double v : row) {
            // +0.0 and -0.0 compare equal and must hash equal.
            const double canonical = (v == 0.0) ? 0.0 : v;
            h ^= std::hash<double>{}(canonical) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

}  // namespace

Dataset Dataset::from_points(Matrix points, std::optional<std::vector<int>> labels) {
    Dataset d;
    d.row_ids.resize(static_cast<std::size_t>(points.rows()));
    for (std::size_t i = 0; i < d.row_ids.size(); ++i) {
        d.row_ids[i] = i;
    }
    d.points = std::move(points);
    d.labels = std::move(labels);
    return d;
}

DedupMap DedupMap::identity(Index n) {
    DedupMap m;
    m.original_count = n;
    m.retained.resize(n);
    for (Index i = 0; i < n; ++i) {
        m.retained[i] = i;
    }
    return m;
}

IndexList DedupMap::expansion() const {
    constexpr Index unset = static_cast<Index>(-1);
    IndexList position_of(original_count, unset);
    for (Index pos = 0; pos < retained.size(); ++pos) {
        position_of[retained[pos]] = pos;
    }
    for (const auto& [removed, rep] : representative) {
        position_of[removed] = position_of[rep];
    }
    for (Index r = 0; r < original_count; ++r) {
        if (position_of[r] == unset) {
            throw InvalidArgument("dedup map does not cover original row " + std::to_string(r));
        }
    }
    return position_of;
}

Dataset parse_dataset(const std::string& text, std::optional<Index> label_column) {
    const auto lines = split_lines(text);
    if (lines.empty()) {
        throw EmptyDataset();
    }

    std::size_t first = 0;
    {
        const auto cells = split_cells(lines[0]);
        bool any_numeric = false;
        for (auto c : cells) {
            any_numeric = any_numeric || parse_number(c).has_value();
        }
        if (!any_numeric) {
            first = 1;
        }
    }

    const std::size_t width = split_cells(lines[first < lines.size() ? first : 0]).size();
    if (label_column && *label_column >= width) {
        throw InvalidArgument("label column " + std::to_string(*label_column) + " out of range (" +
                              std::to_string(width) + " columns)");
    }
    const std::size_t feature_count = width - (label_column ? 1 : 0);

    std::vector<double> values;
    std::vector<int> labels;
    std::unordered_map<std::string, int> label_ids;
    std::size_t rows = 0;
    for (std::size_t li = first; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) {
            continue;
        }
        const auto cells = split_cells(lines[li]);
        if (cells.size() != width) {
            throw ParseError(rows, std::min(cells.size(), width),
                             "expected " + std::to_string(width) + " cells, found " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < width; ++c) {
            if (label_column && c == *label_column) {
                const auto cell = trim(cells[c]);
                const auto num = parse_number(cell);
                if (num && *num == std::floor(*num)) {
                    labels.push_back(static_cast<int>(*num));
                } else {
                    if (cell.empty()) {
                        throw ParseError(rows, c, "empty label");
                    }
                    auto [it, inserted] = label_ids.try_emplace(std::string(cell), static_cast<int>(label_ids.size()));
                    labels.push_back(it->second);
                }
                continue;
            }
            const auto num = parse_number(cells[c]);
            if (!num) {
                throw ParseError(rows, c, "non-numeric cell '" + std::string(cells[c]) + "'");
            }
            values.push_back(*num);
        }
        ++rows;
    }
    if (rows == 0) {
        throw EmptyDataset();
    }

    Matrix points(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(feature_count));
    std::copy(values.begin(), values.end(), points.data());
    std::optional<std::vector<int>> lab;
    if (label_column) {
        lab = std::move(labels);
    }
    return Dataset::from_points(std::move(points), std::move(lab));
}

Dataset load_dataset(const std::string& path, std::optional<Index> label_column) {
    if (!std::filesystem::is_regular_file(path)) {
        throw FileNotFound(path);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FileNotFound(path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str(), label_column);
}

std::pair<Dataset, DedupMap> deduplicate(const Dataset& d) {
    const Index n = d.size();
    const auto dim = d.points.cols();
    std::unordered_map<std::vector<double>, Index, RowHash> first_seen;
    first_seen.reserve(n);

    DedupMap map;
    map.original_count = n;
    std::vector<Eigen::Index> keep;
    std::vector<double> row(static_cast<std::size_t>(dim));
    for (Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            const double v = d.points(static_cast<Eigen::Index>(i), c);
            row[static_cast<std::size_t>(c)] = (v == 0.0) ? 0.0 : v;
        }
        auto [it, inserted] = first_seen.try_emplace(row, i);
        if (inserted) {
            keep.push_back(static_cast<Eigen::Index>(i));
            map.retained.push_back(i);
        } else {
            map.representative.emplace(i, it->second);
        }
    }

    Dataset out;
    out.points.resize(static_cast<Eigen::Index>(keep.size()), dim);
    for (std::size_t r = 0; r < keep.size(); ++r) {
        out.points.row(static_cast<Eigen::Index>(r)) = d.points.row(keep[r]);
    }
    out.row_ids.reserve(keep.size());
    for (auto k : keep) {
        out.row_ids.push_back(d.row_ids.empty() ? static_cast<Index>(k) : d.row_ids[static_cast<std::size_t>(k)]);
    }
    if (d.labels) {
        std::vector<int> lab;
        lab.reserve(keep.size());
        for (auto k : keep) {
            lab.push_back((*d.labels)[static_cast<std::size_t>(k)]);
        }
        out.labels = std::move(lab);
    }
    return {std::move(out), std::move(map)};
}

Dataset minmax_normalize(const Dataset& d) {
    Dataset out = d;
    for (Eigen::Index c = 0; c < out.points.cols(); ++c) {
        auto col = out.points.col(c);
        if (col.size() == 0) {
            continue;
        }
        const double lo = col.minCoeff();
        const double hi = col.maxCoeff();
        const double range = hi - lo;
        if (range > 0.0) {
            col = (col.array() - lo) / range;
        } else {
            col.setZero();
        }
    }
    return out;
}

std::string format_real(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

void write_embedding(const std::string& path, const Matrix& coords,
                     const std::optional<std::vector<int>>& labels, const DedupMap& dedup) {
    if (static_cast<Index>(coords.rows()) != dedup.retained.size()) {
        throw InvalidArgument("coordinate rows (" + std::to_string(coords.rows()) +
                              ") do not match retained rows (" + std::to_string(dedup.retained.size()) + ")");
    }
    const IndexList position = dedup.expansion();
    if (labels && labels->size() != dedup.original_count && labels->size() != dedup.retained.size()) {
        throw InvalidArgument("label count matches neither original nor retained rows");
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    std::string line;
    for (Index r = 0; r < dedup.original_count; ++r) {
        line.clear();
        const auto row = coords.row(static_cast<Eigen::Index>(position[r]));
        for (Eigen::Index c = 0; c < row.size(); ++c) {
            if (c > 0) {
                line += ',';
            }
            line += format_real(row[c]);
        }
        if (labels) {
            const int label = labels->size() == dedup.original_count ? (*labels)[r] : (*labels)[position[r]];
            line += ',';
            line += std::to_string(label);
        }
        line += '\n';
        out << line;
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

}  // namespace scml
