#pragma once

#include "scml/types.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace scml {

/// Input observations with optional integer class labels.
///
/// `row_ids[i]` is the original input row that produced row i, so results can be
/// mapped back after deduplication.
struct Dataset {
    Matrix points;
    std::optional<std::vector<int>> labels;
    std::vector<Index> row_ids;

    Index size() const noexcept { return static_cast<Index>(points.rows()); }
    Index dim() const noexcept { return static_cast<Index>(points.cols()); }

    /// Builds a dataset whose row ids are 0..n-1.
    static Dataset from_points(Matrix points, std::optional<std::vector<int>> labels = std::nullopt);
};

/// Maps rows removed as exact duplicates onto the first occurrence that was kept.
struct DedupMap {
    std::map<Index, Index> representative;  // removed input row -> retained input row
    IndexList retained;                     // input rows kept, in input order
    Index original_count = 0;

    static DedupMap identity(Index n);

    /// For every original row, the position of its coordinates among the retained rows.
    IndexList expansion() const;
};

/// Reads a numeric CSV. A first row in which no cell parses as a number is a header.
/// When `label_column` is set, that column becomes `labels` (integers, or strings mapped
/// to ids in order of first appearance) and is removed from the features.
Dataset load_dataset(const std::string& path, std::optional<Index> label_column = std::nullopt);

/// Parses CSV text; `load_dataset` minus the file access.
Dataset parse_dataset(const std::string& text, std::optional<Index> label_column = std::nullopt);

/// Drops exact-duplicate feature rows, keeping the first occurrence (order preserved).
std::pair<Dataset, DedupMap> deduplicate(const Dataset& d);

/// Rescales every column to [0,1]; constant columns become 0.
Dataset minmax_normalize(const Dataset& d);

/// Writes one CSV row per original input row (duplicates receive their representative's
/// coordinates). `labels` may be indexed by original rows or by retained rows.
void write_embedding(const std::string& path, const Matrix& coords,
                     const std::optional<std::vector<int>>& labels, const DedupMap& dedup);

/// Formats a real with 12 significant digits, as used for all CSV output.
std::string format_real(double value);

}  // namespace scml
