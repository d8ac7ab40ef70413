#pragma once

#include "scml/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace scml {

/// Fixed-degree neighbor lists, one row per query point, nearest first.
struct NeighborGraph {
    Index n = 0;
    Index k = 0;
    IndexList indices;              // n*k, row-major
    std::vector<double> distances;  // n*k Euclidean distances

    std::span<const Index> neighbors(Index i) const { return {indices.data() + i * k, k}; }
    std::span<const double> dists(Index i) const { return {distances.data() + i * k, k}; }
};

/// Reverse-neighbor counts: counts[u] is the number of rows listing u as a neighbor.
struct RnnCounts {
    std::vector<Index> counts;
};

struct Neighbor {
    Index index;
    double sq_dist;

    friend bool operator<(const Neighbor& a, const Neighbor& b) {
        return a.sq_dist < b.sq_dist || (a.sq_dist == b.sq_dist && a.index < b.index);
    }
};

/// Exact Euclidean nearest-neighbor index. Uses a k-d tree up to `kd_tree_max_dim`
/// dimensions and a linear scan above it. Ties are broken by ascending point index,
/// so both paths return identical results.
class KnnIndex {
public:
    static constexpr Eigen::Index kd_tree_max_dim = 16;

    explicit KnnIndex(Matrix points);

    Index size() const noexcept { return static_cast<Index>(points_.rows()); }
    Eigen::Index dim() const noexcept { return points_.cols(); }
    bool uses_tree() const noexcept { return !nodes_.empty(); }
    const Matrix& points() const noexcept { return points_; }

    /// The k nearest stored points to `query`, ascending by (distance, index).
    /// `exclude` removes one stored index from consideration.
    std::vector<Neighbor> query(std::span<const double> query, Index k,
                                std::optional<Index> exclude = std::nullopt) const;

private:
    struct Node {
        Index begin;
        Index end;
        Eigen::Index split_dim;  // -1 for leaves
        double split_value;
        int left;
        int right;
    };

    int build(Index begin, Index end);
    void search(int node, const double* q, Index k, std::optional<Index> exclude,
                std::vector<Neighbor>& heap) const;
    void scan(Index begin, Index end, const double* q, Index k, std::optional<Index> exclude,
              std::vector<Neighbor>& heap) const;

    Matrix points_;
    IndexList order_;
    std::vector<Node> nodes_;
};

/// Exact k-nearest neighbors of every point among the others (self excluded).
/// Throws KTooLarge when k >= n and InvalidArgument when k == 0.
NeighborGraph knn_search(const Matrix& points, Index k, unsigned threads = 1);

/// k nearest indexed points for each row of `queries` (no exclusion).
NeighborGraph knn_query(const KnnIndex& index, const Matrix& queries, Index k, unsigned threads = 1);

RnnCounts rnn_counts(const NeighborGraph& g);

}  // namespace scml
