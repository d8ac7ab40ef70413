#pragma once

#include "scml/neighbors.hpp"

#include <vector>

namespace scml {

inline constexpr double default_gamma = 1.2;

/// Empirical neighbor count for the landmark graph given N landmarks.
/// Note that N < 9 yields N itself; callers must cap at N-1 before searching.
Index k2_heuristic(Index landmark_count);

/// Candidate pool of each point: its k-NN plus every point that lists it (sorted ascending).
std::vector<IndexList> candidate_pool(const NeighborGraph& g);

/// RNN-weighted shared-neighbor scores, evaluated on every candidate pair.
/// Pairs outside the candidate pool are not stored and read as zero.
struct SnnMatrix {
    std::vector<IndexList> pool;
    std::vector<std::vector<double>> values;  // values[i][t] pairs with pool[i][t]

    double at(Index i, Index j) const;
    double row_max(Index i) const;
};

SnnMatrix snn_matrix(const NeighborGraph& g, const RnnCounts& rnn);

struct Candidate {
    Index index;
    double distance;  // Euclidean in the feature space
    double modified;  // after shared-neighbor aggregation
};

/// Shared-neighbor-shrunk distances d(j|i) over each point's candidate pool.
struct ModifiedDistances {
    std::vector<std::vector<Candidate>> rows;
    double gamma = default_gamma;
};

/// d(j|i) = (1 - SNN_ij / max_j SNN_ij)^gamma * |x_i - x_j|; rows without shared
/// neighbors keep raw distances.
ModifiedDistances modified_distances(const Matrix& points, const SnnMatrix& snn, double gamma);

/// Symmetric landmark probabilities (sum over i != j equals 1) and per-row Gaussian bandwidths.
struct AffinityMatrix {
    SparseMatrix P;
    std::vector<double> bandwidths;
    std::vector<IndexList> kept;  // the k2 neighbors retained per row after re-ranking

    Index size() const noexcept { return static_cast<Index>(P.rows()); }
};

/// Builds P from a precomputed Euclidean k2 graph. `points` supplies the distances, so the
/// graph may come from a projected search space.
AffinityMatrix high_dim_probabilities(const Matrix& points, const NeighborGraph& g, double gamma);

/// Convenience overload that runs the k2 search on `points` itself.
AffinityMatrix high_dim_probabilities(const Matrix& points, Index k2, double gamma, unsigned threads = 1);

}  // namespace scml
