#pragma once

#include "scml/neighbors.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace scml {

inline constexpr double default_lle_regularization = 0.1;

/// Affine reconstruction weights over the nearest landmarks (nearest first).
struct LleWeights {
    IndexList indices;
    Vector weights;
    bool regularized = false;
};

/// Minimizes |x - sum_i w_i x_i|^2 subject to sum_i w_i = 1 over the rows of `neighbors`.
/// A singular or nearly singular Gram matrix (eigenvalue ratio below 1e-10) is regularized
/// by (delta^2 / K) * tr(G) on the diagonal; an all-zero Gram gives uniform weights.
LleWeights lle_weights(std::span<const double> x, const Matrix& neighbors,
                       double delta = default_lle_regularization);

/// One positive distance scale per landmark.
struct ScaleVector {
    std::vector<double> scales;
};

/// For each landmark, the zero-intercept least-squares slope mapping pairwise high-dimensional
/// distances among its neighbors onto their embedded distances.
ScaleVector optimal_scales(const NeighborGraph& landmark_knn, const Matrix& high, const Matrix& low);

/// Point on the sphere |y - y_m| = d_m closest to the LLE reconstruction sum_i w_i y_i.
/// Row 0 of `neighbor_high` / `neighbor_low` is the nearest landmark m.
/// `tiebreak_seed` picks the direction when the reconstruction coincides with y_m.
Vector place_non_landmark(std::span<const double> x, const Matrix& neighbor_high, const Matrix& neighbor_low,
                          const LleWeights& w, double scale_m, std::uint64_t tiebreak_seed = 0);

/// Embeds every non-landmark. Nearest landmarks are searched in `search_space` rows
/// (defaults to `high`), reconstruction weights always use `high`.
struct NonLandmarkInput {
    const Matrix& high;                          // non-landmark features
    const Matrix& landmark_high;                  // landmark features
    const Matrix& landmark_low;                  // landmark embedding
    const ScaleVector& scales;
    const Matrix* search_space = nullptr;        // optional projected non-landmarks
    const Matrix* landmark_search_space = nullptr;  // optional projected landmarks
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

Matrix incorporate_all(const NonLandmarkInput& in, Index dim);

}  // namespace scml
