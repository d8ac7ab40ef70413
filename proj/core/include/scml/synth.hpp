#pragma once

#include "scml/dataio.hpp"

#include <cstdint>
#include <vector>

namespace scml {

/// Geometry of the three-cuboid fixture: boxes of `length` x 1 x 1 along x, y and z,
/// arranged so every pair of boxes is separated by `gap` and the three centroids are
/// mutually equidistant (distance (gap + 1) * sqrt(2)).
struct CuboidGeometry {
    double length = 10.0;
    double gap = 1.0;
};

/// Three mutually perpendicular, equidistant cuboids with labels 0/1/2 (sizes balanced within 1).
Dataset gen_cuboids3(Index n, std::uint64_t seed, const CuboidGeometry& geometry = {});

/// Axis-aligned box bounds [lo, hi] of cuboid `which` for the given geometry.
std::pair<Eigen::Vector3d, Eigen::Vector3d> cuboid_bounds(int which, const CuboidGeometry& geometry = {});

/// c isotropic Gaussian clusters around centers drawn uniformly from [-10, 10]^dim.
Dataset gen_blobs(Index n, Index clusters, Index dim, double spread, std::uint64_t seed);

/// rows x cols lattice of cell centers in the unit square, each jittered uniformly by up to
/// `jitter` per coordinate.
Dataset gen_grid2d(Index rows, Index cols, double jitter, std::uint64_t seed);

/// Quadrant ids (0..3) of 2-D points around (0.5, 0.5).
std::vector<int> quadrant_labels(const Matrix& points);

}  // namespace scml
