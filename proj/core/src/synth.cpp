#include "scml/synth.hpp"

#include "scml/error.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace scml {

namespace {

std::vector<Index> balanced_sizes(Index n, Index parts) {
    std::vector<Index> sizes(parts, n / parts);
    for (Index i = 0; i < n % parts; ++i) {
        ++sizes[i];
    }
    return sizes;
}

}  // namespace

std::pair<Eigen::Vector3d, Eigen::Vector3d> cuboid_bounds(int which, const CuboidGeometry& g) {
    // Long axis of box `which` is axis `which`; offsets keep each pair `gap` apart along
    // the axis they do not share.
    const double off = g.gap + 1.0;
    Eigen::Vector3d center;
    switch (which) {
        case 0: center = {0.0, 0.0, -off}; break;
        case 1: center = {off, 0.0, 0.0}; break;
        case 2: center = {0.0, off, 0.0}; break;
        default: throw InvalidArgument("cuboid index must be 0, 1 or 2");
    }
    Eigen::Vector3d half = Eigen::Vector3d::Constant(0.5);
    half[which] = 0.5 * g.length;
    return {center - half, center + half};
}

Dataset gen_cuboids3(Index n, std::uint64_t seed, const CuboidGeometry& geometry) {
    if (n < 3) {
        throw InvalidArgument("cuboids3 needs n >= 3");
    }
    if (!(geometry.length > 0.0) || !(geometry.gap > 0.0)) {
        throw InvalidArgument("cuboid length and gap must be positive");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix points(static_cast<Eigen::Index>(n), 3);
    std::vector<int> labels;
    labels.reserve(n);
    Eigen::Index row = 0;
    const auto sizes = balanced_sizes(n, 3);
    for (int box = 0; box < 3; ++box) {
        const auto [lo, hi] = cuboid_bounds(box, geometry);
        const Index m = sizes[static_cast<std::size_t>(box)];
        // Long axis is stratified: one point per slab, slabs visited in shuffled order.
        std::vector<Index> slab(m);
        std::iota(slab.begin(), slab.end(), Index{0});
        std::shuffle(slab.begin(), slab.end(), rng);
        for (Index i = 0; i < m; ++i, ++row) {
            for (int d = 0; d < 3; ++d) {
                const double t = d == box ? (static_cast<double>(slab[i]) + unit(rng)) / static_cast<double>(m)
                                          : unit(rng);
                points(row, d) = lo[d] + (hi[d] - lo[d]) * t;
            }
            labels.push_back(box);
        }
    }
    return Dataset::from_points(std::move(points), std::move(labels));
}

Dataset gen_blobs(Index n, Index clusters, Index dim, double spread, std::uint64_t seed) {
    if (clusters < 1 || n < clusters || dim < 1) {
        throw InvalidArgument("blobs need n >= clusters >= 1 and dim >= 1");
    }
    if (!(spread >= 0.0)) {
        throw InvalidArgument("spread must be non-negative");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> box(-10.0, 10.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix centers(static_cast<Eigen::Index>(clusters), static_cast<Eigen::Index>(dim));
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
        for (Eigen::Index d = 0; d < centers.cols(); ++d) {
            centers(c, d) = box(rng);
        }
    }
    Matrix points(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    std::vector<int> labels;
    labels.reserve(n);
    Eigen::Index row = 0;
    const auto sizes = balanced_sizes(n, clusters);
    for (Index c = 0; c < clusters; ++c) {
        for (Index i = 0; i < sizes[c]; ++i, ++row) {
            for (Eigen::Index d = 0; d < points.cols(); ++d) {
                points(row, d) = centers(static_cast<Eigen::Index>(c), d) + spread * normal(rng);
            }
            labels.push_back(static_cast<int>(c));
        }
    }
    return Dataset::from_points(std::move(points), std::move(labels));
}

Dataset gen_grid2d(Index rows, Index cols, double jitter, std::uint64_t seed) {
    if (rows < 1 || cols < 1) {
        throw InvalidArgument("grid needs rows, cols >= 1");
    }
    if (!(jitter >= 0.0)) {
        throw InvalidArgument("jitter must be non-negative");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> shake(-1.0, 1.0);
    Matrix points(static_cast<Eigen::Index>(rows * cols), 2);
    Eigen::Index i = 0;
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c, ++i) {
            const double x = (static_cast<double>(c) + 0.5) / static_cast<double>(cols);
            const double y = (static_cast<double>(r) + 0.5) / static_cast<double>(rows);
            points(i, 0) = x + (jitter > 0.0 ? jitter * shake(rng) : 0.0);
            points(i, 1) = y + (jitter > 0.0 ? jitter * shake(rng) : 0.0);
        }
    }
    return Dataset::from_points(std::move(points));
}

std::vector<int> quadrant_labels(const Matrix& points) {
    if (points.cols() != 2) {
        throw InvalidArgument("quadrant labels need 2-D points");
    }
    std::vector<int> labels(static_cast<std::size_t>(points.rows()));
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        labels[static_cast<std::size_t>(i)] = (points(i, 0) >= 0.5 ? 1 : 0) + (points(i, 1) >= 0.5 ? 2 : 0);
    }
    return labels;
}

}  // namespace scml
