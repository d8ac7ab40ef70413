#pragma once

#include "scml/neighbors.hpp"
#include "scml/types.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace scml::fixtures {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double lo = 0.0,
                            double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = u(rng);
        }
    }
    return m;
}

// All-pairs scan, ordered by (distance, index).
inline std::vector<IndexList> brute_force_knn(const Matrix& x, Index k) {
    const auto n = static_cast<Index>(x.rows());
    std::vector<IndexList> out(n);
    for (Index i = 0; i < n; ++i) {
        std::vector<std::pair<double, Index>> all;
        for (Index j = 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            double s = 0.0;
            for (Eigen::Index d = 0; d < x.cols(); ++d) {
                const double diff = x(static_cast<Eigen::Index>(i), d) - x(static_cast<Eigen::Index>(j), d);
                s += diff * diff;
            }
            all.emplace_back(s, j);
        }
        std::sort(all.begin(), all.end());
        for (Index t = 0; t < k; ++t) {
            out[i].push_back(all[t].second);
        }
    }
    return out;
}

inline double distance(const Matrix& x, Index a, Index b) {
    return (x.row(static_cast<Eigen::Index>(a)) - x.row(static_cast<Eigen::Index>(b))).norm();
}

inline Eigen::MatrixXd to_dense(const SparseMatrix& s) {
    return Eigen::MatrixXd(s);
}

}  // namespace scml::fixtures
