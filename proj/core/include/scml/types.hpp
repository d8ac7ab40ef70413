#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace scml {

/// Dense row-major matrix; one observation per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

using Index = std::size_t;
using IndexList = std::vector<Index>;

inline double squared_distance(const double* a, const double* b, Eigen::Index dim) {
    double s = 0.0;
    for (Eigen::Index d = 0; d < dim; ++d) {
        const double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

template <typename RowA, typename RowB>
double squared_distance(const RowA& a, const RowB& b) {
    return squared_distance(a.data(), b.data(), a.size());
}

}  // namespace scml
