#pragma once

#include "scml/affinity.hpp"
#include "scml/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

namespace scml {

enum class EigenOrder { smallest, largest };

/// Extreme eigenpairs. Column c of `vectors` pairs with values[c]; values are ascending
/// for `smallest` and descending for `largest`. Each eigenvector's largest-magnitude
/// entry is positive.
struct EigenPairs {
    Vector values;
    Eigen::MatrixXd vectors;
};

/// Dense symmetric eigensolver (Householder tridiagonalization + implicit QL).
EigenPairs symmetric_eigen(const Eigen::MatrixXd& m, Index count, EigenOrder order);

/// Applies a symmetric operator to a block of column vectors.
using BlockOperator = std::function<void(const Eigen::MatrixXd& in, Eigen::MatrixXd& out)>;

struct IterativeEigenOptions {
    double tolerance = 1e-8;     // residual bound relative to `operator_norm`
    Index max_basis = 0;         // 0: chosen from n and count
    Index max_restarts = 200;
    std::uint64_t seed = 0;
    bool throw_on_failure = true;
};

struct IterativeEigenResult {
    EigenPairs pairs;
    bool converged = false;
    Index restarts = 0;
    double max_residual = 0.0;
};

/// Block Krylov (thick-restarted block Lanczos with full reorthogonalization) for the
/// extreme eigenpairs of a large symmetric operator. `operator_norm` scales the
/// residual tolerance; any upper bound on the spectral radius will do.
IterativeEigenResult symmetric_eigen_iterative(const BlockOperator& op, Index n, Index count, EigenOrder order,
                                               double operator_norm, const IterativeEigenOptions& opts = {});

/// Principal-component projection retaining the fewest components whose cumulative
/// explained-variance ratio exceeds the target rate.
struct PcaModel {
    Vector mean;
    Eigen::MatrixXd components;  // D x d, orthonormal columns
    Vector eigenvalues;          // all D covariance eigenvalues, descending
    Vector explained;            // cumulative ratios of the retained components

    Index retained() const noexcept { return static_cast<Index>(components.cols()); }
    Matrix project(const Matrix& points) const;
};

inline constexpr double default_pca_rate = 0.8;

std::pair<PcaModel, Matrix> pca_fit_project(const Matrix& points, double target_rate = default_pca_rate);

/// Symmetric normalized Laplacian I - D^{-1/2} P D^{-1/2}. Zero-degree rows get a 1e-12 self-loop.
SparseMatrix normalized_laplacian(const SparseMatrix& p);

struct InitialLayout {
    Matrix coords;
};

/// Landmark problems up to this size use the dense eigensolver.
inline constexpr Index dense_eigen_limit = 2000;

/// Spectral initialization: eigenvectors 2..dim+1 of the normalized Laplacian of P,
/// each output dimension centered and scaled to unit standard deviation.
InitialLayout laplacian_eigenmaps_init(const AffinityMatrix& affinity, Index dim, std::uint64_t seed = 0);

}  // namespace scml
