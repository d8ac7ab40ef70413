#include "scml/affinity.hpp"
#include "scml/error.hpp"
#include "scml/spectral.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace scml;

namespace {

Eigen::MatrixXd random_symmetric(Eigen::Index n, std::uint64_t seed) {
    const Matrix a = fixtures::random_matrix(n, n, seed, -1.0, 1.0);
    return Eigen::MatrixXd(a + a.transpose());
}

AffinityMatrix affinity_from_dense(const Eigen::MatrixXd& w) {
    AffinityMatrix a;
    a.P = (w / w.sum()).sparseView();
    return a;
}

double column_std(const Matrix& m, Eigen::Index c) {
    const double mean = m.col(c).mean();
    return std::sqrt((m.col(c).array() - mean).square().sum() / static_cast<double>(m.rows()));
}

}  // namespace

TEST(SymmetricEigen, Identity) {
    const auto e = symmetric_eigen(Eigen::MatrixXd::Identity(4, 4), 2, EigenOrder::smallest);
    EXPECT_DOUBLE_EQ(e.values[0], 1.0);
    EXPECT_DOUBLE_EQ(e.values[1], 1.0);
}

TEST(SymmetricEigen, DiagonalSmallestTwo) {
    const Eigen::MatrixXd m = Eigen::Vector3d(1, 2, 3).asDiagonal();
    const auto e = symmetric_eigen(m, 2, EigenOrder::smallest);
    EXPECT_DOUBLE_EQ(e.values[0], 1.0);
    EXPECT_DOUBLE_EQ(e.values[1], 2.0);
    EXPECT_TRUE(e.vectors.col(0).isApprox(Eigen::Vector3d(1, 0, 0)));
    EXPECT_TRUE(e.vectors.col(1).isApprox(Eigen::Vector3d(0, 1, 0)));
}

TEST(SymmetricEigen, LargestOrderDescends) {
    const Eigen::MatrixXd m = Eigen::Vector4d(4, -1, 7, 2).asDiagonal();
    const auto e = symmetric_eigen(m, 3, EigenOrder::largest);
    EXPECT_EQ(e.values, Eigen::Vector3d(7, 4, 2));
}

TEST(SymmetricEigen, ResidualsOnRandomMatrices) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Eigen::MatrixXd m = random_symmetric(20, seed);
        const auto e = symmetric_eigen(m, 20, EigenOrder::smallest);
        const double scale = m.norm();
        for (Eigen::Index c = 0; c < 20; ++c) {
            EXPECT_LE((m * e.vectors.col(c) - e.values[c] * e.vectors.col(c)).norm(), 1e-8 * scale);
            EXPECT_NEAR(e.vectors.col(c).norm(), 1.0, 1e-12);
            if (c > 0) {
                EXPECT_LE(e.values[c - 1], e.values[c]);
            }
        }
        const Eigen::MatrixXd rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
        EXPECT_LE((rebuilt - m).norm(), 1e-10 * scale);
    }
}

TEST(SymmetricEigen, FewPairsOfLargeMatrixMatchFullSolve) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const Eigen::MatrixXd m = random_symmetric(300, 50 + seed);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(m);
        for (EigenOrder order : {EigenOrder::smallest, EigenOrder::largest}) {
            const auto e = symmetric_eigen(m, 4, order);
            for (Eigen::Index c = 0; c < 4; ++c) {
                const Eigen::Index src = order == EigenOrder::smallest ? c : 299 - c;
                EXPECT_NEAR(e.values[c], full.eigenvalues()[src], 1e-10);
                EXPECT_NEAR(std::abs(e.vectors.col(c).dot(full.eigenvectors().col(src))), 1.0, 1e-8);
            }
        }
    }
}

TEST(SymmetricEigen, RepeatedEigenvaluesGiveOrthonormalBasis) {
    // Four identical path-graph Laplacian blocks: every eigenvalue has multiplicity four.
    const Eigen::Index b = 40;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4 * b, 4 * b);
    for (Eigen::Index k = 0; k < 4; ++k) {
        for (Eigen::Index i = 0; i + 1 < b; ++i) {
            const Eigen::Index r = k * b + i;
            m(r, r) += 1.0;
            m(r + 1, r + 1) += 1.0;
            m(r, r + 1) = m(r + 1, r) = -1.0;
        }
    }
    const auto e = symmetric_eigen(m, 6, EigenOrder::smallest);
    const Eigen::MatrixXd gram = e.vectors.transpose() * e.vectors;
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((m * e.vectors - e.vectors * e.values.asDiagonal()).cwiseAbs().maxCoeff(), 1e-9);
    for (Eigen::Index c = 0; c < 4; ++c) {
        EXPECT_NEAR(e.values[c], 0.0, 1e-12);
    }
}

TEST(SymmetricEigen, RejectsAsymmetricInput) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
    m(0, 2) = 1.0;
    EXPECT_THROW(symmetric_eigen(m, 1, EigenOrder::smallest), InvalidArgument);
}

TEST(SymmetricEigenIterative, MatchesDenseOnSparseLaplacian) {
    const Matrix x = fixtures::random_matrix(600, 3, 12);
    const auto a = high_dim_probabilities(x, 10, 1.2);
    const SparseMatrix lap = normalized_laplacian(a.P);
    const BlockOperator op = [&](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) { out = lap * in; };
    const auto it = symmetric_eigen_iterative(op, 600, 4, EigenOrder::smallest, 2.0);
    ASSERT_TRUE(it.converged);
    const auto dense = symmetric_eigen(Eigen::MatrixXd(lap), 4, EigenOrder::smallest);
    for (Eigen::Index c = 0; c < 4; ++c) {
        EXPECT_NEAR(it.pairs.values[c], dense.values[c], 1e-8);
        const Vector v = it.pairs.vectors.col(c);
        EXPECT_LE((lap * v - it.pairs.values[c] * v).norm(), 1e-7);
    }
}

TEST(SymmetricEigenIterative, LargestOfDiagonalOperator) {
    Vector diag(500);
    for (Eigen::Index i = 0; i < 500; ++i) {
        diag[i] = static_cast<double>(i) / 499.0;
    }
    const BlockOperator op = [&](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) { out = diag.asDiagonal() * in; };
    const auto it = symmetric_eigen_iterative(op, 500, 3, EigenOrder::largest, 1.0);
    ASSERT_TRUE(it.converged);
    EXPECT_NEAR(it.pairs.values[0], 1.0, 1e-9);
    EXPECT_NEAR(it.pairs.values[1], 498.0 / 499.0, 1e-9);
    EXPECT_NEAR(it.pairs.values[2], 497.0 / 499.0, 1e-9);
}

TEST(Pca, RankOneLine) {
    Matrix x(20, 3);
    for (Eigen::Index i = 0; i < 20; ++i) {
        const double t = static_cast<double>(i) * 0.37 - 2.0;
        x.row(i) << 1 + 2 * t, -1 + t, 3 - 2 * t;
    }
    const auto [model, proj] = pca_fit_project(x);
    EXPECT_EQ(model.retained(), 1u);
    for (Eigen::Index i = 0; i < 20; ++i) {
        for (Eigen::Index j = 0; j < 20; ++j) {
            EXPECT_NEAR((proj.row(i) - proj.row(j)).norm(), (x.row(i) - x.row(j)).norm(), 1e-10);
        }
    }
}

TEST(Pca, IsotropicGaussianKeepsBoth) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix x(4000, 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        x.row(i) << g(rng), g(rng);
    }
    EXPECT_EQ(pca_fit_project(x, 0.8).first.retained(), 2u);
}

TEST(Pca, ReconstructionErrorEqualsDroppedVariance) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Matrix x = fixtures::random_matrix(100, 10, seed);
        const auto [model, proj] = pca_fit_project(x, 0.6);
        ASSERT_LT(model.retained(), 10u);
        const Matrix centered = x.rowwise() - model.mean.transpose();
        const Matrix rebuilt = proj * model.components.transpose();
        const double err = (centered - rebuilt).squaredNorm() / 99.0;
        const double dropped = model.eigenvalues.tail(10 - static_cast<Eigen::Index>(model.retained())).sum();
        EXPECT_NEAR(err, dropped, 1e-10);
        EXPECT_GT(model.explained[model.explained.size() - 1], 0.6);
        if (model.retained() > 1) {
            EXPECT_LE(model.explained[model.explained.size() - 2], 0.6);
        }
        EXPECT_TRUE(model.project(x).isApprox(proj, 1e-12));
    }
}

TEST(Pca, FullRankProjectionIsIsometric) {
    Matrix x = fixtures::random_matrix(30, 3, 8);
    const auto [model, proj] = pca_fit_project(x, 0.999999);
    ASSERT_EQ(model.retained(), 3u);
    for (Eigen::Index i = 0; i < 30; ++i) {
        EXPECT_NEAR((proj.row(i) - proj.row(0)).norm(), (x.row(i) - x.row(0)).norm(), 1e-10);
    }
}

TEST(NormalizedLaplacian, TrivialNullVector) {
    const Matrix x = fixtures::random_matrix(80, 2, 4);
    const auto a = high_dim_probabilities(x, 12, 1.2);
    const Eigen::MatrixXd lap(normalized_laplacian(a.P));
    const auto e = symmetric_eigen(lap, 1, EigenOrder::smallest);
    EXPECT_NEAR(e.values[0], 0.0, 1e-8);
    const Eigen::MatrixXd p = fixtures::to_dense(a.P);
    Vector u = p.rowwise().sum().cwiseSqrt();
    u.normalize();
    EXPECT_NEAR(std::abs(u.dot(e.vectors.col(0))), 1.0, 1e-8);
}

TEST(LaplacianEigenmaps, TwoBlocksSeparate) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(8, 8);
    for (int b = 0; b < 2; ++b) {
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                if (i != j) {
                    w(4 * b + i, 4 * b + j) = 1.0;
                }
            }
        }
    }
    const auto layout = laplacian_eigenmaps_init(affinity_from_dense(w), 1);
    const auto& y = layout.coords;
    for (int i = 1; i < 4; ++i) {
        EXPECT_NEAR(y(i, 0), y(0, 0), 1e-9);
        EXPECT_NEAR(y(4 + i, 0), y(4, 0), 1e-9);
    }
    EXPECT_GT(std::abs(y(0, 0) - y(4, 0)), 1.0);
}

TEST(LaplacianEigenmaps, PathGraphIsMonotone) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(0, 1) = w(1, 0) = 1.0;
    w(1, 2) = w(2, 1) = 1.0;
    const auto y = laplacian_eigenmaps_init(affinity_from_dense(w), 1).coords;
    const bool up = y(0, 0) < y(1, 0) && y(1, 0) < y(2, 0);
    const bool down = y(0, 0) > y(1, 0) && y(1, 0) > y(2, 0);
    EXPECT_TRUE(up || down);
    EXPECT_NEAR(y(1, 0), 0.0, 1e-12);
}

TEST(LaplacianEigenmaps, UnitStdPerDimension) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Matrix x = fixtures::random_matrix(120, 4, seed);
        const auto y = laplacian_eigenmaps_init(high_dim_probabilities(x, 9, 1.2), 2).coords;
        for (Eigen::Index c = 0; c < 2; ++c) {
            EXPECT_NEAR(column_std(y, c), 1.0, 1e-12);
            EXPECT_NEAR(y.col(c).mean(), 0.0, 1e-12);
        }
    }
}

TEST(LaplacianEigenmaps, IterativePathAgreesWithDenseSubspace) {
    const Matrix x = fixtures::random_matrix(2300, 2, 31);
    const auto a = high_dim_probabilities(x, 12, 1.2);
    const auto y = laplacian_eigenmaps_init(a, 2, 5).coords;
    ASSERT_EQ(y.rows(), 2300);
    EXPECT_TRUE(y.allFinite());
    for (Eigen::Index c = 0; c < 2; ++c) {
        EXPECT_NEAR(column_std(y, c), 1.0, 1e-9);
    }
    const Eigen::MatrixXd lap(normalized_laplacian(a.P));
    const auto dense = symmetric_eigen(lap, 3, EigenOrder::smallest);
    // Each iterative coordinate lies in the span of the two nontrivial dense eigenvectors, up to centering.
    Eigen::MatrixXd basis(2300, 3);
    basis.col(0) = Vector::Ones(2300);
    basis.col(1) = dense.vectors.col(1);
    basis.col(2) = dense.vectors.col(2);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(2300, 3);
    for (Eigen::Index c = 0; c < 2; ++c) {
        const Vector v = y.col(c);
        EXPECT_LT((v - q * (q.transpose() * v)).norm() / v.norm(), 1e-3);
    }
}

TEST(LaplacianEigenmaps, RejectsOversizedDimension) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Ones(3, 3) - Eigen::MatrixXd::Identity(3, 3);
    EXPECT_THROW(laplacian_eigenmaps_init(affinity_from_dense(w), 3), InvalidArgument);
}
