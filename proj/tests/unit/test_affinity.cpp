#include "scml/affinity.hpp"
#include "scml/error.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace scml;

namespace {

Eigen::MatrixXd dense_snn(const std::vector<IndexList>& knn, const std::vector<Index>& rnn) {
    const Index n = knn.size();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            for (Index a : knn[i]) {
                for (Index b : knn[j]) {
                    if (a == b) {
                        s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += static_cast<double>(rnn[a]);
                    }
                }
            }
        }
    }
    return s;
}

// Straight-line evaluation of the landmark affinities with dense matrices throughout.
Eigen::MatrixXd dense_affinity(const Matrix& x, Index k2, double gamma) {
    const Index n = static_cast<Index>(x.rows());
    const auto knn = fixtures::brute_force_knn(x, k2);
    std::vector<Index> rnn(n, 0);
    for (const auto& row : knn) {
        for (Index j : row) {
            ++rnn[j];
        }
    }
    const Eigen::MatrixXd snn = dense_snn(knn, rnn);

    Eigen::MatrixXd cond = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Index i = 0; i < n; ++i) {
        std::set<Index> pool(knn[i].begin(), knn[i].end());
        for (Index j = 0; j < n; ++j) {
            if (std::find(knn[j].begin(), knn[j].end(), i) != knn[j].end()) {
                pool.insert(j);
            }
        }
        double row_max = 0.0;
        for (Index j : pool) {
            row_max = std::max(row_max, snn(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        std::vector<std::pair<double, Index>> cand;
        for (Index j : pool) {
            const double f =
                row_max > 0.0 ? std::pow(1.0 - snn(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / row_max, gamma)
                              : 1.0;
            cand.emplace_back(f * fixtures::distance(x, i, j), j);
        }
        std::sort(cand.begin(), cand.end());
        cand.resize(k2);
        double sigma = 0.0;
        for (const auto& c : cand) {
            sigma += c.first;
        }
        sigma /= static_cast<double>(k2);
        for (const auto& [d, j] : cand) {
            cond(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::exp(-d * d / (2 * sigma * sigma));
        }
    }
    const Eigen::MatrixXd sym = cond + cond.transpose();
    return sym / sym.sum();
}

}  // namespace

TEST(K2Heuristic, BranchValues) {
    EXPECT_EQ(k2_heuristic(1000), 28u);
    EXPECT_EQ(k2_heuristic(1024), 28u);
    EXPECT_EQ(k2_heuristic(1025), 29u);
    EXPECT_EQ(k2_heuristic(50), 9u);
    EXPECT_EQ(k2_heuristic(49), 9u);
    EXPECT_EQ(k2_heuristic(999), 28u);
    EXPECT_EQ(k2_heuristic(9), 9u);
    EXPECT_EQ(k2_heuristic(8), 8u);
    EXPECT_EQ(k2_heuristic(5), 5u);
    EXPECT_EQ(k2_heuristic(1), 1u);
    EXPECT_THROW(k2_heuristic(0), InvalidArgument);
}

TEST(SnnMatrix, DisjointListsGiveZero) {
    Matrix x(4, 1);
    x << 0, 1, 100, 101;
    const auto g = knn_search(x, 1);
    const auto snn = snn_matrix(g, rnn_counts(g));
    EXPECT_DOUBLE_EQ(snn.at(0, 2), 0.0);
    EXPECT_DOUBLE_EQ(snn.at(1, 3), 0.0);
}

TEST(SnnMatrix, OverlapSumsReverseCounts) {
    NeighborGraph full;
    full.n = 4;
    full.k = 3;
    full.indices = {1, 2, 3, 0, 2, 3, 0, 1, 3, 0, 1, 2};
    full.distances.assign(12, 1.0);
    RnnCounts ones;
    ones.counts = {1, 1, 1, 1};
    EXPECT_DOUBLE_EQ(snn_matrix(full, ones).at(0, 1), 2.0);

    RnnCounts weighted;
    weighted.counts = {1, 1, 5, 7};
    const auto s = snn_matrix(full, weighted);
    EXPECT_DOUBLE_EQ(s.at(0, 1), 12.0);
    EXPECT_DOUBLE_EQ(s.at(2, 3), 2.0);
    EXPECT_DOUBLE_EQ(s.at(0, 2), 8.0);
}

TEST(SnnMatrix, MatchesTripleLoop) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Matrix x = fixtures::random_matrix(30, 3, seed);
        const Index k = 4 + seed;
        const auto g = knn_search(x, k);
        const auto rnn = rnn_counts(g);
        const auto snn = snn_matrix(g, rnn);
        const Eigen::MatrixXd oracle = dense_snn(fixtures::brute_force_knn(x, k), rnn.counts);
        for (Index i = 0; i < 30; ++i) {
            for (Index j : snn.pool[i]) {
                EXPECT_DOUBLE_EQ(snn.at(i, j), oracle(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            }
        }
    }
}

TEST(ModifiedDistances, GammaZeroIsIdentity) {
    const Matrix x = fixtures::random_matrix(40, 3, 2);
    const auto g = knn_search(x, 6);
    const auto md = modified_distances(x, snn_matrix(g, rnn_counts(g)), 0.0);
    for (Index i = 0; i < 40; ++i) {
        for (const auto& c : md.rows[i]) {
            EXPECT_EQ(c.modified, c.distance);
            EXPECT_DOUBLE_EQ(c.distance, fixtures::distance(x, i, c.index));
        }
    }
}

TEST(ModifiedDistances, ArgmaxCollapsesAndHalfMaxHalves) {
    const Matrix x = fixtures::random_matrix(40, 3, 3);
    const auto g = knn_search(x, 6);
    const auto snn = snn_matrix(g, rnn_counts(g));
    const auto md1 = modified_distances(x, snn, 1.0);
    const auto md = modified_distances(x, snn, default_gamma);
    for (Index i = 0; i < 40; ++i) {
        const double mx = snn.row_max(i);
        for (std::size_t t = 0; t < snn.pool[i].size(); ++t) {
            const double v = snn.values[i][t];
            if (mx > 0.0 && v == mx) {
                EXPECT_EQ(md.rows[i][t].modified, 0.0);
            }
            const double factor = mx > 0.0 ? 1.0 - v / mx : 1.0;
            EXPECT_NEAR(md1.rows[i][t].modified, factor * md1.rows[i][t].distance, 1e-15);
            EXPECT_LE(md.rows[i][t].modified, md.rows[i][t].distance);
            EXPECT_GE(md.rows[i][t].modified, 0.0);
        }
    }
}

TEST(ModifiedDistances, HalfRowMaxWithUnitGamma) {
    SnnMatrix snn;
    snn.pool = {{1, 2}, {0}, {0}};
    snn.values = {{4.0, 2.0}, {0.0}, {0.0}};
    Matrix x(3, 1);
    x << 0, 1, 3;
    const auto md = modified_distances(x, snn, 1.0);
    EXPECT_DOUBLE_EQ(md.rows[0][1].modified, 1.5);
    EXPECT_DOUBLE_EQ(md.rows[0][0].modified, 0.0);
    EXPECT_DOUBLE_EQ(md.rows[1][0].modified, 1.0);
}

TEST(HighDimProbabilities, TwoPointsGiveHalf) {
    Matrix x(2, 2);
    x << 0, 0, 1, 1;
    const auto a = high_dim_probabilities(x, 1, 0.0);
    const Eigen::MatrixXd p = fixtures::to_dense(a.P);
    EXPECT_DOUBLE_EQ(p(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(p(1, 0), 0.5);
    EXPECT_DOUBLE_EQ(p(0, 0), 0.0);
}

TEST(HighDimProbabilities, SymmetricNonNegativeNormalized) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix x = fixtures::random_matrix(20 + 7 * static_cast<Eigen::Index>(seed), 4, seed);
        const auto a = high_dim_probabilities(x, 3 + seed % 8, 1.2);
        const Eigen::MatrixXd p = fixtures::to_dense(a.P);
        EXPECT_NEAR(p.sum(), 1.0, 1e-9);
        EXPECT_EQ((p - p.transpose()).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_GE(p.minCoeff(), 0.0);
        EXPECT_TRUE(p.diagonal().isZero());
    }
}

TEST(HighDimProbabilities, MatchesDenseOracle) {
    for (double gamma : {0.0, 0.5, 1.2, 3.0}) {
        const Matrix x = fixtures::random_matrix(50, 5, 77);
        const auto a = high_dim_probabilities(x, 9, gamma);
        const Eigen::MatrixXd oracle = dense_affinity(x, 9, gamma);
        EXPECT_LT((fixtures::to_dense(a.P) - oracle).cwiseAbs().maxCoeff(), 1e-12) << "gamma " << gamma;
    }
}

TEST(HighDimProbabilities, GammaZeroIsPlainGaussianWithMeanKnnBandwidth) {
    const Matrix x = fixtures::random_matrix(60, 3, 5);
    const Index k = 7;
    const auto a = high_dim_probabilities(x, k, 0.0);
    const auto knn = fixtures::brute_force_knn(x, k);
    Eigen::MatrixXd cond = Eigen::MatrixXd::Zero(60, 60);
    for (Index i = 0; i < 60; ++i) {
        double sigma = 0.0;
        for (Index j : knn[i]) {
            sigma += fixtures::distance(x, i, j);
        }
        sigma /= static_cast<double>(k);
        EXPECT_NEAR(a.bandwidths[i], sigma, 1e-14);
        for (Index j : knn[i]) {
            const double d = fixtures::distance(x, i, j);
            cond(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::exp(-d * d / (2 * sigma * sigma));
        }
    }
    const Eigen::MatrixXd sym = cond + cond.transpose();
    EXPECT_LT((fixtures::to_dense(a.P) - sym / sym.sum()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(HighDimProbabilities, KeptNeighborsDominateDropped) {
    const Matrix x = fixtures::random_matrix(80, 3, 6);
    const Index k = 6;
    const auto g = knn_search(x, k);
    const auto md = modified_distances(x, snn_matrix(g, rnn_counts(g)), 1.2);
    const auto a = high_dim_probabilities(x, g, 1.2);
    for (Index i = 0; i < 80; ++i) {
        const std::set<Index> kept(a.kept[i].begin(), a.kept[i].end());
        ASSERT_EQ(kept.size(), k);
        double worst_kept = 0.0;
        double best_dropped = std::numeric_limits<double>::infinity();
        for (const auto& c : md.rows[i]) {
            if (kept.count(c.index) > 0) {
                worst_kept = std::max(worst_kept, c.modified);
            } else {
                best_dropped = std::min(best_dropped, c.modified);
            }
        }
        EXPECT_LE(worst_kept, best_dropped);
    }
}

TEST(HighDimProbabilities, CoincidentNeighborsStayFinite) {
    Matrix x(4, 2);
    x << 0, 0, 0, 0, 0, 0, 1, 1;
    const auto a = high_dim_probabilities(x, 2, 1.2);
    const Eigen::MatrixXd p = fixtures::to_dense(a.P);
    EXPECT_TRUE(p.allFinite());
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
}
