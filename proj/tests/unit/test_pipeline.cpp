#include "scml/error.hpp"
#include "scml/metrics.hpp"
#include "scml/pipeline.hpp"
#include "scml/synth.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace scml;

TEST(Embed, ZeroK1UsesEveryPointAsLandmark) {
    const Dataset d = gen_blobs(120, 3, 4, 0.5, 3);
    ScmlConfig cfg;
    cfg.k1 = 0;
    const EmbedResult r = embed(d, cfg);
    EXPECT_EQ(r.diagnostics.landmark_count, 120u);
    EXPECT_DOUBLE_EQ(r.diagnostics.sample_rate, 1.0);
    EXPECT_EQ(r.coords.rows(), 120);
    EXPECT_TRUE(r.coords.allFinite());
}

TEST(Embed, DuplicatesShareCoordinates) {
    const Dataset base = gen_blobs(150, 3, 3, 0.8, 4);
    Matrix twice(300, 3);
    twice.topRows(150) = base.points;
    twice.bottomRows(150) = base.points;
    const EmbedResult r = embed(Dataset::from_points(twice), ScmlConfig{});
    EXPECT_EQ(r.diagnostics.unique_rows, 150u);
    for (Eigen::Index i = 0; i < 150; ++i) {
        EXPECT_EQ(r.coords.row(i), r.coords.row(i + 150));
    }
}

TEST(Embed, ThreeBlobsStaySeparable) {
    const Dataset d = gen_blobs(600, 3, 10, 1.0, 7);
    ScmlConfig cfg;
    cfg.k1 = 5;
    const EmbedResult r = embed(d, cfg);
    ASSERT_EQ(r.coords.rows(), 600);
    EXPECT_GE(kmeans_cluster_acc(r.coords, LabelVector::from_raw(*d.labels)), 0.95);
    const auto& loss = r.diagnostics.loss_history;
    EXPECT_LT(loss.back(), loss.front());
}

TEST(Embed, DeterministicSingleThreaded) {
    const Dataset d = gen_cuboids3(900, 3);
    ScmlConfig cfg;
    cfg.k1 = 5;
    cfg.seed = 42;
    const EmbedResult a = embed(d, cfg);
    const EmbedResult b = embed(d, cfg);
    EXPECT_EQ(a.coords, b.coords);
}

TEST(Embed, ParallelAgreesWithSerial) {
    const Dataset d = gen_cuboids3(900, 3);
    ScmlConfig cfg;
    cfg.k1 = 5;
    const EmbedResult a = embed(d, cfg);
    cfg.threads = 4;
    const EmbedResult b = embed(d, cfg);
    EXPECT_LT((a.coords - b.coords).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Embed, OutputFollowsInputOrder) {
    const Dataset d = gen_blobs(200, 2, 3, 0.3, 9);
    Matrix shuffled = d.points;
    std::vector<int> perm(200);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(1);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> labels(200);
    for (int i = 0; i < 200; ++i) {
        shuffled.row(i) = d.points.row(perm[static_cast<std::size_t>(i)]);
        labels[static_cast<std::size_t>(i)] = (*d.labels)[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    }
    const EmbedResult r = embed(Dataset::from_points(shuffled), ScmlConfig{});
    EXPECT_DOUBLE_EQ(kmeans_cluster_acc(r.coords, LabelVector::from_raw(labels)), 1.0);
}

TEST(Embed, DiagnosticsCoverEveryStage) {
    const Dataset d = gen_cuboids3(600, 1);
    ScmlConfig cfg;
    cfg.k1 = 5;
    const EmbedResult r = embed(d, cfg);
    const auto& diag = r.diagnostics;
    std::vector<std::string> stages;
    for (const auto& t : diag.timings) {
        stages.push_back(t.stage);
        EXPECT_GE(t.wall_ms, 0.0);
    }
    EXPECT_EQ(stages, (std::vector<std::string>{"preprocess", "pca", "sampling", "affinity", "init", "optimize",
                                                "clle", "merge"}));
    EXPECT_EQ(diag.loss_history.size(), cfg.optimizer.epochs + 1);
    EXPECT_EQ(diag.k2, k2_heuristic(diag.landmark_count));
    EXPECT_EQ(diag.landmarks.size(), diag.landmark_count);
    EXPECT_FALSE(diag.pca_applied);
    EXPECT_EQ(diag.search_dim, 3u);
}

TEST(Embed, PcaGateProjectsLargeHighDimensionalInput) {
    const Dataset d = gen_blobs(400, 4, 60, 1.0, 2);
    ScmlConfig cfg;
    cfg.k1 = 10;
    cfg.pca_gate.n_threshold = 300;
    const EmbedResult r = embed(d, cfg);
    EXPECT_TRUE(r.diagnostics.pca_applied);
    EXPECT_LT(r.diagnostics.search_dim, 60u);
    EXPECT_GE(kmeans_cluster_acc(r.coords, LabelVector::from_raw(*d.labels)), 0.95);
}

TEST(Embed, LandmarkCountMedianNonIncreasingInK1) {
    std::vector<double> medians;
    for (Index k1 : {3u, 6u, 12u}) {
        std::vector<double> counts;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            ScmlConfig cfg;
            cfg.k1 = k1;
            cfg.optimizer.epochs = 12;
            cfg.optimizer.warmup = 2;
            counts.push_back(static_cast<double>(embed(gen_blobs(500, 4, 5, 2.0, seed), cfg).diagnostics.landmark_count));
        }
        std::nth_element(counts.begin(), counts.begin() + 2, counts.end());
        medians.push_back(counts[2]);
    }
    EXPECT_LE(medians[1], medians[0]);
    EXPECT_LE(medians[2], medians[1]);
}

TEST(Embed, RejectsInvalidConfigurations) {
    const Dataset d = gen_blobs(50, 2, 3, 1.0, 1);
    ScmlConfig bad_dim;
    bad_dim.dim = 0;
    EXPECT_THROW(embed(d, bad_dim), InvalidConfig);
    ScmlConfig bad_gamma;
    bad_gamma.gamma = -1.0;
    EXPECT_THROW(embed(d, bad_gamma), InvalidConfig);
    ScmlConfig too_coarse;
    too_coarse.k1 = 49;
    EXPECT_THROW(embed(d, too_coarse), TooFewLandmarks);
    EXPECT_THROW(embed(gen_blobs(3, 1, 2, 1.0, 1), ScmlConfig{}), TooFewPoints);
}
