#include "scml/pipeline.hpp"

#include "scml/clle.hpp"
#include "scml/error.hpp"
#include "scml/neighbors.hpp"
#include "scml/spectral.hpp"

#include <algorithm>
#include <chrono>

namespace scml {

namespace {

class StageClock {
public:
    explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}

    void lap(const char* stage) {
        const auto now = std::chrono::steady_clock::now();
        sink_.push_back({stage, std::chrono::duration<double, std::milli>(now - last_).count()});
        last_ = now;
    }

private:
    std::vector<StageTiming>& sink_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

Matrix gather_rows(const Matrix& m, const IndexList& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(rows[r]));
    }
    return out;
}

}  // namespace

void ScmlConfig::validate() const {
    if (dim < 1) {
        throw InvalidConfig("embedding dimension must be at least 1");
    }
    if (!(gamma >= 0.0)) {
        throw InvalidConfig("gamma must be non-negative");
    }
    if (k2 && *k2 < 1) {
        throw InvalidConfig("k2 must be positive");
    }
    if (pca_gate.n_threshold < 1 || pca_gate.d_threshold < 1 ||
        !(pca_gate.target_rate > 0.0 && pca_gate.target_rate < 1.0)) {
        throw InvalidConfig("PCA gate thresholds must be positive and the rate in (0,1)");
    }
    if (optimizer.epochs < 1 || optimizer.warmup >= optimizer.epochs) {
        throw InvalidConfig("epochs must satisfy 0 <= warmup < epochs");
    }
    if ((optimizer.eta_max && !(*optimizer.eta_max > 0.0)) || (optimizer.eta_min && !(*optimizer.eta_min > 0.0))) {
        throw InvalidConfig("learning rates must be positive");
    }
}

EmbedResult embed(const Dataset& data, const ScmlConfig& cfg) {
    cfg.validate();
    EmbedResult result;
    Diagnostics& diag = result.diagnostics;
    StageClock clock(diag.timings);

    diag.input_rows = data.size();
    if (data.size() < cfg.dim + 2) {
        throw TooFewPoints("need at least " + std::to_string(cfg.dim + 2) + " rows, got " +
                           std::to_string(data.size()));
    }
    auto [unique, dedup] = deduplicate(data);
    const Dataset normalized = minmax_normalize(unique);
    const Matrix& x = normalized.points;
    const Index n = normalized.size();
    diag.unique_rows = n;
    if (n < cfg.dim + 2) {
        throw TooFewPoints("need at least " + std::to_string(cfg.dim + 2) + " distinct rows, got " +
                           std::to_string(n));
    }
    clock.lap("preprocess");

    // Neighbor-search space.
    std::optional<Matrix> projected;
    if (n > cfg.pca_gate.n_threshold && normalized.dim() > cfg.pca_gate.d_threshold) {
        projected = pca_fit_project(x, cfg.pca_gate.target_rate).second;
        diag.pca_applied = true;
    }
    const Matrix& search = projected ? *projected : x;
    diag.search_dim = static_cast<Index>(search.cols());
    clock.lap("pca");

    const Index k1 = std::min(cfg.k1, n - 1);
    diag.k1 = k1;
    const LandmarkPartition part = pps_sample(search, k1, cfg.threads);
    const Index landmarks = part.landmarks.size();
    diag.landmark_count = landmarks;
    diag.sample_rate = sample_rate(part, n);
    diag.landmarks = part.landmarks;
    if (landmarks < cfg.dim + 2) {
        throw TooFewLandmarks("sampling kept " + std::to_string(landmarks) + " landmarks; at least " +
                              std::to_string(cfg.dim + 2) + " are needed (lower k1)");
    }
    clock.lap("sampling");

    const Matrix landmark_x = gather_rows(x, part.landmarks);
    const Matrix landmark_search = projected ? gather_rows(*projected, part.landmarks) : landmark_x;
    const Index k2 = std::min(cfg.k2.value_or(k2_heuristic(landmarks)), landmarks - 1);
    diag.k2 = k2;
    const NeighborGraph landmark_graph = knn_search(landmark_search, k2, cfg.threads);
    const AffinityMatrix affinity = high_dim_probabilities(landmark_x, landmark_graph, cfg.gamma);
    clock.lap("affinity");

    const InitialLayout init = laplacian_eigenmaps_init(affinity, cfg.dim, cfg.seed);
    clock.lap("init");

    OptimizerConfig opt = cfg.optimizer;
    opt.seed = cfg.seed;
    opt.threads = cfg.threads;
    OptimizationResult optimized = optimize_embedding(affinity, init, opt);
    diag.loss_history = std::move(optimized.loss_history);
    clock.lap("optimize");

    const ScaleVector scales = optimal_scales(landmark_graph, landmark_x, optimized.coords);
    const Matrix rest_x = gather_rows(x, part.non_landmarks);
    std::optional<Matrix> rest_search;
    if (projected) {
        rest_search = gather_rows(*projected, part.non_landmarks);
    }
    NonLandmarkInput input{rest_x, landmark_x, optimized.coords, scales};
    if (projected) {
        input.search_space = &*rest_search;
        input.landmark_search_space = &landmark_search;
    }
    input.seed = cfg.seed;
    input.threads = cfg.threads;
    const Matrix rest_y = incorporate_all(input, cfg.dim);
    clock.lap("clle");

    Matrix unique_y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.dim));
    for (std::size_t r = 0; r < part.landmarks.size(); ++r) {
        unique_y.row(static_cast<Eigen::Index>(part.landmarks[r])) = optimized.coords.row(static_cast<Eigen::Index>(r));
    }
    for (std::size_t r = 0; r < part.non_landmarks.size(); ++r) {
        unique_y.row(static_cast<Eigen::Index>(part.non_landmarks[r])) = rest_y.row(static_cast<Eigen::Index>(r));
    }
    const IndexList position = dedup.expansion();
    result.coords.resize(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(cfg.dim));
    for (Index r = 0; r < data.size(); ++r) {
        result.coords.row(static_cast<Eigen::Index>(r)) = unique_y.row(static_cast<Eigen::Index>(position[r]));
    }
    clock.lap("merge");
    return result;
}

}  // namespace scml
