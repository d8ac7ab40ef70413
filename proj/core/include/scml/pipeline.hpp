#pragma once

#include "scml/affinity.hpp"
#include "scml/dataio.hpp"
#include "scml/embedder.hpp"
#include "scml/sampler.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scml {

/// PCA is applied to the neighbor searches only when both thresholds are exceeded.
struct PcaGate {
    Index n_threshold = 5000;
    Index d_threshold = 50;
    double target_rate = 0.8;
};

struct ScmlConfig {
    Index k1 = 20;
    std::optional<Index> k2;  // default: k2_heuristic(landmark count)
    Index dim = 2;
    double gamma = default_gamma;
    OptimizerConfig optimizer;
    PcaGate pca_gate;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    void validate() const;
};

struct StageTiming {
    std::string stage;
    double wall_ms = 0.0;
};

struct Diagnostics {
    Index input_rows = 0;
    Index unique_rows = 0;
    Index landmark_count = 0;
    double sample_rate = 0.0;
    Index k1 = 0;
    Index k2 = 0;
    Index search_dim = 0;  // dimensionality of the neighbor-search space
    bool pca_applied = false;
    std::vector<double> loss_history;
    std::vector<StageTiming> timings;
    IndexList landmarks;  // unique-row indices, in selection order
};

struct EmbedResult {
    Matrix coords;  // one row per input row, input order
    Diagnostics diagnostics;
};

/// Sampling, landmark embedding and non-landmark placement, end to end.
/// Throws TooFewPoints when fewer than dim + 2 distinct rows remain and
/// TooFewLandmarks when sampling leaves fewer than dim + 2 landmarks.
EmbedResult embed(const Dataset& data, const ScmlConfig& cfg);

}  // namespace scml
