#pragma once

#include "scml/affinity.hpp"
#include "scml/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace scml {

/// Learning-rate schedule and epoch counts. Unset rates default to 2.5N and 2N
/// for N landmarks.
struct OptimizerConfig {
    std::optional<double> eta_max;
    std::optional<double> eta_min;
    Index warmup = 10;
    Index epochs = 50;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct LearningSchedule {
    double eta_max;
    double eta_min;
    Index warmup;
    Index epochs;
};

/// Fills in landmark-count-dependent defaults and validates
/// 0 < eta_min <= eta_max and 0 <= warmup < epochs.
LearningSchedule resolve_schedule(const OptimizerConfig& cfg, Index landmark_count);

/// Unnormalized low-dimensional similarity 1 / (1 + log(1 + r^2)) of a squared distance.
inline double log_kernel(double sq_dist);

/// Sum of the kernel over all ordered pairs k != l.
double normalization_constant(const Matrix& coords, unsigned threads = 1);

double low_dim_probability(const Matrix& coords, Index i, Index j, double z);

/// KL(P || Q) over i != j with 0 log 0 = 0.
double kl_divergence(const AffinityMatrix& affinity, const Matrix& coords, unsigned threads = 1);

struct GradientEvaluation {
    Matrix gradient;
    double loss = 0.0;  // KL at the evaluated coordinates
    double z = 0.0;
};

/// Exact dense gradient of the KL cost together with the loss and normalization
/// constant from the same pass. Rows are independent and Z is reduced in row order,
/// so results do not depend on the thread count.
GradientEvaluation evaluate_gradient(const AffinityMatrix& affinity, const Matrix& coords, unsigned threads = 1);

Matrix gradient(const AffinityMatrix& affinity, const Matrix& coords, unsigned threads = 1);

/// Constant warm-up followed by cosine annealing to eta_min at the final epoch.
double learning_rate(Index epoch, const LearningSchedule& schedule);

/// (t - 1) / (t + 2)
double momentum_term(Index epoch);

/// Optimizer bookkeeping between epochs.
struct EmbeddingState {
    Matrix coords;
    Matrix prev_gradient;
    Index epoch = 0;
    double z = 0.0;
};

struct OptimizationResult {
    Matrix coords;
    /// loss_history[t] is the KL at the coordinates after t epochs (size epochs + 1).
    std::vector<double> loss_history;
};

/// Full-batch descent y(t) = y(t-1) - eta(t) * (g(t) + alpha(t) * g(t-1)), where g(t) is the
/// gradient at y(t-1). Throws NonFiniteState if the coordinates diverge.
OptimizationResult optimize_embedding(const AffinityMatrix& affinity, const InitialLayout& init,
                                      const OptimizerConfig& cfg);

inline double log_kernel(double sq_dist) {
    return 1.0 / (1.0 + std::log1p(sq_dist));
}

}  // namespace scml
