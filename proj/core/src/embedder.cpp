#include "scml/embedder.hpp"

#include "scml/error.hpp"
#include "scml/parallel.hpp"

#include <cmath>
#include <numbers>

namespace scml {

LearningSchedule resolve_schedule(const OptimizerConfig& cfg, Index landmark_count) {
    LearningSchedule s;
    s.eta_max = cfg.eta_max.value_or(2.5 * static_cast<double>(landmark_count));
    s.eta_min = cfg.eta_min.value_or(2.0 * static_cast<double>(landmark_count));
    s.warmup = cfg.warmup;
    s.epochs = cfg.epochs;
    if (!(s.eta_min > 0.0) || !(s.eta_min <= s.eta_max)) {
        throw InvalidConfig("learning rates must satisfy 0 < eta_min <= eta_max");
    }
    if (s.epochs < 1 || s.warmup >= s.epochs) {
        throw InvalidConfig("epochs must satisfy 0 <= warmup < epochs");
    }
    return s;
}

double normalization_constant(const Matrix& coords, unsigned threads) {
    const Index n = static_cast<Index>(coords.rows());
    std::vector<double> rows(n, 0.0);
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (Index i = begin; i < end; ++i) {
            double s = 0.0;
            for (Index j = 0; j < n; ++j) {
                if (j != i) {
                    s += log_kernel(squared_distance(coords.row(static_cast<Eigen::Index>(i)),
                                                     coords.row(static_cast<Eigen::Index>(j))));
                }
            }
            rows[i] = s;
        }
    });
    double z = 0.0;
    for (double r : rows) {
        z += r;
    }
    return z;
}

double low_dim_probability(const Matrix& coords, Index i, Index j, double z) {
    if (i == j) {
        throw InvalidArgument("low-dimensional probability is defined for i != j");
    }
    return log_kernel(squared_distance(coords.row(static_cast<Eigen::Index>(i)),
                                       coords.row(static_cast<Eigen::Index>(j)))) / z;
}

GradientEvaluation evaluate_gradient(const AffinityMatrix& affinity, const Matrix& coords, unsigned threads) {
    const SparseMatrix& p = affinity.P;
    const auto n = coords.rows();
    const auto dim = coords.cols();
    if (p.rows() != n) {
        throw InvalidArgument("affinity and layout sizes differ");
    }

    Matrix attract = Matrix::Zero(n, dim);
    Matrix repulse = Matrix::Zero(n, dim);
    std::vector<double> z_rows(static_cast<std::size_t>(n), 0.0);
    std::vector<double> kl_rows(static_cast<std::size_t>(n), 0.0);
    std::vector<double> p_rows(static_cast<std::size_t>(n), 0.0);

    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> diff(static_cast<std::size_t>(dim));
        for (auto i = static_cast<Eigen::Index>(begin); i < static_cast<Eigen::Index>(end); ++i) {
            const double* yi = coords.row(i).data();
            double* rep = repulse.row(i).data();
            double z = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) {
                    continue;
                }
                const double* yj = coords.row(j).data();
                double sq = 0.0;
                for (Eigen::Index d = 0; d < dim; ++d) {
                    diff[static_cast<std::size_t>(d)] = yi[d] - yj[d];
                    sq += diff[static_cast<std::size_t>(d)] * diff[static_cast<std::size_t>(d)];
                }
                const double w = log_kernel(sq);
                z += w;
                // dw/d(r^2) = -w^2 / (1 + r^2)
                const double f = w * w / (1.0 + sq);
                for (Eigen::Index d = 0; d < dim; ++d) {
                    rep[d] += f * diff[static_cast<std::size_t>(d)];
                }
            }
            z_rows[static_cast<std::size_t>(i)] = z;

            double* att = attract.row(i).data();
            double kl = 0.0;
            double psum = 0.0;
            for (SparseMatrix::InnerIterator it(p, i); it; ++it) {
                const double pij = it.value();
                if (pij <= 0.0 || it.col() == i) {
                    continue;
                }
                const double* yj = coords.row(it.col()).data();
                const double sq = squared_distance(yi, yj, dim);
                const double w = log_kernel(sq);
                const double f = pij * w / (1.0 + sq);
                for (Eigen::Index d = 0; d < dim; ++d) {
                    att[d] += f * (yi[d] - yj[d]);
                }
                kl += pij * (std::log(pij) - std::log(w));
                psum += pij;
            }
            kl_rows[static_cast<std::size_t>(i)] = kl;
            p_rows[static_cast<std::size_t>(i)] = psum;
        }
    });

    GradientEvaluation ev;
    double psum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        ev.z += z_rows[static_cast<std::size_t>(i)];
        ev.loss += kl_rows[static_cast<std::size_t>(i)];
        psum += p_rows[static_cast<std::size_t>(i)];
    }
    ev.loss += psum * std::log(ev.z);
    ev.gradient = 4.0 * (attract - repulse / ev.z);
    return ev;
}

Matrix gradient(const AffinityMatrix& affinity, const Matrix& coords, unsigned threads) {
    return evaluate_gradient(affinity, coords, threads).gradient;
}

double kl_divergence(const AffinityMatrix& affinity, const Matrix& coords, unsigned threads) {
    const double z = normalization_constant(coords, threads);
    const SparseMatrix& p = affinity.P;
    double kl = 0.0;
    for (Eigen::Index i = 0; i < p.outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(p, i); it; ++it) {
            const double pij = it.value();
            if (pij <= 0.0 || it.col() == i) {
                continue;
            }
            const double q = low_dim_probability(coords, static_cast<Index>(i), static_cast<Index>(it.col()), z);
            kl += pij * std::log(pij / q);
        }
    }
    return kl;
}

double learning_rate(Index epoch, const LearningSchedule& s) {
    if (epoch <= s.warmup) {
        return s.eta_max;
    }
    const double phase = static_cast<double>(epoch - s.warmup) / static_cast<double>(s.epochs - s.warmup);
    return s.eta_min + 0.5 * (s.eta_max - s.eta_min) * (1.0 + std::cos(phase * std::numbers::pi));
}

double momentum_term(Index epoch) {
    if (epoch < 1) {
        throw InvalidArgument("epochs are counted from 1");
    }
    return (static_cast<double>(epoch) - 1.0) / (static_cast<double>(epoch) + 2.0);
}

OptimizationResult optimize_embedding(const AffinityMatrix& affinity, const InitialLayout& init,
                                      const OptimizerConfig& cfg) {
    const auto schedule = resolve_schedule(cfg, affinity.size());
    if (init.coords.rows() != affinity.P.rows()) {
        throw InvalidArgument("initial layout does not match the affinity matrix");
    }

    EmbeddingState state;
    state.coords = init.coords;
    state.prev_gradient = Matrix::Zero(init.coords.rows(), init.coords.cols());

    OptimizationResult result;
    result.loss_history.reserve(schedule.epochs + 1);
    for (Index t = 1; t <= schedule.epochs; ++t) {
        auto ev = evaluate_gradient(affinity, state.coords, cfg.threads);
        result.loss_history.push_back(ev.loss);
        state.z = ev.z;

        const double eta = learning_rate(t, schedule);
        const double alpha = momentum_term(t);
        state.coords -= eta * (ev.gradient + alpha * state.prev_gradient);
        state.prev_gradient = std::move(ev.gradient);
        state.epoch = t;

        if (!state.coords.allFinite()) {
            throw NonFiniteState("embedding diverged at epoch " + std::to_string(t) +
                                 "; the learning rate is likely too large");
        }
    }
    const double final_loss = kl_divergence(affinity, state.coords, cfg.threads);
    if (!std::isfinite(final_loss)) {
        throw NonFiniteState("final loss is not finite");
    }
    result.loss_history.push_back(final_loss);
    result.coords = std::move(state.coords);
    return result;
}

}  // namespace scml
