#include "scml/metrics.hpp"

#include "scml/error.hpp"
#include "scml/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace scml {

LabelVector LabelVector::from_raw(const std::vector<int>& raw) {
    std::map<int, int> ids;
    for (int v : raw) {
        ids.emplace(v, 0);
    }
    int next = 0;
    for (auto& [value, id] : ids) {
        id = next++;
    }
    LabelVector out;
    out.num_classes = next;
    out.values.reserve(raw.size());
    for (int v : raw) {
        out.values.push_back(ids[v]);
    }
    return out;
}

std::string MetricReport::to_csv() const {
    std::string v = format_real(value);
    if (v.find_first_of(".eEn") == std::string::npos) {
        v += ".0";
    }
    std::string out = name + "," + v + ",";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i > 0) {
            out += ';';
        }
        out += params[i].first + "=" + params[i].second;
    }
    return out;
}

double odoc(const Matrix& points, const LabelVector& labels, const IndexList& sampled) {
    if (labels.size() != static_cast<Index>(points.rows())) {
        throw InvalidArgument("labels do not match points");
    }
    const auto c = labels.num_classes;
    const auto dim = points.cols();
    Matrix full = Matrix::Zero(c, dim);
    Matrix part = Matrix::Zero(c, dim);
    std::vector<Index> full_n(static_cast<std::size_t>(c), 0);
    std::vector<Index> part_n(static_cast<std::size_t>(c), 0);
    for (Index i = 0; i < labels.size(); ++i) {
        const int l = labels.values[i];
        full.row(l) += points.row(static_cast<Eigen::Index>(i));
        ++full_n[static_cast<std::size_t>(l)];
    }
    for (Index i : sampled) {
        if (i >= labels.size()) {
            throw InvalidArgument("sampled index out of range");
        }
        const int l = labels.values[i];
        part.row(l) += points.row(static_cast<Eigen::Index>(i));
        ++part_n[static_cast<std::size_t>(l)];
    }
    double total = 0.0;
    for (int l = 0; l < c; ++l) {
        if (full_n[static_cast<std::size_t>(l)] == 0) {
            continue;
        }
        if (part_n[static_cast<std::size_t>(l)] == 0) {
            throw EmptyClassAfterSampling(l);
        }
        const Eigen::RowVectorXd shift = full.row(l) / static_cast<double>(full_n[static_cast<std::size_t>(l)]) -
                                         part.row(l) / static_cast<double>(part_n[static_cast<std::size_t>(l)]);
        total += shift.squaredNorm();
    }
    return total;
}

double odoc(const Dataset& full, const IndexList& sampled) {
    if (!full.labels) {
        throw InvalidArgument("ODOC needs class labels");
    }
    return odoc(full.points, LabelVector::from_raw(*full.labels), sampled);
}

CongruenceResult congruence(const Matrix& high, const Matrix& low, std::optional<std::uint64_t> pair_budget,
                            std::uint64_t seed) {
    const auto n = static_cast<std::uint64_t>(high.rows());
    if (static_cast<std::uint64_t>(low.rows()) != n) {
        throw InvalidArgument("high- and low-dimensional row counts differ");
    }
    if (n < 2) {
        throw InvalidArgument("congruence coefficient needs at least two points");
    }
    const std::uint64_t total = n * (n - 1) / 2;
    const std::uint64_t limit = pair_budget.value_or(cc_exhaustive_pair_limit);
    const std::uint64_t draws = pair_budget.value_or(cc_sampled_pairs);

    double dot = 0.0;
    double hh = 0.0;
    double ll = 0.0;
    const auto accumulate = [&](Eigen::Index i, Eigen::Index j) {
        const double d = std::sqrt(squared_distance(high.row(i), high.row(j)));
        const double e = std::sqrt(squared_distance(low.row(i), low.row(j)));
        dot += d * e;
        hh += d * d;
        ll += e * e;
    };

    CongruenceResult out;
    if (total <= limit) {
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
            for (Eigen::Index j = i + 1; j < static_cast<Eigen::Index>(n); ++j) {
                accumulate(i, j);
            }
        }
        out.pairs = total;
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::uint64_t> first(0, n - 1);
        std::uniform_int_distribution<std::uint64_t> second(0, n - 2);
        for (std::uint64_t t = 0; t < draws; ++t) {
            const auto i = first(rng);
            auto j = second(rng);
            if (j >= i) {
                ++j;
            }
            accumulate(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        out.pairs = draws;
        out.sampled = true;
    }
    const double denom = std::sqrt(hh) * std::sqrt(ll);
    out.value = denom > 0.0 ? dot / denom : 0.0;
    return out;
}

double congruence_coefficient(const Matrix& high, const Matrix& low, std::optional<std::uint64_t> pair_budget,
                              std::uint64_t seed) {
    return congruence(high, low, pair_budget, seed).value;
}

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weight) {
    // Hungarian algorithm with potentials on cost = -weight (1-based internals).
    const int n = static_cast<int>(weight.size());
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        if (static_cast<int>(weight[i - 1].size()) != n) {
            throw InvalidArgument("assignment matrix must be square");
        }
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = -weight[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assignment(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j] != 0) {
            assignment[p[j] - 1] = j - 1;
        }
    }
    return assignment;
}

double hungarian_acc(const LabelVector& truth, const LabelVector& predicted) {
    if (truth.size() != predicted.size()) {
        throw InvalidArgument("label vectors differ in length");
    }
    if (truth.size() == 0) {
        throw InvalidArgument("accuracy of an empty labeling");
    }
    const int m = std::max(truth.num_classes, predicted.num_classes);
    std::vector<std::vector<double>> confusion(m, std::vector<double>(m, 0.0));
    for (Index i = 0; i < truth.size(); ++i) {
        confusion[predicted.values[i]][truth.values[i]] += 1.0;
    }
    const auto assign = max_weight_assignment(confusion);
    double matched = 0.0;
    for (int r = 0; r < m; ++r) {
        matched += confusion[r][assign[r]];
    }
    return matched / static_cast<double>(truth.size());
}

double knn_classifier_acc(const Matrix& coords, const LabelVector& labels, Index k, Index repeats,
                          std::uint64_t seed) {
    const Index n = static_cast<Index>(coords.rows());
    if (labels.size() != n) {
        throw InvalidArgument("labels do not match coordinates");
    }
    if (n < 2 || k < 1 || repeats < 1) {
        throw InvalidArgument("k-NN accuracy needs n >= 2, k >= 1 and repeats >= 1");
    }
    const Index train_n = std::clamp<Index>(static_cast<Index>(std::llround(0.25 * static_cast<double>(n))), 1, n - 1);
    const Index k_eff = std::min(k, train_n);

    std::mt19937_64 rng(seed);
    IndexList perm(n);
    double total = 0.0;
    for (Index r = 0; r < repeats; ++r) {
        std::iota(perm.begin(), perm.end(), Index{0});
        for (Index i = n - 1; i > 0; --i) {
            std::uniform_int_distribution<Index> pick(0, i);
            std::swap(perm[i], perm[pick(rng)]);
        }
        Matrix train(static_cast<Eigen::Index>(train_n), coords.cols());
        std::vector<int> train_labels(train_n);
        for (Index t = 0; t < train_n; ++t) {
            train.row(static_cast<Eigen::Index>(t)) = coords.row(static_cast<Eigen::Index>(perm[t]));
            train_labels[t] = labels.values[perm[t]];
        }
        const KnnIndex index(std::move(train));

        Index correct = 0;
        std::vector<Index> votes(static_cast<std::size_t>(labels.num_classes));
        for (Index t = train_n; t < n; ++t) {
            const auto q = coords.row(static_cast<Eigen::Index>(perm[t]));
            const auto nbrs = index.query({q.data(), static_cast<std::size_t>(q.size())}, k_eff);
            std::fill(votes.begin(), votes.end(), 0);
            Index best = 0;
            for (const auto& nb : nbrs) {
                best = std::max(best, ++votes[static_cast<std::size_t>(train_labels[nb.index])]);
            }
            int predicted = -1;
            for (const auto& nb : nbrs) {
                const int l = train_labels[nb.index];
                if (votes[static_cast<std::size_t>(l)] == best) {
                    predicted = l;
                    break;
                }
            }
            correct += predicted == labels.values[perm[t]] ? 1 : 0;
        }
        total += static_cast<double>(correct) / static_cast<double>(n - train_n);
    }
    return total / static_cast<double>(repeats);
}

KMeansResult kmeans(const Matrix& coords, Index clusters, Index max_iterations, std::uint64_t seed) {
    const auto n = coords.rows();
    const auto dim = coords.cols();
    if (clusters < 1 || static_cast<Eigen::Index>(clusters) > n) {
        throw InvalidArgument("cluster count must lie in [1, n]");
    }
    const auto c = static_cast<Eigen::Index>(clusters);
    std::mt19937_64 rng(seed);

    KMeansResult res;
    res.centers.resize(c, dim);
    std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    std::vector<char> chosen(static_cast<std::size_t>(n), 0);
    {
        std::uniform_int_distribution<Eigen::Index> uniform(0, n - 1);
        Eigen::Index pick = uniform(rng);
        for (Eigen::Index m = 0; m < c; ++m) {
            if (m > 0) {
                const double sum = std::accumulate(nearest.begin(), nearest.end(), 0.0);
                if (sum > 0.0) {
                    std::uniform_real_distribution<double> u(0.0, sum);
                    double target = u(rng);
                    pick = n - 1;
                    for (Eigen::Index i = 0; i < n; ++i) {
                        target -= nearest[static_cast<std::size_t>(i)];
                        if (target < 0.0 && nearest[static_cast<std::size_t>(i)] > 0.0) {
                            pick = i;
                            break;
                        }
                    }
                } else {
                    pick = 0;
                    while (pick < n - 1 && chosen[static_cast<std::size_t>(pick)]) {
                        ++pick;
                    }
                }
            }
            chosen[static_cast<std::size_t>(pick)] = 1;
            res.centers.row(m) = coords.row(pick);
            for (Eigen::Index i = 0; i < n; ++i) {
                nearest[static_cast<std::size_t>(i)] =
                    std::min(nearest[static_cast<std::size_t>(i)], squared_distance(coords.row(i), coords.row(pick)));
            }
        }
    }

    res.assignments.assign(static_cast<std::size_t>(n), -1);
    for (Index it = 0; it < max_iterations; ++it) {
        bool changed = false;
        double sse = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (Eigen::Index m = 0; m < c; ++m) {
                const double d = squared_distance(coords.row(i), res.centers.row(m));
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(m);
                }
            }
            sse += best_d;
            if (res.assignments[static_cast<std::size_t>(i)] != best) {
                res.assignments[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        res.sse_history.push_back(sse);
        res.iterations = it + 1;
        if (!changed) {
            break;
        }
        Matrix sums = Matrix::Zero(c, dim);
        std::vector<Index> counts(static_cast<std::size_t>(c), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int a = res.assignments[static_cast<std::size_t>(i)];
            sums.row(a) += coords.row(i);
            ++counts[static_cast<std::size_t>(a)];
        }
        for (Eigen::Index m = 0; m < c; ++m) {
            // Empty clusters keep their previous center.
            if (counts[static_cast<std::size_t>(m)] > 0) {
                res.centers.row(m) = sums.row(m) / static_cast<double>(counts[static_cast<std::size_t>(m)]);
            }
        }
    }
    return res;
}

double kmeans_cluster_acc(const Matrix& coords, const LabelVector& labels, Index iterations, std::uint64_t seed) {
    if (labels.size() != static_cast<Index>(coords.rows())) {
        throw InvalidArgument("labels do not match coordinates");
    }
    if (labels.num_classes < 1) {
        throw InvalidArgument("k-means accuracy needs at least one class");
    }
    const auto res = kmeans(coords, static_cast<Index>(labels.num_classes), iterations, seed);
    LabelVector predicted;
    predicted.values = res.assignments;
    predicted.num_classes = labels.num_classes;
    return hungarian_acc(labels, predicted);
}

}  // namespace scml
