#include "scml/affinity.hpp"

#include "scml/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace scml {

Index k2_heuristic(Index n) {
    if (n == 0) {
        throw InvalidArgument("k2 heuristic needs at least one landmark");
    }
    if (n >= 1000) {
        // ceil(log2 n) for integers
        return static_cast<Index>(std::bit_width(n - 1)) + 18;
    }
    if (n >= 50) {
        return (n + 49) / 50 + 8;
    }
    if (n >= 9) {
        return 9;
    }
    return n;
}

std::vector<IndexList> candidate_pool(const NeighborGraph& g) {
    std::vector<IndexList> pool(g.n);
    for (Index i = 0; i < g.n; ++i) {
        for (Index j : g.neighbors(i)) {
            pool[i].push_back(j);
            pool[j].push_back(i);
        }
    }
    for (auto& row : pool) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return pool;
}

double SnnMatrix::at(Index i, Index j) const {
    const auto& row = pool[i];
    const auto it = std::lower_bound(row.begin(), row.end(), j);
    if (it == row.end() || *it != j) {
        return 0.0;
    }
    return values[i][static_cast<std::size_t>(it - row.begin())];
}

double SnnMatrix::row_max(Index i) const {
    double m = 0.0;
    for (double v : values[i]) {
        m = std::max(m, v);
    }
    return m;
}

SnnMatrix snn_matrix(const NeighborGraph& g, const RnnCounts& rnn) {
    if (rnn.counts.size() != g.n) {
        throw InvalidArgument("reverse-neighbor counts do not match graph size");
    }
    std::vector<IndexList> sorted(g.n);
    for (Index i = 0; i < g.n; ++i) {
        const auto nb = g.neighbors(i);
        sorted[i].assign(nb.begin(), nb.end());
        std::sort(sorted[i].begin(), sorted[i].end());
    }

    SnnMatrix snn;
    snn.pool = candidate_pool(g);
    snn.values.resize(g.n);
    for (Index i = 0; i < g.n; ++i) {
        auto& vals = snn.values[i];
        vals.reserve(snn.pool[i].size());
        for (Index j : snn.pool[i]) {
            const auto& a = sorted[i];
            const auto& b = sorted[j];
            double s = 0.0;
            for (std::size_t p = 0, q = 0; p < a.size() && q < b.size();) {
                if (a[p] < b[q]) {
                    ++p;
                } else if (b[q] < a[p]) {
                    ++q;
                } else {
                    s += static_cast<double>(rnn.counts[a[p]]);
                    ++p;
                    ++q;
                }
            }
            vals.push_back(s);
        }
    }
    return snn;
}

ModifiedDistances modified_distances(const Matrix& points, const SnnMatrix& snn, double gamma) {
    if (!(gamma >= 0.0)) {
        throw InvalidArgument("aggregation coefficient must be non-negative");
    }
    if (static_cast<Index>(points.rows()) != snn.pool.size()) {
        throw InvalidArgument("point count does not match shared-neighbor matrix");
    }
    ModifiedDistances md;
    md.gamma = gamma;
    md.rows.resize(snn.pool.size());
    for (Index i = 0; i < snn.pool.size(); ++i) {
        const double row_max = snn.row_max(i);
        auto& row = md.rows[i];
        row.reserve(snn.pool[i].size());
        for (std::size_t t = 0; t < snn.pool[i].size(); ++t) {
            const Index j = snn.pool[i][t];
            const double dist = std::sqrt(squared_distance(points.row(static_cast<Eigen::Index>(i)),
                                                           points.row(static_cast<Eigen::Index>(j))));
            double factor = 1.0;
            if (row_max > 0.0) {
                factor = std::pow(1.0 - snn.values[i][t] / row_max, gamma);
            }
            row.push_back(Candidate{j, dist, factor * dist});
        }
    }
    return md;
}

AffinityMatrix high_dim_probabilities(const Matrix& points, const NeighborGraph& g, double gamma) {
    const Index n = static_cast<Index>(points.rows());
    if (n < 2) {
        throw InvalidArgument("at least two landmarks are required");
    }
    if (g.n != n) {
        throw InvalidArgument("neighbor graph does not match the landmark set");
    }
    const Index k2 = g.k;
    const auto snn = snn_matrix(g, rnn_counts(g));
    auto md = modified_distances(points, snn, gamma);

    AffinityMatrix out;
    out.bandwidths.resize(n);
    out.kept.resize(n);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(2 * n * k2);
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        auto& row = md.rows[i];
        const auto by_modified = [](const Candidate& a, const Candidate& b) {
            return a.modified < b.modified || (a.modified == b.modified && a.index < b.index);
        };
        const Index keep = std::min<Index>(k2, row.size());
        std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(keep), row.end(), by_modified);

        double sigma = 0.0;
        for (Index t = 0; t < keep; ++t) {
            sigma += row[t].modified;
        }
        sigma /= static_cast<double>(keep);
        if (!(sigma > 0.0)) {
            double smallest = 0.0;
            for (Index t = 0; t < keep; ++t) {
                if (row[t].distance > 0.0 && (smallest == 0.0 || row[t].distance < smallest)) {
                    smallest = row[t].distance;
                }
            }
            sigma = smallest > 0.0 ? smallest : 1e-12;
        }
        out.bandwidths[i] = sigma;

        const double inv = 1.0 / (2.0 * sigma * sigma);
        auto& kept = out.kept[i];
        kept.reserve(keep);
        for (Index t = 0; t < keep; ++t) {
            const double d = row[t].modified;
            const double p = std::exp(-d * d * inv);
            kept.push_back(row[t].index);
            total += p;
            const auto ii = static_cast<int>(i);
            const auto jj = static_cast<int>(row[t].index);
            triplets.emplace_back(ii, jj, p);
            triplets.emplace_back(jj, ii, p);
        }
    }

    out.P.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    out.P.setFromTriplets(triplets.begin(), triplets.end());
    out.P *= 1.0 / (2.0 * total);
    out.P.makeCompressed();
    return out;
}

AffinityMatrix high_dim_probabilities(const Matrix& points, Index k2, double gamma, unsigned threads) {
    return high_dim_probabilities(points, knn_search(points, k2, threads), gamma);
}

}  // namespace scml
