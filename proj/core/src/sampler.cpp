#include "scml/sampler.hpp"

#include "scml/error.hpp"

#include <algorithm>
#include <numeric>

namespace scml {

IndexList rnn_queue_order(const RnnCounts& rnn) {
    IndexList order(rnn.counts.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return rnn.counts[a] > rnn.counts[b]; });
    return order;
}

LandmarkPartition pps_sample(const NeighborGraph& g, const RnnCounts& rnn) {
    if (rnn.counts.size() != g.n) {
        throw InvalidArgument("reverse-neighbor counts do not match graph size");
    }
    LandmarkPartition p;
    p.k1 = g.k;

    std::vector<char> queued(g.n, 1);
    for (Index head : rnn_queue_order(rnn)) {
        if (!queued[head]) {
            continue;
        }
        queued[head] = 0;
        p.landmarks.push_back(head);
        for (Index nb : g.neighbors(head)) {
            if (queued[nb]) {
                queued[nb] = 0;
                p.non_landmarks.push_back(nb);
            }
        }
    }
    std::sort(p.non_landmarks.begin(), p.non_landmarks.end());
    return p;
}

LandmarkPartition pps_sample(const Matrix& points, Index k1, unsigned threads) {
    const Index n = static_cast<Index>(points.rows());
    if (k1 == 0) {
        LandmarkPartition p;
        p.landmarks.resize(n);
        std::iota(p.landmarks.begin(), p.landmarks.end(), Index{0});
        return p;
    }
    const auto g = knn_search(points, k1, threads);
    return pps_sample(g, rnn_counts(g));
}

double sample_rate(const LandmarkPartition& p, Index n) {
    if (n == 0) {
        throw InvalidArgument("sample rate of an empty dataset");
    }
    return static_cast<double>(p.landmarks.size()) / static_cast<double>(n);
}

}  // namespace scml
