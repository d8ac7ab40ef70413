#pragma once

#include "scml/neighbors.hpp"

namespace scml {

/// Landmark / non-landmark split produced by plum pudding sampling.
struct LandmarkPartition {
    IndexList landmarks;      // in selection order
    IndexList non_landmarks;  // ascending
    Index k1 = 0;
};

/// Plum pudding sampling. Points are queued by descending reverse-neighbor count
/// (ties by ascending index); the queue head becomes a landmark and those of its
/// k1 neighbors still queued become non-landmarks, until the queue is empty.
LandmarkPartition pps_sample(const NeighborGraph& g, const RnnCounts& rnn);

/// Builds the k1 graph and samples. k1 == 0 makes every point a landmark.
LandmarkPartition pps_sample(const Matrix& points, Index k1, unsigned threads = 1);

/// The queue order used by pps_sample.
IndexList rnn_queue_order(const RnnCounts& rnn);

double sample_rate(const LandmarkPartition& p, Index n);

}  // namespace scml
