#include "scml/neighbors.hpp"

#include "scml/error.hpp"
#include "scml/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace scml {

namespace {

constexpr Index leaf_size = 16;

void offer(std::vector<Neighbor>& heap, Index k, Neighbor cand) {
    if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end());
    } else if (cand < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end());
    }
}

}  // namespace

KnnIndex::KnnIndex(Matrix points) : points_(std::move(points)) {
    order_.resize(size());
    for (Index i = 0; i < order_.size(); ++i) {
        order_[i] = i;
    }
    if (dim() <= kd_tree_max_dim && size() > leaf_size) {
        nodes_.reserve(2 * size() / leaf_size + 1);
        build(0, size());
    }
}

int KnnIndex::build(Index begin, Index end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{begin, end, -1, 0.0, -1, -1});
    if (end - begin <= leaf_size) {
        return id;
    }

    Eigen::Index best_dim = 0;
    double best_spread = -1.0;
    for (Eigen::Index d = 0; d < dim(); ++d) {
        double lo = points_(static_cast<Eigen::Index>(order_[begin]), d);
        double hi = lo;
        for (Index i = begin + 1; i < end; ++i) {
            const double v = points_(static_cast<Eigen::Index>(order_[i]), d);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            best_dim = d;
        }
    }
    if (best_spread <= 0.0) {
        return id;  // all coincident: keep as an oversized leaf
    }

    const Index mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end), [&](Index a, Index b) {
                         const double va = points_(static_cast<Eigen::Index>(a), best_dim);
                         const double vb = points_(static_cast<Eigen::Index>(b), best_dim);
                         return va < vb || (va == vb && a < b);
                     });
    const double split = points_(static_cast<Eigen::Index>(order_[mid]), best_dim);

    const int left = build(begin, mid);
    const int right = build(mid, end);
    Node& node = nodes_[static_cast<std::size_t>(id)];
    node.split_dim = best_dim;
    node.split_value = split;
    node.left = left;
    node.right = right;
    return id;
}

void KnnIndex::scan(Index begin, Index end, const double* q, Index k, std::optional<Index> exclude,
                    std::vector<Neighbor>& heap) const {
    const auto d = dim();
    for (Index i = begin; i < end; ++i) {
        const Index p = order_[i];
        if (exclude && *exclude == p) {
            continue;
        }
        offer(heap, k, Neighbor{p, squared_distance(q, points_.row(static_cast<Eigen::Index>(p)).data(), d)});
    }
}

void KnnIndex::search(int node_id, const double* q, Index k, std::optional<Index> exclude,
                      std::vector<Neighbor>& heap) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.split_dim < 0) {
        scan(node.begin, node.end, q, k, exclude, heap);
        return;
    }
    // Left holds coordinates <= split, right holds coordinates >= split.
    const double diff = q[node.split_dim] - node.split_value;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    search(near, q, k, exclude, heap);
    if (heap.size() < k || diff * diff <= heap.front().sq_dist) {
        search(far, q, k, exclude, heap);
    }
}

std::vector<Neighbor> KnnIndex::query(std::span<const double> q, Index k, std::optional<Index> exclude) const {
    std::vector<Neighbor> heap;
    heap.reserve(k + 1);
    if (k == 0) {
        return heap;
    }
    if (uses_tree()) {
        search(0, q.data(), k, exclude, heap);
    } else {
        scan(0, size(), q.data(), k, exclude, heap);
    }
    std::sort_heap(heap.begin(), heap.end());
    return heap;
}

NeighborGraph knn_search(const Matrix& points, Index k, unsigned threads) {
    const Index n = static_cast<Index>(points.rows());
    if (k == 0) {
        throw InvalidArgument("k must be positive");
    }
    if (k >= n) {
        throw KTooLarge(k, n);
    }
    const KnnIndex index(points);

    NeighborGraph g;
    g.n = n;
    g.k = k;
    g.indices.resize(n * k);
    g.distances.resize(n * k);
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (Index i = begin; i < end; ++i) {
            const auto row = index.points().row(static_cast<Eigen::Index>(i));
            const auto nbrs = index.query({row.data(), static_cast<std::size_t>(row.size())}, k, i);
            for (Index j = 0; j < k; ++j) {
                g.indices[i * k + j] = nbrs[j].index;
                g.distances[i * k + j] = std::sqrt(nbrs[j].sq_dist);
            }
        }
    });
    return g;
}

NeighborGraph knn_query(const KnnIndex& index, const Matrix& queries, Index k, unsigned threads) {
    if (queries.cols() != index.dim()) {
        throw InvalidArgument("query dimension does not match index");
    }
    if (k == 0 || k > index.size()) {
        throw KTooLarge(k, index.size());
    }
    const Index m = static_cast<Index>(queries.rows());
    NeighborGraph g;
    g.n = m;
    g.k = k;
    g.indices.resize(m * k);
    g.distances.resize(m * k);
    parallel_for(m, threads, [&](std::size_t begin, std::size_t end) {
        for (Index i = begin; i < end; ++i) {
            const auto row = queries.row(static_cast<Eigen::Index>(i));
            const auto nbrs = index.query({row.data(), static_cast<std::size_t>(row.size())}, k);
            for (Index j = 0; j < k; ++j) {
                g.indices[i * k + j] = nbrs[j].index;
                g.distances[i * k + j] = std::sqrt(nbrs[j].sq_dist);
            }
        }
    });
    return g;
}

RnnCounts rnn_counts(const NeighborGraph& g) {
    RnnCounts r;
    r.counts.assign(g.n, 0);
    for (Index idx : g.indices) {
        ++r.counts[idx];
    }
    return r;
}

}  // namespace scml
