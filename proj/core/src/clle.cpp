#include "scml/clle.hpp"

#include "scml/error.hpp"
#include "scml/parallel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace scml {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Vector random_unit(Eigen::Index dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(dim);
    do {
        for (Eigen::Index d = 0; d < dim; ++d) {
            v[d] = normal(rng);
        }
    } while (v.norm() == 0.0);
    return v.normalized();
}

}  // namespace

LleWeights lle_weights(std::span<const double> x, const Matrix& neighbors, double delta) {
    const auto k = neighbors.rows();
    if (k < 1) {
        throw InvalidArgument("LLE weights need at least one neighbor");
    }
    if (static_cast<Eigen::Index>(x.size()) != neighbors.cols()) {
        throw InvalidArgument("point and neighbor dimensions differ");
    }
    const Eigen::Map<const Eigen::RowVectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    const Matrix offsets = (-neighbors).rowwise() + xv;
    Eigen::MatrixXd gram = offsets * offsets.transpose();

    LleWeights out;
    out.indices.resize(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) {
        out.indices[static_cast<std::size_t>(i)] = static_cast<Index>(i);
    }
    const double trace = gram.trace();
    if (!(trace > 0.0)) {
        out.weights = Vector::Constant(k, 1.0 / static_cast<double>(k));
        return out;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (lo < 1e-10 * hi) {
        gram.diagonal().array() += (delta * delta / static_cast<double>(k)) * trace;
        out.regularized = true;
    }
    const Vector solved = gram.ldlt().solve(Vector::Ones(k));
    out.weights = solved / solved.sum();
    return out;
}

ScaleVector optimal_scales(const NeighborGraph& landmark_knn, const Matrix& high, const Matrix& low) {
    const Index n = landmark_knn.n;
    if (static_cast<Index>(high.rows()) != n || static_cast<Index>(low.rows()) != n) {
        throw InvalidArgument("landmark graph, features and embedding sizes differ");
    }
    ScaleVector out;
    out.scales.resize(n);
    for (Index m = 0; m < n; ++m) {
        const auto nb = landmark_knn.neighbors(m);
        double num = 0.0;
        double den = 0.0;
        for (std::size_t a = 0; a < nb.size(); ++a) {
            for (std::size_t b = a + 1; b < nb.size(); ++b) {
                const auto ia = static_cast<Eigen::Index>(nb[a]);
                const auto ib = static_cast<Eigen::Index>(nb[b]);
                const double d = std::sqrt(squared_distance(high.row(ia), high.row(ib)));
                const double e = std::sqrt(squared_distance(low.row(ia), low.row(ib)));
                num += d * e;
                den += d * d;
            }
        }
        // Degenerate neighborhoods fall back to a neutral scale.
        out.scales[m] = (den > 0.0 && num > 0.0) ? num / den : 1.0;
    }
    return out;
}

Vector place_non_landmark(std::span<const double> x, const Matrix& neighbor_high, const Matrix& neighbor_low,
                          const LleWeights& w, double scale_m, std::uint64_t tiebreak_seed) {
    const auto k = neighbor_low.rows();
    if (neighbor_high.rows() != k || w.weights.size() != k || k < 1) {
        throw InvalidArgument("inconsistent neighbor records");
    }
    const Eigen::Map<const Eigen::RowVectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    const Vector ym = neighbor_low.row(0).transpose();
    const double dm = scale_m * (xv - neighbor_high.row(0)).norm();
    if (dm == 0.0) {
        return ym;
    }

    const Vector recon = neighbor_low.transpose() * w.weights;
    const Vector r = ym - recon;
    const double rn = r.norm();
    const Vector dir = rn > 0.0 ? Vector(r / rn) : random_unit(ym.size(), tiebreak_seed);

    // Both stationary points of the Lagrangian; keep the one nearer the reconstruction.
    Vector plus = ym + dm * dir;
    Vector minus = ym - dm * dir;
    if ((minus - recon).squaredNorm() < (plus - recon).squaredNorm()) {
        return minus;
    }
    return plus;
}

Matrix incorporate_all(const NonLandmarkInput& in, Index dim) {
    const Index landmarks = static_cast<Index>(in.landmark_high.rows());
    const auto k = static_cast<Eigen::Index>(dim + 1);
    const auto m = in.high.rows();
    Matrix out(m, static_cast<Eigen::Index>(dim));
    if (m == 0) {
        return out;
    }
    if (landmarks < dim + 1) {
        throw TooFewLandmarks("placing non-landmarks needs at least " + std::to_string(dim + 1) +
                              " landmarks, got " + std::to_string(landmarks));
    }
    if (static_cast<Index>(in.landmark_low.rows()) != landmarks || in.landmark_low.cols() != out.cols() ||
        in.scales.scales.size() != landmarks) {
        throw InvalidArgument("landmark embedding, features and scales are inconsistent");
    }
    const Matrix& search = in.search_space ? *in.search_space : in.high;
    const Matrix& landmark_search = in.landmark_search_space ? *in.landmark_search_space : in.landmark_high;
    if (search.rows() != m || landmark_search.rows() != static_cast<Eigen::Index>(landmarks)) {
        throw InvalidArgument("search-space matrices are inconsistent");
    }

    const KnnIndex index(landmark_search);
    parallel_for(static_cast<std::size_t>(m), in.threads, [&](std::size_t begin, std::size_t end) {
        Matrix nb_high(k, in.landmark_high.cols());
        Matrix nb_low(k, static_cast<Eigen::Index>(dim));
        for (auto i = static_cast<Eigen::Index>(begin); i < static_cast<Eigen::Index>(end); ++i) {
            const auto q = search.row(i);
            const auto nbrs = index.query({q.data(), static_cast<std::size_t>(q.size())}, static_cast<Index>(k));
            for (Eigen::Index t = 0; t < k; ++t) {
                const auto li = static_cast<Eigen::Index>(nbrs[static_cast<std::size_t>(t)].index);
                nb_high.row(t) = in.landmark_high.row(li);
                nb_low.row(t) = in.landmark_low.row(li);
            }
            const auto x = in.high.row(i);
            const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
            auto w = lle_weights(xs, nb_high);
            for (Eigen::Index t = 0; t < k; ++t) {
                w.indices[static_cast<std::size_t>(t)] = nbrs[static_cast<std::size_t>(t)].index;
            }
            const double scale = in.scales.scales[nbrs.front().index];
            out.row(i) = place_non_landmark(xs, nb_high, nb_low, w, scale,
                                            mix_seed(in.seed, static_cast<std::uint64_t>(i))).transpose();
        }
    });
    return out;
}

}  // namespace scml
