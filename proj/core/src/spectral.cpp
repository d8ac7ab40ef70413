#include "scml/spectral.hpp"

#include "scml/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace scml {

namespace {

void fix_signs(Eigen::MatrixXd& vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
            const double a = std::abs(vectors(r, c));
            if (a > best + 1e-12 * std::max(1.0, best)) {
                best = a;
                arg = r;
            }
        }
        if (vectors(arg, c) < 0.0) {
            vectors.col(c) *= -1.0;
        }
    }
}

EigenPairs select(const Vector& values, const Eigen::MatrixXd& vectors, Index count, EigenOrder order) {
    // `values` ascending.
    const auto n = values.size();
    EigenPairs out;
    out.values.resize(static_cast<Eigen::Index>(count));
    out.vectors.resize(vectors.rows(), static_cast<Eigen::Index>(count));
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(count); ++c) {
        const Eigen::Index src = order == EigenOrder::smallest ? c : n - 1 - c;
        out.values[c] = values[src];
        out.vectors.col(c) = vectors.col(src);
    }
    fix_signs(out.vectors);
    return out;
}

Eigen::MatrixXd random_block(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd b(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            b(r, c) = normal(rng);
        }
    }
    return b;
}

// Orthonormalizes `block` against the columns of basis[:, :used] and itself. Columns that
// collapse are replaced by fresh random directions.
Eigen::MatrixXd orthonormalize(Eigen::MatrixXd block, const Eigen::MatrixXd& basis, Eigen::Index used,
                               std::mt19937_64& rng) {
    const auto n = block.rows();
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
        const double original = std::max(block.col(c).norm(), 1e-300);
        for (int attempt = 0; attempt < 5; ++attempt) {
            auto v = block.col(c);
            for (int pass = 0; pass < 2; ++pass) {
                if (used > 0) {
                    v -= basis.leftCols(used) * (basis.leftCols(used).transpose() * v);
                }
                if (c > 0) {
                    v -= block.leftCols(c) * (block.leftCols(c).transpose() * v);
                }
            }
            const double norm = v.norm();
            if (norm > 1e-10 * original && norm > 0.0) {
                v /= norm;
                break;
            }
            block.col(c) = random_block(n, 1, rng);
        }
    }
    return block;
}


// LU factorization of a tridiagonal matrix with partial pivoting, kept in place.
struct TridiagonalLu {
    std::vector<double> dl, d, du, du2;
    std::vector<char> swapped;

    TridiagonalLu(const Vector& diag, const Vector& sub, double shift, double tiny) {
        const auto n = static_cast<std::size_t>(diag.size());
        d.resize(n);
        dl.assign(n > 0 ? n - 1 : 0, 0.0);
        du.assign(dl.size(), 0.0);
        du2.assign(dl.size(), 0.0);
        swapped.assign(dl.size(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = diag[static_cast<Eigen::Index>(i)] - shift;
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            dl[i] = du[i] = sub[static_cast<Eigen::Index>(i)];
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(d[i]) >= std::abs(dl[i])) {
                if (d[i] == 0.0) {
                    d[i] = tiny;
                }
                const double fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                const double fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                const double temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = 1;
            }
        }
        if (n > 0 && d[n - 1] == 0.0) {
            d[n - 1] = tiny;
        }
    }

    void solve(Vector& b) const {
        const auto n = d.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            if (swapped[i] != 0) {
                std::swap(b[r], b[r + 1]);
            }
            b[r + 1] -= dl[i] * b[r];
        }
        for (std::size_t k = n; k-- > 0;) {
            const auto r = static_cast<Eigen::Index>(k);
            double v = b[r];
            if (k + 1 < n) {
                v -= du[k] * b[r + 1];
            }
            if (k + 2 < n) {
                v -= du2[k] * b[r + 2];
            }
            b[r] = v / d[k];
        }
    }
};

// Eigenvectors of the requested end of the spectrum via tridiagonalization, eigenvalues of
// the tridiagonal form and inverse iteration. Returns nothing when the residual check fails.
std::optional<EigenPairs> partial_eigen(const Eigen::MatrixXd& m, Index count, EigenOrder order, double scale) {
    const auto n = m.rows();
    const Eigen::Tridiagonalization<Eigen::MatrixXd> tri(m);
    const Vector diag = tri.diagonal();
    const Vector sub = tri.subDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> values_only;
    values_only.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (values_only.info() != Eigen::Success) {
        return std::nullopt;
    }
    const Vector& all = values_only.eigenvalues();
    const double tnorm = std::max(all.cwiseAbs().maxCoeff(), 1e-300);
    const double eps = std::numeric_limits<double>::epsilon();
    const double cluster_gap = 1e-3 * tnorm;

    const auto k = static_cast<Eigen::Index>(count);
    Vector lambda(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        lambda[c] = order == EigenOrder::smallest ? all[c] : all[n - 1 - c];
    }
    Eigen::MatrixXd z(n, k);
    std::mt19937_64 rng(n);
    double previous_shift = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
        double shift = lambda[c];
        if (c > 0 && std::abs(shift - previous_shift) < 10.0 * eps * tnorm) {
            shift = previous_shift + (order == EigenOrder::smallest ? 1.0 : -1.0) * 10.0 * eps * tnorm;
        }
        previous_shift = shift;
        const TridiagonalLu lu(diag, sub, shift, eps * tnorm);
        Vector v = random_block(n, 1, rng);
        v.normalize();
        for (int it = 0; it < 6; ++it) {
            lu.solve(v);
            for (Eigen::Index j = 0; j < c; ++j) {
                if (std::abs(lambda[j] - lambda[c]) < cluster_gap) {
                    v -= z.col(j).dot(v) * z.col(j);
                }
            }
            const double norm = v.norm();
            if (!(norm > 0.0) || !std::isfinite(norm)) {
                return std::nullopt;
            }
            v /= norm;
        }
        z.col(c) = v;
    }
    Eigen::MatrixXd vectors = tri.matrixQ() * z;
    const Eigen::MatrixXd residual = m * vectors - vectors * lambda.asDiagonal();
    if (residual.colwise().norm().maxCoeff() > 1e-10 * std::max(tnorm, scale) * std::sqrt(static_cast<double>(n))) {
        return std::nullopt;
    }
    fix_signs(vectors);
    return EigenPairs{lambda, std::move(vectors)};
}
}  // namespace

EigenPairs symmetric_eigen(const Eigen::MatrixXd& m, Index count, EigenOrder order) {
    const auto n = m.rows();
    if (m.cols() != n) {
        throw InvalidArgument("eigensolver needs a square matrix");
    }
    if (count < 1 || count > static_cast<Index>(n)) {
        throw InvalidArgument("eigenpair count out of range");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw InvalidArgument("matrix is not symmetric");
    }
    if (n >= 64 && 8 * static_cast<Eigen::Index>(count) <= n) {
        if (auto partial = partial_eigen(m, count, order, scale)) {
            return *std::move(partial);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceFailure("symmetric eigensolver did not converge");
    }
    return select(solver.eigenvalues(), solver.eigenvectors(), count, order);
}

IterativeEigenResult symmetric_eigen_iterative(const BlockOperator& op, Index n_, Index count_, EigenOrder order,
                                               double operator_norm, const IterativeEigenOptions& opts) {
    const auto n = static_cast<Eigen::Index>(n_);
    const auto count = static_cast<Eigen::Index>(count_);
    if (count < 1 || count > n) {
        throw InvalidArgument("eigenpair count out of range");
    }
    const Eigen::Index block = std::min<Eigen::Index>(n, count + 2);
    Eigen::Index max_basis = opts.max_basis > 0 ? static_cast<Eigen::Index>(opts.max_basis)
                                                : std::max<Eigen::Index>(8 * block, 120);
    max_basis = std::min(max_basis, n);
    const Eigen::Index keep = std::min<Eigen::Index>(max_basis - block, std::max<Eigen::Index>(count + block, 2 * count));
    const double tol = opts.tolerance * std::max(operator_norm, 1e-300);

    std::mt19937_64 rng(opts.seed ^ 0x5eed5eed5eedULL);
    Eigen::MatrixXd basis(n, max_basis);
    Eigen::MatrixXd applied(n, max_basis);
    Eigen::Index used = 0;
    Eigen::MatrixXd pending = orthonormalize(random_block(n, block, rng), basis, 0, rng);

    IterativeEigenResult result;
    Eigen::MatrixXd image(n, block);
    Index expansions = 0;
    while (true) {
        // Expand the basis with the pending block.
        const Eigen::Index take = std::min(pending.cols(), max_basis - used);
        op(pending.leftCols(take), image);
        basis.middleCols(used, take) = pending.leftCols(take);
        applied.middleCols(used, take) = image.leftCols(take);
        used += take;

        const bool full = used == max_basis;
        if (!full) {
            pending = orthonormalize(image.leftCols(take), basis, used, rng);
            if (used + pending.cols() > max_basis) {
                pending.conservativeResize(Eigen::NoChange, max_basis - used);
            }
            if (++expansions % 4 != 0) {
                continue;
            }
        }

        // Rayleigh-Ritz on the current basis.
        Eigen::MatrixXd h = basis.leftCols(used).transpose() * applied.leftCols(used);
        h = 0.5 * (h + h.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(h);
        Vector theta = small.eigenvalues();
        Eigen::MatrixXd s = small.eigenvectors();
        if (order == EigenOrder::largest) {
            theta.reverseInPlace();
            s = s.rowwise().reverse().eval();
        }

        const Eigen::Index wanted = std::min(count, used);
        Eigen::MatrixXd ritz = basis.leftCols(used) * s.leftCols(wanted);
        Eigen::MatrixXd ritz_image = applied.leftCols(used) * s.leftCols(wanted);
        double worst = 0.0;
        for (Eigen::Index c = 0; c < wanted; ++c) {
            worst = std::max(worst, (ritz_image.col(c) - theta[c] * ritz.col(c)).norm());
        }
        result.max_residual = worst;
        if ((wanted == count && worst <= tol) || used == n) {
            result.converged = worst <= tol || used == n;
            Vector ascending = theta.head(count);
            result.pairs.values = ascending;
            result.pairs.vectors = ritz;
            fix_signs(result.pairs.vectors);
            return result;
        }
        if (!full) {
            continue;
        }
        if (result.restarts >= opts.max_restarts) {
            if (opts.throw_on_failure) {
                throw ConvergenceFailure("block Krylov eigensolver: residual " + std::to_string(worst) +
                                         " after " + std::to_string(result.restarts) + " restarts");
            }
            result.converged = false;
            result.pairs.values = theta.head(count);
            result.pairs.vectors = ritz;
            fix_signs(result.pairs.vectors);
            return result;
        }

        // Thick restart: keep the leading Ritz vectors, continue from their residuals.
        ++result.restarts;
        const Eigen::MatrixXd kept_s = s.leftCols(keep);
        const Eigen::MatrixXd new_basis = basis.leftCols(used) * kept_s;
        const Eigen::MatrixXd new_applied = applied.leftCols(used) * kept_s;
        Eigen::MatrixXd residual(n, block);
        for (Eigen::Index c = 0; c < block; ++c) {
            const Eigen::Index src = std::min(c, keep - 1);
            residual.col(c) = new_applied.col(src) - theta[src] * new_basis.col(src);
        }
        basis.leftCols(keep) = new_basis;
        applied.leftCols(keep) = new_applied;
        used = keep;
        pending = orthonormalize(residual, basis, used, rng);
    }
}

Matrix PcaModel::project(const Matrix& points) const {
    return (points.rowwise() - mean.transpose()) * components;
}

std::pair<PcaModel, Matrix> pca_fit_project(const Matrix& points, double target_rate) {
    const auto n = points.rows();
    const auto dim = points.cols();
    if (n < 2) {
        throw InvalidArgument("PCA needs at least two points");
    }
    if (!(target_rate > 0.0 && target_rate < 1.0)) {
        throw InvalidArgument("PCA target rate must lie in (0,1)");
    }
    PcaModel model;
    model.mean = points.colwise().mean().transpose();
    const Matrix centered = points.rowwise() - model.mean.transpose();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    cov = 0.5 * (cov + cov.transpose()).eval();

    const auto eig = symmetric_eigen(cov, static_cast<Index>(dim), EigenOrder::largest);
    model.eigenvalues = eig.values.cwiseMax(0.0);
    const double total = model.eigenvalues.sum();

    Eigen::Index keep = 1;
    std::vector<double> cumulative;
    if (total > 0.0) {
        double acc = 0.0;
        for (keep = 0; keep < dim;) {
            acc += model.eigenvalues[keep];
            cumulative.push_back(acc / total);
            ++keep;
            if (acc / total > target_rate) {
                break;
            }
        }
    } else {
        cumulative.push_back(1.0);
    }
    model.components = eig.vectors.leftCols(keep);
    model.explained = Eigen::Map<Vector>(cumulative.data(), static_cast<Eigen::Index>(cumulative.size()));
    Matrix projected = centered * model.components;
    return {std::move(model), std::move(projected)};
}

SparseMatrix normalized_laplacian(const SparseMatrix& p) {
    const auto n = p.rows();
    Vector degree = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (SparseMatrix::InnerIterator it(p, i); it; ++it) {
            degree[i] += it.value();
        }
    }
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(p.nonZeros() + n));
    for (Eigen::Index i = 0; i < n; ++i) {
        double self = 0.0;
        if (!(degree[i] > 0.0)) {
            self = 1e-12;
            degree[i] = self;
        }
        t.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0 - self / degree[i]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (SparseMatrix::InnerIterator it(p, i); it; ++it) {
            const auto j = it.col();
            t.emplace_back(static_cast<int>(i), static_cast<int>(j),
                           -it.value() / std::sqrt(degree[i] * degree[j]));
        }
    }
    SparseMatrix l(n, n);
    l.setFromTriplets(t.begin(), t.end());
    return l;
}

InitialLayout laplacian_eigenmaps_init(const AffinityMatrix& affinity, Index dim, std::uint64_t seed) {
    const auto n = affinity.P.rows();
    if (dim < 1 || static_cast<Eigen::Index>(dim) + 1 > n) {
        throw InvalidArgument("Laplacian eigenmaps need dim + 1 <= landmark count");
    }
    const SparseMatrix lap = normalized_laplacian(affinity.P);

    // Trivial null vector D^{1/2} 1; shifting it to the top of the spectrum makes the
    // smallest `dim` eigenvectors of the deflated operator exactly eigenvectors 2..dim+1.
    Vector trivial(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double deg = 0.0;
        for (SparseMatrix::InnerIterator it(affinity.P, i); it; ++it) {
            deg += it.value();
        }
        trivial[i] = std::sqrt(deg > 0.0 ? deg : 1e-12);
    }
    trivial.normalize();
    constexpr double shift = 3.0;

    Eigen::MatrixXd vectors;
    if (static_cast<Index>(n) <= dense_eigen_limit) {
        Eigen::MatrixXd dense = Eigen::MatrixXd(lap);
        dense += shift * trivial * trivial.transpose();
        vectors = symmetric_eigen(dense, dim, EigenOrder::smallest).vectors;
    } else {
        const BlockOperator op = [&](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) {
            out = lap * in;
            out += shift * trivial * (trivial.transpose() * in);
        };
        IterativeEigenOptions opts;
        opts.seed = seed;
        // An unconverged Ritz basis is still a usable starting layout.
        opts.throw_on_failure = false;
        vectors = symmetric_eigen_iterative(op, static_cast<Index>(n), dim, EigenOrder::smallest, 2.0 + shift, opts)
                      .pairs.vectors;
    }

    InitialLayout layout;
    layout.coords.resize(n, static_cast<Eigen::Index>(dim));
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(dim); ++c) {
        Vector col = vectors.col(c);
        col.array() -= col.mean();
        const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(n));
        if (sd > 0.0) {
            col /= sd;
        }
        layout.coords.col(c) = col;
    }
    return layout;
}

}  // namespace scml
