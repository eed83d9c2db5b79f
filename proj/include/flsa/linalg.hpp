#ifndef FLSA_LINALG_HPP
#define FLSA_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "flsa/error.hpp"
#include "flsa/random.hpp"

/**
 * @file linalg.hpp
 * @brief Truncated SVD for the document embedding, and the squared distance kernel.
 */

namespace flsa {

/// Top-d singular triplets, A ~= U diag(S) Vt.
struct SvdFactors {
    Eigen::MatrixXd U;  // m x d, orthonormal columns
    Eigen::VectorXd S;  // d, descending, >= 0
    Eigen::MatrixXd Vt; // d x n, orthonormal rows
    int iterations = 0;

    Eigen::Index dim() const noexcept { return S.size(); }
};

/// Document coordinates, one row per document.
struct Embedding {
    Eigen::MatrixXd points; // n x d

    Eigen::Index size() const noexcept { return points.rows(); }
    Eigen::Index dim() const noexcept { return points.cols(); }
};

struct SvdOptions {
    Eigen::Index oversample = 10;
    int max_iter = 300;
    /// Converged once ||A v_k - s_k u_k|| <= tolerance * s_1 for every kept k.
    double tolerance = 1e-10;
};

namespace detail {

inline Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& block) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(block);
    return qr.householderQ() * Eigen::MatrixXd::Identity(block.rows(), block.cols());
}

/// Make the largest-magnitude entry of every left vector positive.
inline void fix_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& vt) {
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
        Eigen::Index best = 0;
        u.col(k).cwiseAbs().maxCoeff(&best);
        if (u(best, k) < 0.0) {
            u.col(k) *= -1.0;
            vt.row(k) *= -1.0;
        }
    }
}

} // namespace detail

/**
 * Top-`d` singular triplets by randomized subspace iteration with a seeded
 * Gaussian start block of `d + oversample` columns. When that block already
 * spans the smaller dimension the problem is solved densely instead.
 */
template <class Matrix>
SvdFactors truncated_svd(const Matrix& a, Eigen::Index d, std::uint64_t seed, const SvdOptions& options = {}) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    const Eigen::Index rank_cap = std::min(m, n);
    detail::require(d >= 1 && d <= rank_cap, ErrorKind::InvalidArgument,
                    "SVD dimension " + std::to_string(d) + " outside [1, " + std::to_string(rank_cap) + "]");

    SvdFactors out;
    const Eigen::Index block = std::min(d + options.oversample, rank_cap);

    if (block == rank_cap) {
        Eigen::MatrixXd dense = Eigen::MatrixXd(a);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.U = svd.matrixU().leftCols(d);
        out.S = svd.singularValues().head(d);
        out.Vt = svd.matrixV().leftCols(d).transpose();
        detail::fix_signs(out.U, out.Vt);
        return out;
    }

    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd omega(n, block);
    for (Eigen::Index c = 0; c < block; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) {
            omega(r, c) = normal(rng);
        }
    }

    Eigen::MatrixXd q = detail::orthonormalize(a * omega);
    for (int iter = 1; iter <= options.max_iter; ++iter) {
        // A^T Q = P R, so Q^T A = (P R)^T and the Ritz triplets come from the SVD of the small R.
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(a.transpose() * q);
        Eigen::MatrixXd p = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
        Eigen::MatrixXd r = qr.matrixQR().topRows(block).template triangularView<Eigen::Upper>();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);

        Eigen::MatrixXd u = q * svd.matrixV().leftCols(d);
        Eigen::VectorXd s = svd.singularValues().head(d);
        Eigen::MatrixXd v = p * svd.matrixU().leftCols(d);

        Eigen::MatrixXd residual = a * v - u * s.asDiagonal();
        const double scale = svd.singularValues()(0);
        bool converged = true;
        for (Eigen::Index k = 0; k < d; ++k) {
            if (residual.col(k).norm() > options.tolerance * scale) {
                converged = false;
                break;
            }
        }
        if (converged) {
            out.U = std::move(u);
            out.S = std::move(s);
            out.Vt = v.transpose();
            out.iterations = iter;
            detail::fix_signs(out.U, out.Vt);
            return out;
        }
        q = detail::orthonormalize(a * p);
    }
    throw Error(ErrorKind::ConvergenceFailure,
                "truncated SVD did not converge in " + std::to_string(options.max_iter) + " iterations");
}

/// Row j is column j of Vt scaled by the singular values.
inline Embedding embed_documents(const SvdFactors& f) {
    return Embedding{f.Vt.transpose() * f.S.asDiagonal()};
}

/// Coordinates of new columns in the embedding space, U^T a for each column a.
template <class Matrix>
Embedding project_columns(const SvdFactors& f, const Matrix& columns) {
    detail::require(columns.rows() == f.U.rows(), ErrorKind::DimensionMismatch,
                    "projected columns have a different row count than U");
    Eigen::MatrixXd coords = (columns.transpose() * f.U);
    return Embedding{std::move(coords)};
}

inline double sq_distance(std::span<const double> a, std::span<const double> b) {
    detail::require(a.size() == b.size(), ErrorKind::DimensionMismatch,
                    "points of dimension " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return sum;
}

/// Squared distance between row `i` of `x` and row `k` of `centers`.
inline double sq_distance_rows(const Eigen::MatrixXd& x, Eigen::Index i, const Eigen::MatrixXd& centers,
                               Eigen::Index k) noexcept {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double diff = x(i, c) - centers(k, c);
        sum += diff * diff;
    }
    return sum;
}

/**
 * k-means++ seeding: the first center uniformly at random, each further one
 * with probability proportional to the squared distance to the nearest chosen center.
 * Returns row indices into `x`.
 */
inline std::vector<Eigen::Index> kmeanspp_seeds(const Eigen::MatrixXd& x, Eigen::Index k, Rng& rng) {
    const Eigen::Index n = x.rows();
    detail::require(k >= 1 && k <= n, ErrorKind::InvalidArgument, "cannot seed more centers than points");
    std::vector<Eigen::Index> chosen;
    chosen.reserve(static_cast<std::size_t>(k));
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    chosen.push_back(first(rng));

    std::vector<double> nearest(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        nearest[static_cast<std::size_t>(i)] = (x.row(i) - x.row(chosen.back())).squaredNorm();
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (static_cast<Eigen::Index>(chosen.size()) < k) {
        double total = 0.0;
        for (double v : nearest) {
            total += v;
        }
        Eigen::Index pick = 0;
        if (total <= 0.0) {
            // Every point sits on a chosen center; take the first unchosen index.
            while (std::find(chosen.begin(), chosen.end(), pick) != chosen.end()) {
                ++pick;
            }
        } else {
            double target = unit(rng) * total;
            double acc = 0.0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += nearest[static_cast<std::size_t>(i)];
                if (acc >= target && nearest[static_cast<std::size_t>(i)] > 0.0) {
                    pick = i;
                    break;
                }
            }
        }
        chosen.push_back(pick);
        for (Eigen::Index i = 0; i < n; ++i) {
            auto& cur = nearest[static_cast<std::size_t>(i)];
            cur = std::min(cur, (x.row(i) - x.row(pick)).squaredNorm());
        }
    }
    return chosen;
}

/// Number of distinct rows, exact comparison.
inline Eigen::Index count_distinct_rows(const Eigen::MatrixXd& x, Eigen::Index stop_at) {
    std::vector<Eigen::Index> reps;
    for (Eigen::Index i = 0; i < x.rows() && static_cast<Eigen::Index>(reps.size()) < stop_at; ++i) {
        bool seen = false;
        for (auto r : reps) {
            if ((x.row(i).array() == x.row(r).array()).all()) {
                seen = true;
                break;
            }
        }
        if (!seen) {
            reps.push_back(i);
        }
    }
    return static_cast<Eigen::Index>(reps.size());
}

} // namespace flsa

#endif
