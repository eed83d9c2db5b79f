#ifndef FLSA_FCM_HPP
#define FLSA_FCM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flsa/error.hpp"
#include "flsa/linalg.hpp"
#include "flsa/random.hpp"

/**
 * @file fcm.hpp
 * @brief Fuzzy C-means by alternating membership and center updates.
 *
 * Memberships are stored c x n (cluster by point), centers c x d and points n x d.
 * The objective is J = sum_k sum_j mu_kj^q * ||x_j - v_k||^2, minimized subject to
 * every membership column lying on the probability simplex.
 */

namespace flsa {

enum class FcmInit { RandomMembership, KmeansPlusPlusCenters };

struct FcmConfig {
    Eigen::Index c = 2;
    double q = 2.0;
    int max_iter = 100;
    double epsilon = 1e-5;
    std::uint64_t seed = 0;
    FcmInit init = FcmInit::RandomMembership;
};

struct FcmResult {
    Eigen::MatrixXd memberships; // c x n
    Eigen::MatrixXd centers;     // c x d
    std::vector<double> objective_history;
    /// max |delta mu| per iteration; the first entry is +inf when there was no previous membership.
    std::vector<double> membership_change_history;
    int iterations_run = 0;
    bool converged = false;
    /// Number of dead-center reseeds performed.
    int reseeds = 0;

    double objective() const { return objective_history.empty() ? 0.0 : objective_history.back(); }
};

inline void validate(const FcmConfig& config) {
    detail::require(config.c >= 1, ErrorKind::InvalidArgument, "cluster count must be >= 1");
    detail::require(config.q > 1.0, ErrorKind::InvalidArgument, "fuzzifier must be > 1");
    detail::require(config.max_iter >= 1, ErrorKind::InvalidArgument, "max_iter must be >= 1");
    detail::require(config.epsilon > 0.0, ErrorKind::InvalidArgument, "epsilon must be > 0");
}

namespace detail {

inline double membership_weight(double mu, double q) { return q == 2.0 ? mu * mu : std::pow(mu, q); }

/// Squared distances from point `x` (length d) to every center; `ct` holds one center per column.
inline void distances_to_centers(const double* x, const Eigen::MatrixXd& ct, Eigen::VectorXd& dist) {
    const Eigen::Index d = ct.rows();
    for (Eigen::Index k = 0; k < ct.cols(); ++k) {
        const double* v = ct.col(k).data();
        double sum = 0.0;
        for (Eigen::Index i = 0; i < d; ++i) {
            const double diff = x[i] - v[i];
            sum += diff * diff;
        }
        dist(k) = sum;
    }
}

/// Membership column of one point from its squared distances to the centers.
template <class Out>
void membership_column(const Eigen::VectorXd& dist, double q, Out&& out) {
    const Eigen::Index c = dist.size();
    Eigen::Index zeros = 0;
    for (Eigen::Index k = 0; k < c; ++k) {
        zeros += dist(k) == 0.0 ? 1 : 0;
    }
    if (zeros > 0) {
        const double share = 1.0 / static_cast<double>(zeros);
        for (Eigen::Index k = 0; k < c; ++k) {
            out(k) = dist(k) == 0.0 ? share : 0.0;
        }
        return;
    }
    // Ratios against the nearest center keep every term in (0, 1].
    const double power = 1.0 / (q - 1.0);
    auto arr = out.array();
    arr = dist.minCoeff() / dist.array();
    if (power != 1.0) {
        arr = arr.pow(power);
    }
    arr /= arr.sum();
}

/// Adds point `x` with membership column `mu` to the running weighted sums (`num` is d x c).
template <class Col>
void accumulate_centers(const double* x, const Col& mu, double q, Eigen::MatrixXd& num, Eigen::VectorXd& mass) {
    const Eigen::Index d = num.rows();
    for (Eigen::Index k = 0; k < num.cols(); ++k) {
        const double w = membership_weight(mu(k), q);
        mass(k) += w;
        double* acc = num.col(k).data();
        for (Eigen::Index i = 0; i < d; ++i) {
            acc[i] += w * x[i];
        }
    }
}

/// Centers (c x d) from weighted sums; clusters with zero weight mass are listed in `dead`.
inline Eigen::MatrixXd finish_centers(const Eigen::MatrixXd& num, const Eigen::VectorXd& mass,
                                      std::vector<Eigen::Index>& dead) {
    Eigen::MatrixXd centers = num.transpose();
    dead.clear();
    for (Eigen::Index k = 0; k < centers.rows(); ++k) {
        if (mass(k) > 0.0 && std::isfinite(mass(k))) {
            centers.row(k) /= mass(k);
        } else {
            dead.push_back(k);
        }
    }
    return centers;
}

} // namespace detail

inline double objective(const Eigen::MatrixXd& points, const Eigen::MatrixXd& memberships,
                        const Eigen::MatrixXd& centers, double q) {
    detail::require(memberships.rows() == centers.rows() && memberships.cols() == points.rows() &&
                        centers.cols() == points.cols(),
                    ErrorKind::DimensionMismatch, "objective: inconsistent shapes");
    const Eigen::MatrixXd pt = points.transpose();
    const Eigen::MatrixXd ct = centers.transpose();
    Eigen::VectorXd dist(centers.rows());
    double total = 0.0;
    for (Eigen::Index j = 0; j < points.rows(); ++j) {
        detail::distances_to_centers(pt.col(j).data(), ct, dist);
        for (Eigen::Index k = 0; k < dist.size(); ++k) {
            const double mu = memberships(k, j);
            if (mu != 0.0) {
                total += detail::membership_weight(mu, q) * dist(k);
            }
        }
    }
    return total;
}

inline double objective(const Eigen::MatrixXd& points, const FcmResult& result, double q) {
    return objective(points, result.memberships, result.centers, q);
}

/**
 * Membership of every point for fixed centers:
 * mu_kj = 1 / sum_l (DIS_kj / DIS_lj)^(2/(q-1)).
 * A point lying exactly on one or more centers splits its membership evenly
 * over those centers and gets 0 elsewhere.
 */
inline Eigen::MatrixXd update_memberships(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, double q) {
    detail::require(points.cols() == centers.cols(), ErrorKind::DimensionMismatch,
                    "points and centers differ in dimension");
    detail::require(q > 1.0, ErrorKind::InvalidArgument, "fuzzifier must be > 1");
    const Eigen::MatrixXd pt = points.transpose();
    const Eigen::MatrixXd ct = centers.transpose();
    Eigen::VectorXd dist(centers.rows());
    Eigen::MatrixXd mu(centers.rows(), points.rows());
    for (Eigen::Index j = 0; j < points.rows(); ++j) {
        detail::distances_to_centers(pt.col(j).data(), ct, dist);
        detail::membership_column(dist, q, mu.col(j));
    }
    return mu;
}

namespace detail {

/// Weighted means per cluster; clusters with zero weight mass are listed in `dead`.
inline Eigen::MatrixXd weighted_centers(const Eigen::MatrixXd& points, const Eigen::MatrixXd& memberships, double q,
                                        std::vector<Eigen::Index>& dead) {
    require(memberships.cols() == points.rows(), ErrorKind::DimensionMismatch,
            "membership columns differ from point count");
    const Eigen::MatrixXd pt = points.transpose();
    Eigen::MatrixXd num = Eigen::MatrixXd::Zero(points.cols(), memberships.rows());
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(memberships.rows());
    for (Eigen::Index j = 0; j < points.rows(); ++j) {
        accumulate_centers(pt.col(j).data(), memberships.col(j), q, num, mass);
    }
    return finish_centers(num, mass, dead);
}

/// Move each dead center onto the point farthest from its nearest live center.
inline void reseed_dead_centers(const Eigen::MatrixXd& points, Eigen::MatrixXd& centers,
                                const std::vector<Eigen::Index>& dead) {
    std::vector<bool> live(static_cast<std::size_t>(centers.rows()), true);
    for (auto k : dead) {
        live[static_cast<std::size_t>(k)] = false;
    }
    for (auto k : dead) {
        Eigen::Index far = 0;
        double far_dist = -1.0;
        for (Eigen::Index j = 0; j < points.rows(); ++j) {
            double nearest = std::numeric_limits<double>::infinity();
            for (Eigen::Index l = 0; l < centers.rows(); ++l) {
                if (live[static_cast<std::size_t>(l)]) {
                    nearest = std::min(nearest, sq_distance_rows(points, j, centers, l));
                }
            }
            if (nearest > far_dist) {
                far_dist = nearest;
                far = j;
            }
        }
        centers.row(k) = points.row(far);
        live[static_cast<std::size_t>(k)] = true;
    }
}

} // namespace detail

/// v_k = sum_j mu_kj^q x_j / sum_j mu_kj^q. Throws EmptyCluster when a cluster has no weight.
inline Eigen::MatrixXd update_centers(const Eigen::MatrixXd& points, const Eigen::MatrixXd& memberships, double q) {
    std::vector<Eigen::Index> dead;
    auto centers = detail::weighted_centers(points, memberships, q, dead);
    detail::require(dead.empty(), ErrorKind::EmptyCluster,
                    dead.empty() ? std::string() : "cluster " + std::to_string(dead.front()) + " has zero weight mass");
    return centers;
}

/**
 * Fit FCM from a seeded start. Each iteration recomputes memberships for the
 * current centers, then centers for those memberships, and records J.
 * Stops once the largest membership change is <= epsilon or after max_iter.
 */
inline FcmResult fcm_fit(const Eigen::MatrixXd& points, const FcmConfig& config) {
    validate(config);
    const Eigen::Index n = points.rows();
    const Eigen::Index c = config.c;
    detail::require(n >= 1 && points.cols() >= 1, ErrorKind::InvalidArgument, "no points to cluster");
    detail::require(n >= c, ErrorKind::InvalidArgument,
                    "need at least as many points (" + std::to_string(n) + ") as clusters (" + std::to_string(c) + ")");
    detail::require(points.allFinite(), ErrorKind::InvalidArgument, "points contain non-finite values");

    FcmResult result;
    if (c == 1) {
        result.memberships = Eigen::MatrixXd::Ones(1, n);
        result.centers = points.colwise().mean();
        result.objective_history.push_back(objective(points, result.memberships, result.centers, config.q));
        result.membership_change_history.push_back(0.0);
        result.iterations_run = 1;
        result.converged = true;
        return result;
    }
    detail::require(count_distinct_rows(points, 2) > 1, ErrorKind::DegenerateInput,
                    "all points are identical; cannot form more than one cluster");

    Rng rng(config.seed);
    std::vector<Eigen::Index> dead;
    Eigen::MatrixXd mu;
    Eigen::MatrixXd centers;
    bool have_mu = false;

    if (config.init == FcmInit::RandomMembership) {
        // Uniform draw from the simplex per column: normalized unit exponentials.
        std::exponential_distribution<double> expo(1.0);
        mu.resize(c, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            double total = 0.0;
            for (Eigen::Index k = 0; k < c; ++k) {
                mu(k, j) = expo(rng);
                total += mu(k, j);
            }
            mu.col(j) /= total;
        }
        centers = detail::weighted_centers(points, mu, config.q, dead);
        if (!dead.empty()) {
            detail::reseed_dead_centers(points, centers, dead);
            result.reseeds += static_cast<int>(dead.size());
        }
        have_mu = true;
    } else {
        auto seeds = kmeanspp_seeds(points, c, rng);
        centers.resize(c, points.cols());
        for (Eigen::Index k = 0; k < c; ++k) {
            centers.row(k) = points.row(seeds[static_cast<std::size_t>(k)]);
        }
    }

    // One pass per iteration: distances to the current centers give both the objective of the
    // previous (memberships, centers) pair and the new memberships, whose weights feed the next centers.
    const Eigen::MatrixXd pt = points.transpose();
    if (!have_mu) {
        mu = Eigen::MatrixXd::Zero(c, n);
    }
    Eigen::VectorXd dist(c);
    Eigen::VectorXd col(c);
    for (int iter = 1; iter <= config.max_iter; ++iter) {
        const Eigen::MatrixXd ct = centers.transpose();
        Eigen::MatrixXd num = Eigen::MatrixXd::Zero(points.cols(), c);
        Eigen::VectorXd mass = Eigen::VectorXd::Zero(c);
        double previous_objective = 0.0;
        double change = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double* x = pt.col(j).data();
            detail::distances_to_centers(x, ct, dist);
            if (iter > 1) {
                for (Eigen::Index k = 0; k < c; ++k) {
                    const double m = mu(k, j);
                    if (m != 0.0) {
                        previous_objective += detail::membership_weight(m, config.q) * dist(k);
                    }
                }
            }
            detail::membership_column(dist, config.q, col);
            change = std::max(change, (col - mu.col(j)).cwiseAbs().maxCoeff());
            mu.col(j) = col;
            detail::accumulate_centers(x, col, config.q, num, mass);
        }
        if (iter > 1) {
            result.objective_history.push_back(previous_objective);
        }
        if (!have_mu) {
            change = std::numeric_limits<double>::infinity();
            have_mu = true;
        }

        centers = detail::finish_centers(num, mass, dead);
        if (!dead.empty()) {
            // A dead center carries no weight, so moving it leaves J unchanged.
            detail::reseed_dead_centers(points, centers, dead);
            result.reseeds += static_cast<int>(dead.size());
        }

        result.membership_change_history.push_back(change);
        result.iterations_run = iter;
        if (change <= config.epsilon) {
            result.converged = true;
            break;
        }
    }
    result.objective_history.push_back(objective(points, mu, centers, config.q));
    result.memberships = std::move(mu);
    result.centers = std::move(centers);
    return result;
}

} // namespace flsa

#endif
