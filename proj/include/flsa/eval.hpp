#ifndef FLSA_EVAL_HPP
#define FLSA_EVAL_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flsa/corpus.hpp"
#include "flsa/error.hpp"
#include "flsa/flsa.hpp"
#include "flsa/io.hpp"
#include "flsa/lda.hpp"
#include "flsa/likelihood.hpp"
#include "flsa/linalg.hpp"
#include "flsa/random.hpp"

/**
 * @file eval.hpp
 * @brief Internal cluster validation (k-means + Calinski-Harabasz), held-out
 * likelihood, runtime benchmarking and classifier feature export.
 */

namespace flsa {

struct ClusteringResult {
    std::vector<Eigen::Index> assignments;
    Eigen::MatrixXd centroids; // k x f
    double inertia = 0.0;
    std::vector<double> inertia_history;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline Eigen::Index nearest_centroid(const Eigen::MatrixXd& x, Eigen::Index i, const Eigen::MatrixXd& centroids,
                                     double& best) {
    Eigen::Index arg = 0;
    best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < centroids.rows(); ++k) {
        const double dist = sq_distance_rows(x, i, centroids, k);
        if (dist < best) {
            best = dist;
            arg = k;
        }
    }
    return arg;
}

inline double inertia_of(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& assign,
                         const Eigen::MatrixXd& centroids) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        total += sq_distance_rows(x, i, centroids, assign[static_cast<std::size_t>(i)]);
    }
    return total;
}

} // namespace detail

/**
 * Lloyd's algorithm from k-means++ seeds. Stops when no assignment changes or
 * after `iters` rounds. A cluster that empties takes over the point farthest
 * from its own centroid among clusters with more than one member.
 */
inline ClusteringResult kmeans(const Eigen::MatrixXd& features, Eigen::Index k, int iters, std::uint64_t seed) {
    const Eigen::Index n = features.rows();
    detail::require(k >= 1, ErrorKind::InvalidArgument, "k must be >= 1");
    detail::require(iters >= 1, ErrorKind::InvalidArgument, "iterations must be >= 1");
    detail::require(n >= k, ErrorKind::InvalidArgument, "fewer rows than clusters");
    detail::require(count_distinct_rows(features, k) >= k, ErrorKind::DegenerateInput,
                    "fewer than " + std::to_string(k) + " distinct rows");

    Rng rng(seed);
    auto seeds = kmeanspp_seeds(features, k, rng);
    ClusteringResult out;
    out.centroids.resize(k, features.cols());
    for (Eigen::Index c = 0; c < k; ++c) {
        out.centroids.row(c) = features.row(seeds[static_cast<std::size_t>(c)]);
    }
    out.assignments.assign(static_cast<std::size_t>(n), -1);

    for (int iter = 1; iter <= iters; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            double dist = 0.0;
            const auto best = detail::nearest_centroid(features, i, out.centroids, dist);
            auto& cur = out.assignments[static_cast<std::size_t>(i)];
            if (cur != best) {
                cur = best;
                changed = true;
            }
        }
        out.iterations = iter;
        if (!changed) {
            out.converged = true;
            break;
        }

        std::vector<Eigen::Index> sizes;
        while (true) {
            sizes.assign(static_cast<std::size_t>(k), 0);
            Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, features.cols());
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto c = out.assignments[static_cast<std::size_t>(i)];
                ++sizes[static_cast<std::size_t>(c)];
                sums.row(c) += features.row(i);
            }
            Eigen::Index empty = -1;
            for (Eigen::Index c = 0; c < k; ++c) {
                if (sizes[static_cast<std::size_t>(c)] > 0) {
                    out.centroids.row(c) = sums.row(c) / static_cast<double>(sizes[static_cast<std::size_t>(c)]);
                } else if (empty < 0) {
                    empty = c;
                }
            }
            if (empty < 0) {
                break;
            }
            Eigen::Index far = -1;
            double far_dist = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto c = out.assignments[static_cast<std::size_t>(i)];
                if (sizes[static_cast<std::size_t>(c)] <= 1) {
                    continue;
                }
                const double dist = sq_distance_rows(features, i, out.centroids, c);
                if (dist > far_dist) {
                    far_dist = dist;
                    far = i;
                }
            }
            out.assignments[static_cast<std::size_t>(far)] = empty;
            out.centroids.row(empty) = features.row(far);
        }
        out.inertia_history.push_back(detail::inertia_of(features, out.assignments, out.centroids));
    }
    out.inertia = detail::inertia_of(features, out.assignments, out.centroids);
    return out;
}

struct ChScore {
    double value = std::numeric_limits<double>::infinity();
    bool defined = false;
};

/**
 * Calinski-Harabasz variance ratio [B / (k - 1)] / [W / (n - k)], with B the
 * between-cluster and W the within-cluster sum of squares. Cluster ids must
 * cover [0, k) with no empty cluster. Throws UndefinedIndex for k < 2, n <= k or W = 0.
 */
inline double ch_index(const Eigen::MatrixXd& features, const std::vector<Eigen::Index>& assignments) {
    const Eigen::Index n = features.rows();
    detail::require(static_cast<Eigen::Index>(assignments.size()) == n, ErrorKind::DimensionMismatch,
                    "assignment count differs from rows");
    detail::require(n > 0, ErrorKind::InvalidArgument, "no rows");
    const Eigen::Index k = *std::max_element(assignments.begin(), assignments.end()) + 1;
    detail::require(*std::min_element(assignments.begin(), assignments.end()) >= 0, ErrorKind::InvalidArgument,
                    "negative cluster id");
    detail::require(k >= 2, ErrorKind::UndefinedIndex, "CH index needs at least 2 clusters");
    detail::require(n > k, ErrorKind::UndefinedIndex, "CH index needs more rows than clusters");

    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(k, features.cols());
    std::vector<double> sizes(static_cast<std::size_t>(k), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto c = assignments[static_cast<std::size_t>(i)];
        means.row(c) += features.row(i);
        sizes[static_cast<std::size_t>(c)] += 1.0;
    }
    for (Eigen::Index c = 0; c < k; ++c) {
        detail::require(sizes[static_cast<std::size_t>(c)] > 0.0, ErrorKind::InvalidArgument,
                        "cluster " + std::to_string(c) + " is empty");
        means.row(c) /= sizes[static_cast<std::size_t>(c)];
    }
    const Eigen::RowVectorXd global = features.colwise().mean();

    double between = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
        between += sizes[static_cast<std::size_t>(c)] * (means.row(c) - global).squaredNorm();
    }
    double within = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        within += (features.row(i) - means.row(assignments[static_cast<std::size_t>(i)])).squaredNorm();
    }
    detail::require(within > 0.0, ErrorKind::UndefinedIndex, "within-cluster sum of squares is zero");
    return (between / static_cast<double>(k - 1)) / (within / static_cast<double>(n - k));
}

/// Non-throwing CH: undefined cases come back as +inf with `defined == false`.
inline ChScore ch_score(const Eigen::MatrixXd& features, const std::vector<Eigen::Index>& assignments) {
    try {
        return {ch_index(features, assignments), true};
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::UndefinedIndex) {
            throw;
        }
        return {};
    }
}

struct ChPoint {
    Eigen::Index k = 0;
    ChScore score;
};

/// k-means then CH for every k; the run for k is seeded with derive_seed(seed, "kmeans", k).
inline std::vector<ChPoint> ch_curve(const Eigen::MatrixXd& features, const std::vector<Eigen::Index>& ks, int iters,
                                     std::uint64_t seed) {
    std::vector<ChPoint> out;
    for (auto k : ks) {
        auto clusters = kmeans(features, k, iters, derive_seed(seed, "kmeans", static_cast<std::uint64_t>(k)));
        out.push_back({k, ch_score(features, clusters.assignments)});
    }
    return out;
}

/// Documents as rows with topic proportions as features (the transpose of P(T|D)).
inline Eigen::MatrixXd document_features(const Eigen::MatrixXd& p_t_given_d) { return p_t_given_d.transpose(); }

/**
 * Held-out log-likelihood of an FLSA model: fold the test documents in against
 * the frozen centers, then apply the shared token-mixture likelihood.
 */
inline LoglikResult holdout_loglik(const TopicModel& model, const DocTermMatrix& test) {
    detail::require(test.docs() > 0 && test.total() > 0, ErrorKind::EmptyTest, "test set has no in-vocabulary tokens");
    detail::require(!model.global_weights.empty() && model.projection.size() > 0 && model.centers.size() > 0,
                    ErrorKind::InvalidArgument, "model lacks fold-in factors");
    return mixture_loglik(model.p_w_given_t, fold_in(model, test), test);
}

/// CSV header doc_id,t0..t{c-1},label; row j is column j of P(T|D).
inline void export_features(const TopicModel& model, const std::filesystem::path& path) {
    const auto n = model.docs();
    detail::require(model.doc_ids.empty() || static_cast<Eigen::Index>(model.doc_ids.size()) == n,
                    ErrorKind::DimensionMismatch, "document id count differs from P(T|D) columns");
    auto out = io::open_out(path);
    out << "doc_id";
    for (Eigen::Index t = 0; t < model.c; ++t) {
        out << ",t" << t;
    }
    out << ",label\n";
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        out << (model.doc_ids.empty() ? "d" + std::to_string(j) : model.doc_ids[ju]);
        for (Eigen::Index t = 0; t < model.c; ++t) {
            out << ',' << io::format_double(model.p_t_given_d(t, j));
        }
        out << ',';
        if (ju < model.labels.size() && model.labels[ju]) {
            out << *model.labels[ju];
        }
        out << '\n';
    }
    io::finish(out, path);
}

struct Timing {
    std::string method;
    Eigen::Index topics = 0;
    double median_seconds = 0.0;
    std::vector<double> samples;
};

inline double median(std::vector<double> v) {
    detail::require(!v.empty(), ErrorKind::InvalidArgument, "median of nothing");
    std::sort(v.begin(), v.end());
    const auto mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

/// Ordinary least-squares slope of ys on xs.
inline double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    detail::require(xs.size() == ys.size() && xs.size() >= 2, ErrorKind::InvalidArgument,
                    "slope needs two or more paired values");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(ys.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    detail::require(sxx > 0.0, ErrorKind::InvalidArgument, "slope needs distinct x values");
    return sxy / sxx;
}

struct BenchConfig {
    std::vector<GtwScheme> schemes = {GtwScheme::Entropy};
    std::vector<Eigen::Index> topic_counts;
    FlsaConfig flsa;
    /// Unset skips the LDA baseline.
    std::optional<LdaConfig> lda;
    int repeats = 3;
};

/**
 * Wall-clock seconds of a full fit per (method, topic count), median over
 * `repeats` runs. Runs are serial.
 */
inline std::vector<Timing> runtime_bench(const DocTermMatrix& matrix, const BenchConfig& config) {
    detail::require(matrix.docs() > 0 && matrix.total() > 0, ErrorKind::InvalidArgument, "benchmark corpus is empty");
    detail::require(config.topic_counts.size() >= 3, ErrorKind::InvalidArgument, "need at least 3 topic counts");
    detail::require(config.repeats >= 1, ErrorKind::InvalidArgument, "repeats must be >= 1");
    using clock = std::chrono::steady_clock;
    std::vector<Timing> out;

    auto time_it = [&](const std::string& method, Eigen::Index topics, auto&& fn) {
        Timing t{method, topics, 0.0, {}};
        for (int r = 0; r < config.repeats; ++r) {
            const auto start = clock::now();
            fn();
            t.samples.push_back(std::chrono::duration<double>(clock::now() - start).count());
        }
        t.median_seconds = median(t.samples);
        out.push_back(std::move(t));
    };

    for (auto scheme : config.schemes) {
        for (auto c : config.topic_counts) {
            auto fc = config.flsa;
            fc.scheme = scheme;
            fc.topics = c;
            time_it("flsa-" + std::string(to_string(scheme)), c, [&] { (void)fit_flsa(matrix, fc); });
        }
    }
    if (config.lda) {
        for (auto c : config.topic_counts) {
            auto lc = *config.lda;
            lc.k_topics = static_cast<int>(c);
            time_it("lda", c, [&] { (void)lda_fit(matrix, lc); });
        }
    }
    return out;
}

} // namespace flsa

#endif
