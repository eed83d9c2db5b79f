#ifndef FLSA_FLSA_HPP
#define FLSA_FLSA_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "flsa/corpus.hpp"
#include "flsa/error.hpp"
#include "flsa/fcm.hpp"
#include "flsa/linalg.hpp"
#include "flsa/parallel.hpp"
#include "flsa/random.hpp"
#include "flsa/weighting.hpp"

/**
 * @file flsa.hpp
 * @brief Fuzzy latent semantic analysis: weighting, SVD embedding, fuzzy clustering,
 * then the probability chain from memberships to word-topic distributions.
 *
 * Shapes: P(W|T) is m x c, P(T|D) is c x n, P(D|T) is n x c, P(W|D) is m x n.
 * Steps that need a probability measure use the rectified weighted matrix
 * max(a_ij, 0), since IDF and ProbIDF may produce negative weights.
 */

namespace flsa {

struct FlsaConfig {
    GtwScheme scheme = GtwScheme::Entropy;
    Eigen::Index topics = 2;
    Eigen::Index dim = 2;
    double q = 2.0;
    int max_iter = 100;
    double epsilon = 1e-5;
    FcmInit init = FcmInit::RandomMembership;
    std::uint64_t seed = 0;

    /// FCM settings for a given topic count, with the seed derived for the clustering step.
    FcmConfig fcm_config(Eigen::Index c) const {
        return FcmConfig{c, q, max_iter, epsilon, derive_seed(seed, "fcm"), init};
    }
    std::uint64_t svd_seed() const { return derive_seed(seed, "svd"); }
};

struct TopicModel {
    Eigen::MatrixXd p_w_given_t; // m x c
    Eigen::MatrixXd p_t_given_d; // c x n
    GtwScheme scheme = GtwScheme::Entropy;
    Eigen::Index c = 0;
    Eigen::Index d = 0;
    std::uint64_t seed = 0;
    double q = 2.0;
    double epsilon = 1e-5;
    double objective = 0.0;

    // Needed to fold in unseen documents.
    std::vector<double> global_weights; // g_i per term
    Eigen::MatrixXd projection;         // U, m x d
    Eigen::MatrixXd centers;            // c x d

    // Row and column labels; empty when fitted from a bare matrix.
    std::vector<std::string> vocab;
    std::vector<std::string> doc_ids;
    std::vector<std::optional<std::string>> labels;

    // Diagnostics.
    std::size_t rectified_entries = 0;
    std::vector<Eigen::Index> excluded_docs;
    int fcm_iterations = 0;
    bool fcm_converged = false;

    Eigen::Index terms() const noexcept { return p_w_given_t.rows(); }
    Eigen::Index docs() const noexcept { return p_t_given_d.cols(); }
};

struct IntermediateDistributions {
    Eigen::VectorXd p_d;         // n
    Eigen::MatrixXd p_d_given_t; // n x c
    SparseReal p_w_given_d;      // m x n
};

struct Rectified {
    SparseReal values;
    std::size_t zeroed = 0;
};

inline Rectified rectify(const SparseReal& values) {
    Rectified out{values, 0};
    for (Eigen::Index j = 0; j < out.values.outerSize(); ++j) {
        for (SparseReal::InnerIterator it(out.values, j); it; ++it) {
            if (it.value() < 0.0) {
                it.valueRef() = 0.0;
                ++out.zeroed;
            }
        }
    }
    out.values.prune(0.0, 0.0);
    return out;
}

/// P(D_j): column mass over total mass of an already rectified matrix.
inline Eigen::VectorXd doc_prior(const SparseReal& rectified) {
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(rectified.cols());
    for (Eigen::Index j = 0; j < rectified.outerSize(); ++j) {
        for (SparseReal::InnerIterator it(rectified, j); it; ++it) {
            detail::require(it.value() >= 0.0, ErrorKind::InvalidArgument, "doc_prior needs a nonnegative matrix");
            mass(j) += it.value();
        }
    }
    const double total = mass.sum();
    detail::require(total > 0.0, ErrorKind::ZeroMass, "weighted matrix has no positive mass");
    return mass / total;
}

inline Eigen::VectorXd doc_prior(const WeightedMatrix& weighted) { return doc_prior(rectify(weighted.values).values); }

/**
 * P(D_j|T_k) = P(T_k|D_j) P(D_j) / sum_j P(T_k|D_j) P(D_j).
 * Returns n x c.
 */
inline Eigen::MatrixXd doc_given_topic(const Eigen::MatrixXd& p_t_given_d, const Eigen::VectorXd& p_d) {
    detail::require(p_t_given_d.cols() == p_d.size(), ErrorKind::DimensionMismatch,
                    "P(T|D) columns differ from P(D) length");
    Eigen::MatrixXd joint = (p_t_given_d * p_d.asDiagonal()).transpose();
    for (Eigen::Index k = 0; k < joint.cols(); ++k) {
        const double mass = joint.col(k).sum();
        detail::require(mass > 0.0, ErrorKind::EmptyTopic, "topic " + std::to_string(k) + " has no document mass");
        joint.col(k) /= mass;
    }
    return joint;
}

struct WordGivenDoc {
    SparseReal p;                       // m x n
    std::vector<Eigen::Index> excluded; // columns without positive mass, left as zero
};

/// Column-normalize a rectified matrix into P(W|D).
inline WordGivenDoc word_given_doc(const SparseReal& rectified) {
    WordGivenDoc out{rectified, {}};
    for (Eigen::Index j = 0; j < out.p.outerSize(); ++j) {
        double mass = 0.0;
        for (SparseReal::InnerIterator it(out.p, j); it; ++it) {
            detail::require(it.value() >= 0.0, ErrorKind::InvalidArgument, "word_given_doc needs a nonnegative matrix");
            mass += it.value();
        }
        if (mass <= 0.0) {
            out.excluded.push_back(j);
            continue;
        }
        for (SparseReal::InnerIterator it(out.p, j); it; ++it) {
            it.valueRef() /= mass;
        }
    }
    detail::require(static_cast<Eigen::Index>(out.excluded.size()) < out.p.cols(), ErrorKind::ZeroColumn,
                    "every document lost its mass");
    return out;
}

inline WordGivenDoc word_given_doc(const WeightedMatrix& weighted) {
    return word_given_doc(rectify(weighted.values).values);
}

/// P(W_i|T_k) = sum_j P(W_i|D_j) P(D_j|T_k), m x c.
inline Eigen::MatrixXd word_given_topic(const SparseReal& p_w_given_d, const Eigen::MatrixXd& p_d_given_t) {
    detail::require(p_w_given_d.cols() == p_d_given_t.rows(), ErrorKind::DimensionMismatch,
                    "P(W|D) columns differ from P(D|T) rows");
    return p_w_given_d * p_d_given_t;
}

/// Everything produced along the way; `fit_flsa` keeps only the model.
struct FlsaFit {
    TopicModel model;
    IntermediateDistributions dists;
    SvdFactors svd;
    Embedding embedding;
    FcmResult fcm;
};

namespace detail {

template <class F>
auto run_step(const char* step, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw e.with_step(step);
    }
}

} // namespace detail

inline WeightedMatrix weight_for_fit(const DocTermMatrix& matrix, GtwScheme scheme) {
    return detail::run_step("weighting", [&] { return apply_weighting(matrix, scheme); });
}

inline std::pair<SvdFactors, Embedding> embed_for_fit(const WeightedMatrix& weighted, const FlsaConfig& config) {
    auto svd = detail::run_step("svd", [&] { return truncated_svd(weighted.values, config.dim, config.svd_seed()); });
    auto emb = embed_documents(svd);
    return {std::move(svd), std::move(emb)};
}

/// Probability steps from a weighted matrix and fitted memberships.
inline void fill_distributions(FlsaFit& fit, const WeightedMatrix& weighted) {
    auto rect = rectify(weighted.values);
    fit.model.rectified_entries = rect.zeroed;
    fit.dists.p_d = detail::run_step("doc_prior", [&] { return doc_prior(rect.values); });
    fit.dists.p_d_given_t =
        detail::run_step("doc_given_topic", [&] { return doc_given_topic(fit.model.p_t_given_d, fit.dists.p_d); });
    auto wgd = detail::run_step("word_given_doc", [&] { return word_given_doc(rect.values); });
    fit.model.excluded_docs = std::move(wgd.excluded);
    fit.dists.p_w_given_d = std::move(wgd.p);
    fit.model.p_w_given_t = word_given_topic(fit.dists.p_w_given_d, fit.dists.p_d_given_t);
}

inline FlsaFit fit_flsa_detailed(const DocTermMatrix& matrix, const FlsaConfig& config) {
    detail::require(matrix.terms() > 0 && matrix.docs() > 0, ErrorKind::InvalidArgument, "empty document-term matrix");
    detail::require(config.topics >= 1, ErrorKind::InvalidArgument, "topic count must be >= 1");
    detail::require(static_cast<Eigen::Index>(matrix.docs()) >= config.topics, ErrorKind::InvalidArgument,
                    "fewer documents than topics");

    FlsaFit fit;
    auto weighted = weight_for_fit(matrix, config.scheme);
    std::tie(fit.svd, fit.embedding) = embed_for_fit(weighted, config);
    fit.fcm = detail::run_step("fcm", [&] { return fcm_fit(fit.embedding.points, config.fcm_config(config.topics)); });

    auto& model = fit.model;
    model.p_t_given_d = fit.fcm.memberships;
    model.scheme = config.scheme;
    model.c = config.topics;
    model.d = config.dim;
    model.seed = config.seed;
    model.q = config.q;
    model.epsilon = config.epsilon;
    model.objective = fit.fcm.objective();
    model.global_weights = weighted.weights;
    model.projection = fit.svd.U;
    model.centers = fit.fcm.centers;
    model.fcm_iterations = fit.fcm.iterations_run;
    model.fcm_converged = fit.fcm.converged;

    fill_distributions(fit, weighted);
    return fit;
}

inline TopicModel fit_flsa(const DocTermMatrix& matrix, const FlsaConfig& config) {
    return fit_flsa_detailed(matrix, config).model;
}

/// Fit and attach the vocabulary, document ids and labels of the corpus.
inline TopicModel fit_flsa(const BuiltCorpus& corpus, const FlsaConfig& config) {
    auto model = fit_flsa(corpus.matrix, config);
    model.vocab = corpus.vocab.terms();
    model.doc_ids = corpus.doc_ids;
    model.labels = corpus.labels;
    return model;
}

/**
 * Topic memberships of unseen documents: weight with the trained global weights,
 * project onto the trained left singular vectors, then one membership update
 * against the frozen centers. Returns c x n_test; columns of documents without
 * any in-vocabulary term hold uniform memberships.
 */
inline Eigen::MatrixXd fold_in(const TopicModel& model, const DocTermMatrix& test) {
    detail::require(static_cast<Eigen::Index>(test.terms()) == model.terms(), ErrorKind::DimensionMismatch,
                    "test matrix vocabulary size differs from the model");
    SparseReal weighted = scale_rows(test, model.global_weights);
    Eigen::MatrixXd coords = weighted.transpose() * model.projection;
    Eigen::MatrixXd mu = update_memberships(coords, model.centers, model.q);
    for (Eigen::Index j = 0; j < weighted.cols(); ++j) {
        if (test.doc_length(static_cast<std::size_t>(j)) == 0) {
            mu.col(j).setConstant(1.0 / static_cast<double>(model.c));
        }
    }
    return mu;
}

struct TopWord {
    std::size_t term;
    std::string word;
    double probability;
};

/// The `k` most probable words of every topic; ties go to the lexicographically smaller word.
inline std::vector<std::vector<TopWord>> top_words(const Eigen::MatrixXd& p_w_given_t,
                                                   const std::vector<std::string>& vocab, std::size_t k) {
    detail::require(static_cast<Eigen::Index>(vocab.size()) == p_w_given_t.rows(), ErrorKind::DimensionMismatch,
                    "vocabulary size differs from P(W|T) rows");
    std::vector<std::vector<TopWord>> out;
    std::vector<std::size_t> order(vocab.size());
    for (Eigen::Index t = 0; t < p_w_given_t.cols(); ++t) {
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        const std::size_t take = std::min(k, order.size());
        auto cmp = [&](std::size_t a, std::size_t b) {
            const double pa = p_w_given_t(static_cast<Eigen::Index>(a), t);
            const double pb = p_w_given_t(static_cast<Eigen::Index>(b), t);
            return pa != pb ? pa > pb : vocab[a] < vocab[b];
        };
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), cmp);
        std::vector<TopWord> words;
        for (std::size_t r = 0; r < take; ++r) {
            words.push_back({order[r], vocab[order[r]], p_w_given_t(static_cast<Eigen::Index>(order[r]), t)});
        }
        out.push_back(std::move(words));
    }
    return out;
}

struct KneeResult {
    std::size_t index = 0;
    std::vector<double> distances;
    bool degenerate = false;
};

/**
 * Knee of a curve: the point farthest from the chord joining the first and
 * last points, after min-max normalizing both axes. A curve with no point
 * off the chord is degenerate and reports the first index.
 */
inline KneeResult find_knee(const std::vector<double>& xs, const std::vector<double>& ys) {
    detail::require(xs.size() == ys.size(), ErrorKind::DimensionMismatch, "knee: x and y lengths differ");
    detail::require(xs.size() >= 3, ErrorKind::InvalidArgument, "knee: need at least 3 points");
    KneeResult out;
    out.distances.assign(xs.size(), 0.0);

    auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
    auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
    const double xspan = *xmax - *xmin;
    const double yspan = *ymax - *ymin;
    if (!(xspan > 0.0) || !(yspan > 0.0)) {
        out.degenerate = true;
        return out;
    }

    auto nx = [&](std::size_t i) { return (xs[i] - *xmin) / xspan; };
    auto ny = [&](std::size_t i) { return (ys[i] - *ymin) / yspan; };
    const double x0 = nx(0), y0 = ny(0);
    const double x1 = nx(xs.size() - 1), y1 = ny(ys.size() - 1);
    const double len = std::hypot(x1 - x0, y1 - y0);
    if (!(len > 0.0)) {
        out.degenerate = true;
        return out;
    }

    double best = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dist = std::abs((y1 - y0) * nx(i) - (x1 - x0) * ny(i) + x1 * y0 - y1 * x0) / len;
        out.distances[i] = dist;
        if (dist > best) {
            best = dist;
            out.index = i;
        }
    }
    if (best <= 1e-12) {
        out.degenerate = true;
        out.index = 0;
    }
    return out;
}

struct TopicCountEstimate {
    Eigen::Index chosen = 0;
    std::vector<Eigen::Index> candidates;
    std::vector<double> objectives;
    KneeResult knee;
    /// Set when J increases somewhere along the candidates; the knee is still reported.
    bool non_decreasing_warning = false;
};

/**
 * Fit FCM for every candidate topic count on one shared embedding and pick the
 * knee of the final-objective curve. Candidates run on up to `jobs` threads;
 * each slot is written independently so the curve does not depend on scheduling.
 */
inline TopicCountEstimate estimate_topic_count(const DocTermMatrix& matrix, const FlsaConfig& config,
                                               const std::vector<Eigen::Index>& candidates, unsigned jobs = 1) {
    detail::require(candidates.size() >= 3, ErrorKind::InvalidArgument, "need at least 3 candidate topic counts");
    detail::require(std::is_sorted(candidates.begin(), candidates.end()) &&
                        std::adjacent_find(candidates.begin(), candidates.end()) == candidates.end(),
                    ErrorKind::InvalidArgument, "candidates must be strictly ascending");
    detail::require(candidates.front() >= 1, ErrorKind::InvalidArgument, "candidate topic counts must be >= 1");
    detail::require(static_cast<Eigen::Index>(matrix.docs()) >= candidates.back(), ErrorKind::InvalidArgument,
                    "fewer documents than the largest candidate");

    auto weighted = weight_for_fit(matrix, config.scheme);
    auto [svd, embedding] = embed_for_fit(weighted, config);

    TopicCountEstimate out;
    out.candidates = candidates;
    out.objectives.assign(candidates.size(), 0.0);
    parallel_for(candidates.size(), jobs, [&](std::size_t i) {
        auto result = detail::run_step("fcm", [&] { return fcm_fit(embedding.points, config.fcm_config(candidates[i])); });
        out.objectives[i] = result.objective();
    });

    for (std::size_t i = 1; i < out.objectives.size(); ++i) {
        if (out.objectives[i] > out.objectives[i - 1]) {
            out.non_decreasing_warning = true;
        }
    }
    std::vector<double> xs(candidates.begin(), candidates.end());
    out.knee = find_knee(xs, out.objectives);
    out.chosen = candidates[out.knee.index];
    return out;
}

} // namespace flsa

#endif
