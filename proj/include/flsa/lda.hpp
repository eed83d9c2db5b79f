#ifndef FLSA_LDA_HPP
#define FLSA_LDA_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flsa/corpus.hpp"
#include "flsa/error.hpp"
#include "flsa/likelihood.hpp"
#include "flsa/random.hpp"

/**
 * @file lda.hpp
 * @brief Collapsed Gibbs sampling LDA, used as the comparison baseline.
 */

namespace flsa {

struct LdaConfig {
    int k_topics = 10;
    /// Symmetric document-topic prior; unset means 50 / k.
    std::optional<double> alpha;
    double beta = 0.01;
    int iterations = 1000;
    std::uint64_t seed = 0;

    double resolved_alpha() const { return alpha.value_or(50.0 / static_cast<double>(k_topics)); }
};

struct LdaModel {
    Eigen::MatrixXd phi;   // m x k
    Eigen::MatrixXd theta; // k x n
    std::vector<int> assignments;
    int k = 0;
    double alpha = 0.0;
    double beta = 0.0;
    int iterations = 0;
    std::uint64_t seed = 0;

    std::vector<std::string> vocab;
    std::vector<std::string> doc_ids;
};

/**
 * Token-level state of a collapsed Gibbs sampler. Tokens of each document are
 * laid out term by term in column order of the count matrix.
 */
class GibbsSampler {
public:
    GibbsSampler(const DocTermMatrix& matrix, int k, double alpha, double beta, std::uint64_t seed)
        : k_(k), terms_(static_cast<int>(matrix.terms())), alpha_(alpha), beta_(beta), rng_(seed) {
        detail::require(k >= 1, ErrorKind::InvalidArgument, "LDA needs at least one topic");
        detail::require(alpha > 0.0 && beta > 0.0, ErrorKind::InvalidArgument, "LDA priors must be positive");
        detail::require(matrix.terms() > 0 && matrix.docs() > 0 && matrix.total() > 0, ErrorKind::InvalidArgument,
                        "LDA needs a nonempty matrix");

        const auto& counts = matrix.counts();
        doc_start_.push_back(0);
        for (Eigen::Index j = 0; j < counts.outerSize(); ++j) {
            for (SparseCounts::InnerIterator it(counts, j); it; ++it) {
                for (int r = 0; r < it.value(); ++r) {
                    words_.push_back(static_cast<int>(it.row()));
                }
            }
            doc_start_.push_back(words_.size());
        }

        const std::size_t docs = matrix.docs();
        word_topic_.assign(static_cast<std::size_t>(terms_) * k_, 0);
        doc_topic_.assign(docs * k_, 0);
        topic_total_.assign(k_, 0);
        z_.resize(words_.size());

        std::uniform_int_distribution<int> pick(0, k_ - 1);
        for (std::size_t d = 0; d < docs; ++d) {
            for (std::size_t t = doc_start_[d]; t < doc_start_[d + 1]; ++t) {
                const int topic = pick(rng_);
                z_[t] = topic;
                add(d, words_[t], topic, +1);
            }
        }
        probs_.resize(k_);
    }

    void sweep() {
        const double vbeta = terms_ * beta_;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> inv_total(k_);
        for (int t = 0; t < k_; ++t) {
            inv_total[t] = 1.0 / (topic_total_[t] + vbeta);
        }
        for (std::size_t d = 0; d + 1 < doc_start_.size(); ++d) {
            int* dt = &doc_topic_[d * k_];
            for (std::size_t i = doc_start_[d]; i < doc_start_[d + 1]; ++i) {
                const int w = words_[i];
                int* wt = &word_topic_[static_cast<std::size_t>(w) * k_];
                const int old = z_[i];
                --wt[old];
                --dt[old];
                --topic_total_[old];
                inv_total[old] = 1.0 / (topic_total_[old] + vbeta);

                double acc = 0.0;
                for (int t = 0; t < k_; ++t) {
                    acc += (wt[t] + beta_) * (dt[t] + alpha_) * inv_total[t];
                    probs_[t] = acc;
                }
                const double target = unit(rng_) * acc;
                int topic = 0;
                while (topic < k_ - 1 && probs_[topic] < target) {
                    ++topic;
                }

                z_[i] = topic;
                ++wt[topic];
                ++dt[topic];
                ++topic_total_[topic];
                inv_total[topic] = 1.0 / (topic_total_[topic] + vbeta);
            }
        }
    }

    int topics() const noexcept { return k_; }
    std::size_t tokens() const noexcept { return words_.size(); }
    std::size_t docs() const noexcept { return doc_start_.size() - 1; }
    const std::vector<int>& assignments() const noexcept { return z_; }

    std::int64_t word_topic_total() const { return sum(word_topic_); }
    std::int64_t doc_topic_total() const { return sum(doc_topic_); }
    std::int64_t topic_total() const { return sum(topic_total_); }

    Eigen::MatrixXd phi() const {
        Eigen::MatrixXd out(terms_, k_);
        for (int t = 0; t < k_; ++t) {
            const double denom = topic_total_[t] + terms_ * beta_;
            for (int w = 0; w < terms_; ++w) {
                out(w, t) = (word_topic_[static_cast<std::size_t>(w) * k_ + t] + beta_) / denom;
            }
        }
        return out;
    }

    Eigen::MatrixXd theta() const {
        const auto n = static_cast<Eigen::Index>(docs());
        Eigen::MatrixXd out(k_, n);
        for (Eigen::Index d = 0; d < n; ++d) {
            const double len = static_cast<double>(doc_start_[d + 1] - doc_start_[d]);
            const double denom = len + k_ * alpha_;
            for (int t = 0; t < k_; ++t) {
                out(t, d) = (doc_topic_[static_cast<std::size_t>(d) * k_ + t] + alpha_) / denom;
            }
        }
        return out;
    }

private:
    void add(std::size_t d, int w, int topic, int delta) {
        word_topic_[static_cast<std::size_t>(w) * k_ + topic] += delta;
        doc_topic_[d * k_ + topic] += delta;
        topic_total_[topic] += delta;
    }

    static std::int64_t sum(const std::vector<int>& v) {
        std::int64_t s = 0;
        for (int x : v) {
            s += x;
        }
        return s;
    }

    int k_;
    int terms_;
    double alpha_;
    double beta_;
    Rng rng_;
    std::vector<int> words_;
    std::vector<std::size_t> doc_start_;
    std::vector<int> z_;
    std::vector<int> word_topic_;
    std::vector<int> doc_topic_;
    std::vector<int> topic_total_;
    std::vector<double> probs_;
};

inline LdaModel lda_fit(const DocTermMatrix& matrix, const LdaConfig& config) {
    detail::require(config.iterations >= 0, ErrorKind::InvalidArgument, "iterations must be >= 0");
    const double alpha = config.resolved_alpha();
    GibbsSampler sampler(matrix, config.k_topics, alpha, config.beta, config.seed);
    for (int it = 0; it < config.iterations; ++it) {
        sampler.sweep();
    }
    LdaModel model;
    model.phi = sampler.phi();
    model.theta = sampler.theta();
    model.assignments = sampler.assignments();
    model.k = config.k_topics;
    model.alpha = alpha;
    model.beta = config.beta;
    model.iterations = config.iterations;
    model.seed = config.seed;
    return model;
}

/**
 * Document-topic proportions of unseen documents by Gibbs sampling with phi held
 * fixed. Returns k x n_test; empty documents get the prior mean (uniform).
 */
inline Eigen::MatrixXd lda_fold_in(const LdaModel& model, const DocTermMatrix& test, int sweeps, std::uint64_t seed) {
    detail::require(sweeps >= 1, ErrorKind::InvalidArgument, "fold-in needs at least one sweep");
    detail::require(static_cast<Eigen::Index>(test.terms()) == model.phi.rows(), ErrorKind::DimensionMismatch,
                    "test vocabulary size differs from the model");
    const int k = model.k;
    const auto n = static_cast<Eigen::Index>(test.docs());
    Eigen::MatrixXd theta(k, n);
    Rng rng(seed);
    std::uniform_int_distribution<int> pick(0, k - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> probs(k);
    const auto& counts = test.counts();

    for (Eigen::Index d = 0; d < n; ++d) {
        std::vector<int> words;
        for (SparseCounts::InnerIterator it(counts, d); it; ++it) {
            for (int r = 0; r < it.value(); ++r) {
                words.push_back(static_cast<int>(it.row()));
            }
        }
        std::vector<int> z(words.size());
        std::vector<int> dt(k, 0);
        for (std::size_t i = 0; i < words.size(); ++i) {
            z[i] = pick(rng);
            ++dt[z[i]];
        }
        for (int s = 0; s < sweeps && !words.empty(); ++s) {
            for (std::size_t i = 0; i < words.size(); ++i) {
                --dt[z[i]];
                double acc = 0.0;
                for (int t = 0; t < k; ++t) {
                    acc += model.phi(words[i], t) * (dt[t] + model.alpha);
                    probs[t] = acc;
                }
                const double target = unit(rng) * acc;
                int topic = 0;
                while (topic < k - 1 && probs[topic] < target) {
                    ++topic;
                }
                z[i] = topic;
                ++dt[topic];
            }
        }
        const double denom = static_cast<double>(words.size()) + k * model.alpha;
        for (int t = 0; t < k; ++t) {
            theta(t, d) = (dt[t] + model.alpha) / denom;
        }
    }
    return theta;
}

inline LoglikResult lda_loglik(const LdaModel& model, const DocTermMatrix& test, int fold_in_sweeps = 100,
                               std::uint64_t seed = 0) {
    detail::require(test.docs() > 0 && test.total() > 0, ErrorKind::EmptyTest, "test set has no in-vocabulary tokens");
    auto theta = lda_fold_in(model, test, fold_in_sweeps, seed);
    return mixture_loglik(model.phi, theta, test);
}

} // namespace flsa

#endif
