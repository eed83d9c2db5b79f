#ifndef FLSA_EXPERIMENTS_HPP
#define FLSA_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "flsa/corpus.hpp"
#include "flsa/error.hpp"
#include "flsa/eval.hpp"
#include "flsa/flsa.hpp"
#include "flsa/lda.hpp"
#include "flsa/random.hpp"
#include "flsa/redundancy.hpp"
#include "flsa/weighting.hpp"

/**
 * @file experiments.hpp
 * @brief Experiment drivers shared by the command-line tool and the acceptance suite.
 */

namespace flsa {

/// A topic model family under comparison: FLSA with one weighting scheme, or LDA.
struct Method {
    bool lda = false;
    GtwScheme scheme = GtwScheme::Entropy;

    std::string name() const { return lda ? "lda" : "flsa-" + std::string(to_string(scheme)); }
    friend bool operator==(const Method&, const Method&) = default;
};

inline std::optional<Method> parse_method(std::string_view text) {
    if (text == "lda") {
        return Method{true, GtwScheme::Entropy};
    }
    constexpr std::string_view prefix = "flsa-";
    if (text.substr(0, prefix.size()) == prefix) {
        if (auto s = parse_gtw_scheme(text.substr(prefix.size()))) {
            return Method{false, *s};
        }
    }
    return std::nullopt;
}

struct LoglikOptions {
    std::vector<Method> methods;
    std::vector<Eigen::Index> topics;
    FlsaConfig flsa;
    LdaConfig lda;
    int fold_in_sweeps = 100;
    std::uint64_t seed = 0;
};

struct LoglikRow {
    int replicate = 0;
    Eigen::Index topics = 0;
    std::string method;
    double loglik = 0.0;
    std::int64_t tokens = 0;
    std::size_t empty_docs = 0;
};

/**
 * Fit every (method, topic count) on `train` and score the mapped `test` set with
 * the shared token-mixture likelihood. Seeds: FLSA derive_seed(seed, "flsa"),
 * LDA derive_seed(seed, "lda"), LDA fold-in derive_seed(seed, "fold_in").
 */
inline std::vector<LoglikRow> loglik_comparison(const BuiltCorpus& train, const MappedCorpus& test,
                                                const LoglikOptions& options, int replicate = 0) {
    detail::require(test.matrix.docs() > 0 && test.matrix.total() > 0, ErrorKind::EmptyTest,
                    "test set has no in-vocabulary tokens");
    std::vector<LoglikRow> rows;
    for (auto c : options.topics) {
        for (const auto& method : options.methods) {
            LoglikResult r;
            if (method.lda) {
                auto cfg = options.lda;
                cfg.k_topics = static_cast<int>(c);
                cfg.seed = derive_seed(options.seed, "lda");
                auto model = lda_fit(train.matrix, cfg);
                r = lda_loglik(model, test.matrix, options.fold_in_sweeps, derive_seed(options.seed, "fold_in"));
            } else {
                auto cfg = options.flsa;
                cfg.scheme = method.scheme;
                cfg.topics = c;
                cfg.seed = derive_seed(options.seed, "flsa");
                auto model = fit_flsa(train.matrix, cfg);
                r = holdout_loglik(model, test.matrix);
            }
            rows.push_back({replicate, c, method.name(), r.total, r.tokens, r.empty_docs});
        }
    }
    return rows;
}

struct RedundancyExperimentOptions {
    RedundancySpec spec;
    double test_fraction = 0.2;
    std::size_t min_df = 1;
    LoglikOptions loglik;
};

struct RedundancyExperiment {
    BaseSplit split;
    std::vector<RedundantCorpus> corpora;
    std::vector<LoglikRow> rows;
};

/**
 * Split tokenized base documents, build redundant training corpora from the
 * training side, and compare held-out likelihoods per replicate. The split uses
 * derive_seed(seed, "split"); replicate r trains with derive_seed(seed, "replicate", r).
 */
inline RedundancyExperiment run_redundancy_experiment(const std::vector<Document>& base,
                                                      const RedundancyExperimentOptions& options) {
    RedundancyExperiment out;
    const auto master = options.loglik.seed;
    out.split = split_base(base, options.test_fraction, derive_seed(master, "split"));
    auto spec = options.spec;
    spec.seed = derive_seed(master, "synth");
    out.corpora = synthesize_redundant(out.split.train, spec);
    for (const auto& corpus : out.corpora) {
        auto train = build_matrix(corpus.docs, options.min_df);
        auto test = map_to_vocabulary(out.split.test, train.vocab);
        auto opts = options.loglik;
        opts.seed = derive_seed(master, "replicate", static_cast<std::uint64_t>(corpus.replicate));
        auto rows = loglik_comparison(train, test, opts, corpus.replicate);
        out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    }
    return out;
}

struct ClusterCurve {
    std::string method;
    std::vector<ChPoint> points;
};

/// CH curve per method: document topic proportions clustered by k-means for every k.
inline std::vector<ClusterCurve> cluster_curves(const DocTermMatrix& matrix, const std::vector<Method>& methods,
                                                Eigen::Index topics, const std::vector<Eigen::Index>& ks,
                                                const FlsaConfig& flsa, const LdaConfig& lda, int kmeans_iters,
                                                std::uint64_t seed) {
    std::vector<ClusterCurve> out;
    for (const auto& method : methods) {
        Eigen::MatrixXd p_t_given_d;
        if (method.lda) {
            auto cfg = lda;
            cfg.k_topics = static_cast<int>(topics);
            cfg.seed = derive_seed(seed, "lda");
            p_t_given_d = lda_fit(matrix, cfg).theta;
        } else {
            auto cfg = flsa;
            cfg.scheme = method.scheme;
            cfg.topics = topics;
            cfg.seed = derive_seed(seed, "flsa");
            p_t_given_d = fit_flsa(matrix, cfg).p_t_given_d;
        }
        out.push_back({method.name(), ch_curve(document_features(p_t_given_d), ks, kmeans_iters,
                                               derive_seed(seed, "kmeans"))});
    }
    return out;
}

} // namespace flsa

#endif
