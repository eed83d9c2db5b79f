#ifndef FLSA_REDUNDANCY_HPP
#define FLSA_REDUNDANCY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "flsa/corpus.hpp"
#include "flsa/error.hpp"
#include "flsa/random.hpp"

/**
 * @file redundancy.hpp
 * @brief Redundant corpora: every base document copied a uniform number of times.
 */

namespace flsa {

struct RedundancySpec {
    int min_copies = 1;
    int max_copies = 5;
    int replicates = 11;
    std::uint64_t seed = 0;
};

struct RedundantCorpus {
    int replicate = 0;
    std::vector<Document> docs;
    /// (base id, copies) in base order.
    std::vector<std::pair<std::string, int>> copy_counts;
};

inline void validate(const RedundancySpec& spec) {
    detail::require(spec.min_copies >= 1 && spec.min_copies <= spec.max_copies, ErrorKind::InvalidArgument,
                    "copy range must satisfy 1 <= min <= max");
    detail::require(spec.replicates >= 1, ErrorKind::InvalidArgument, "replicates must be >= 1");
}

/// Copy id for replicate `rep`, copy `idx` of base document `orig`.
inline std::string copy_id(const std::string& orig, int rep, int idx) {
    return orig + "_r" + std::to_string(rep) + "_c" + std::to_string(idx);
}

/**
 * One corpus per replicate. Each base document appears c times in a row with
 * c ~ Uniform{min_copies..max_copies}; copies keep text, label and tokens verbatim.
 * Replicate r draws from derive_seed(seed, "redundancy", r).
 */
inline std::vector<RedundantCorpus> synthesize_redundant(const std::vector<Document>& base, const RedundancySpec& spec) {
    validate(spec);
    detail::require(!base.empty(), ErrorKind::InvalidArgument, "base corpus is empty");
    std::vector<RedundantCorpus> out;
    out.reserve(static_cast<std::size_t>(spec.replicates));
    for (int rep = 0; rep < spec.replicates; ++rep) {
        Rng rng(derive_seed(spec.seed, "redundancy", static_cast<std::uint64_t>(rep)));
        std::uniform_int_distribution<int> copies(spec.min_copies, spec.max_copies);
        RedundantCorpus corpus;
        corpus.replicate = rep;
        for (const auto& doc : base) {
            const int count = copies(rng);
            corpus.copy_counts.emplace_back(doc.id, count);
            for (int idx = 0; idx < count; ++idx) {
                Document copy = doc;
                copy.id = copy_id(doc.id, rep, idx);
                corpus.docs.push_back(std::move(copy));
            }
        }
        out.push_back(std::move(corpus));
    }
    return out;
}

struct BaseSplit {
    std::vector<Document> train;
    std::vector<Document> test;
};

/**
 * Split base documents before duplication so that no held-out document has a
 * copy in training. `test_fraction` of the documents (rounded, at least one
 * on each side) go to the test set; relative order is preserved.
 */
inline BaseSplit split_base(const std::vector<Document>& base, double test_fraction, std::uint64_t seed) {
    detail::require(base.size() >= 2, ErrorKind::InvalidArgument, "need at least two documents to split");
    detail::require(test_fraction > 0.0 && test_fraction < 1.0, ErrorKind::InvalidArgument,
                    "test fraction must lie in (0, 1)");
    std::vector<std::size_t> order(base.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(base.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, base.size() - 1);

    std::vector<bool> is_test(base.size(), false);
    for (std::size_t i = 0; i < n_test; ++i) {
        is_test[order[i]] = true;
    }
    BaseSplit out;
    for (std::size_t i = 0; i < base.size(); ++i) {
        (is_test[i] ? out.test : out.train).push_back(base[i]);
    }
    return out;
}

inline nlohmann::json redundancy_manifest(const std::vector<RedundantCorpus>& corpora, const RedundancySpec& spec) {
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& c : corpora) {
        nlohmann::json counts = nlohmann::json::array();
        for (const auto& [id, n] : c.copy_counts) {
            counts.push_back({{"id", id}, {"copies", n}});
        }
        reps.push_back({{"replicate", c.replicate}, {"documents", c.docs.size()}, {"copy_counts", counts}});
    }
    return {{"min_copies", spec.min_copies},
            {"max_copies", spec.max_copies},
            {"replicates", spec.replicates},
            {"seed", spec.seed},
            {"corpora", reps}};
}

} // namespace flsa

#endif
