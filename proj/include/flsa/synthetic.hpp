#ifndef FLSA_SYNTHETIC_HPP
#define FLSA_SYNTHETIC_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "flsa/corpus.hpp"
#include "flsa/error.hpp"
#include "flsa/random.hpp"

/**
 * @file synthetic.hpp
 * @brief Seeded corpora with planted topics over disjoint vocabulary blocks.
 */

namespace flsa {

struct PlantedCorpusConfig {
    int docs = 200;
    int topics = 4;
    int words_per_topic = 30;
    /// Shared words drawn with probability `background_rate` at every position.
    int background_words = 0;
    double background_rate = 0.0;
    int min_length = 20;
    int max_length = 40;
    /// Dirichlet concentration of per-document topic mixtures; <= 0 gives one topic per document.
    double mixing = 0.0;
    /// Within-block word frequencies follow 1 / (rank + 1)^zipf.
    double zipf = 1.0;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::string letters(int value, int width) {
    std::string out(static_cast<std::size_t>(width), 'a');
    for (int pos = width - 1; pos >= 0; --pos) {
        out[static_cast<std::size_t>(pos)] = static_cast<char>('a' + value % 26);
        value /= 26;
    }
    return out;
}

} // namespace detail

inline std::string planted_topic_word(int topic, int rank) { return "t" + detail::letters(topic, 3) + detail::letters(rank, 3); }

inline std::string planted_background_word(int rank) { return "zz" + detail::letters(rank, 4); }

/// Documents with ids doc0..doc{n-1}; the label is the dominant topic as "t<k>".
inline std::vector<Document> planted_corpus(const PlantedCorpusConfig& cfg) {
    detail::require(cfg.docs >= 1 && cfg.topics >= 1 && cfg.words_per_topic >= 1, ErrorKind::InvalidArgument,
                    "planted corpus needs documents, topics and words");
    detail::require(cfg.min_length >= 1 && cfg.min_length <= cfg.max_length, ErrorKind::InvalidArgument,
                    "invalid document length range");
    detail::require(cfg.background_rate == 0.0 || cfg.background_words >= 1, ErrorKind::InvalidArgument,
                    "background rate needs background words");

    Rng rng(cfg.seed);
    auto zipf_weights = [&](int count) {
        std::vector<double> w(static_cast<std::size_t>(count));
        for (int r = 0; r < count; ++r) {
            w[static_cast<std::size_t>(r)] = 1.0 / std::pow(r + 1.0, cfg.zipf);
        }
        return w;
    };
    auto topic_words = zipf_weights(cfg.words_per_topic);
    std::discrete_distribution<int> topic_word(topic_words.begin(), topic_words.end());
    std::vector<double> bg = zipf_weights(std::max(cfg.background_words, 1));
    std::discrete_distribution<int> background_word(bg.begin(), bg.end());
    std::uniform_int_distribution<int> length(cfg.min_length, cfg.max_length);
    std::uniform_int_distribution<int> single_topic(0, cfg.topics - 1);
    std::bernoulli_distribution use_background(cfg.background_rate);
    std::gamma_distribution<double> gamma(cfg.mixing > 0.0 ? cfg.mixing : 1.0, 1.0);

    std::vector<Document> docs;
    docs.reserve(static_cast<std::size_t>(cfg.docs));
    for (int j = 0; j < cfg.docs; ++j) {
        std::vector<double> mix(static_cast<std::size_t>(cfg.topics), 0.0);
        if (cfg.mixing > 0.0) {
            for (auto& m : mix) {
                m = gamma(rng);
            }
        } else {
            mix[static_cast<std::size_t>(single_topic(rng))] = 1.0;
        }
        std::discrete_distribution<int> pick_topic(mix.begin(), mix.end());
        int dominant = 0;
        for (int t = 1; t < cfg.topics; ++t) {
            if (mix[static_cast<std::size_t>(t)] > mix[static_cast<std::size_t>(dominant)]) {
                dominant = t;
            }
        }

        Document d;
        d.id = "doc" + std::to_string(j);
        d.label = "t" + std::to_string(dominant);
        const int len = length(rng);
        for (int i = 0; i < len; ++i) {
            if (i) {
                d.text.push_back(' ');
            }
            if (cfg.background_rate > 0.0 && use_background(rng)) {
                d.text += planted_background_word(background_word(rng));
            } else {
                d.text += planted_topic_word(pick_topic(rng), topic_word(rng));
            }
        }
        docs.push_back(std::move(d));
    }
    return docs;
}

} // namespace flsa

#endif
