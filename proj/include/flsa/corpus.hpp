#ifndef FLSA_CORPUS_HPP
#define FLSA_CORPUS_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "flsa/error.hpp"

/**
 * @file corpus.hpp
 * @brief Tokenization, vocabulary construction and the sparse document-term count matrix.
 */

namespace flsa {

struct Document {
    std::string id;
    std::string text;
    std::optional<std::string> label;
    std::vector<std::string> tokens;
};

inline const std::vector<std::string>& default_stopwords() {
    static const std::vector<std::string> words = {
#include "flsa/stopwords_en.inc"
    };
    return words;
}

struct TokenizerConfig {
    std::size_t min_len = 2;
    bool use_stopwords = true;
    std::vector<std::string> stopwords = default_stopwords();
};

namespace detail {

inline bool is_ascii_alpha(unsigned char ch) noexcept {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z');
}

inline char ascii_lower(unsigned char ch) noexcept {
    return (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : static_cast<char>(ch);
}

} // namespace detail

/**
 * Split `raw.text` into lowercased maximal runs of ASCII letters, then drop
 * stopwords (when enabled) and runs shorter than `config.min_len`.
 * Bytes outside A-Z/a-z, including UTF-8 continuation bytes, act as separators.
 */
inline Document tokenize(Document raw, const TokenizerConfig& config) {
    std::unordered_set<std::string_view> stop;
    if (config.use_stopwords) {
        stop.reserve(config.stopwords.size());
        for (const auto& w : config.stopwords) {
            stop.insert(w);
        }
    }

    raw.tokens.clear();
    std::string current;
    auto flush = [&]() {
        if (!current.empty() && current.size() >= config.min_len && !stop.contains(current)) {
            raw.tokens.push_back(current);
        }
        current.clear();
    };
    for (unsigned char ch : raw.text) {
        if (detail::is_ascii_alpha(ch)) {
            current.push_back(detail::ascii_lower(ch));
        } else {
            flush();
        }
    }
    flush();
    return raw;
}

/// Ordered unique terms with the inverse lookup.
class Vocabulary {
public:
    Vocabulary() = default;

    explicit Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
        index_.reserve(terms_.size());
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            auto [it, inserted] = index_.emplace(terms_[i], i);
            detail::require(inserted, ErrorKind::InvalidArgument, "duplicate vocabulary term '" + terms_[i] + "'");
        }
    }

    std::size_t size() const noexcept { return terms_.size(); }
    const std::vector<std::string>& terms() const noexcept { return terms_; }
    const std::string& term(std::size_t i) const { return terms_.at(i); }

    std::optional<std::size_t> find(std::string_view term) const {
        auto it = index_.find(std::string(term));
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::size_t> index_;
};

using SparseCounts = Eigen::SparseMatrix<int, Eigen::ColMajor, std::int64_t>;

struct CountEntry {
    std::size_t term;
    std::size_t doc;
    int count;
};

/**
 * Sparse m x n count matrix, terms as rows and documents as columns.
 * Only strictly positive counts are stored.
 */
class DocTermMatrix {
public:
    DocTermMatrix() = default;

    DocTermMatrix(std::size_t terms, std::size_t docs, std::span<const CountEntry> entries)
        : counts_(static_cast<Eigen::Index>(terms), static_cast<Eigen::Index>(docs)) {
        std::vector<Eigen::Triplet<int, std::int64_t>> triplets;
        triplets.reserve(entries.size());
        for (const auto& e : entries) {
            detail::require(e.term < terms && e.doc < docs, ErrorKind::DimensionMismatch,
                            "count entry (" + std::to_string(e.term) + "," + std::to_string(e.doc) +
                                ") outside " + std::to_string(terms) + "x" + std::to_string(docs));
            detail::require(e.count >= 0, ErrorKind::InvalidArgument, "negative count");
            if (e.count > 0) {
                triplets.emplace_back(static_cast<std::int64_t>(e.term), static_cast<std::int64_t>(e.doc), e.count);
            }
        }
        counts_.setFromTriplets(triplets.begin(), triplets.end());
        counts_.makeCompressed();
    }

    /// Build from a dense row-major table, `rows[i][j]` = count of term i in document j.
    static DocTermMatrix from_dense(const std::vector<std::vector<int>>& rows) {
        std::size_t m = rows.size();
        std::size_t n = m == 0 ? 0 : rows.front().size();
        std::vector<CountEntry> entries;
        for (std::size_t i = 0; i < m; ++i) {
            detail::require(rows[i].size() == n, ErrorKind::DimensionMismatch, "ragged dense count table");
            for (std::size_t j = 0; j < n; ++j) {
                if (rows[i][j] != 0) {
                    entries.push_back({i, j, rows[i][j]});
                }
            }
        }
        return DocTermMatrix(m, n, entries);
    }

    std::size_t terms() const noexcept { return static_cast<std::size_t>(counts_.rows()); }
    std::size_t docs() const noexcept { return static_cast<std::size_t>(counts_.cols()); }
    const SparseCounts& counts() const noexcept { return counts_; }

    int at(std::size_t term, std::size_t doc) const {
        return counts_.coeff(static_cast<Eigen::Index>(term), static_cast<Eigen::Index>(doc));
    }

    std::int64_t doc_length(std::size_t doc) const {
        std::int64_t total = 0;
        for (SparseCounts::InnerIterator it(counts_, static_cast<Eigen::Index>(doc)); it; ++it) {
            total += it.value();
        }
        return total;
    }

    std::int64_t total() const {
        std::int64_t sum = 0;
        for (Eigen::Index k = 0; k < counts_.nonZeros(); ++k) {
            sum += counts_.valuePtr()[k];
        }
        return sum;
    }

    /// Row i as a dense vector over documents.
    std::vector<int> row(std::size_t term) const {
        std::vector<int> out(docs(), 0);
        for (Eigen::Index j = 0; j < counts_.outerSize(); ++j) {
            for (SparseCounts::InnerIterator it(counts_, j); it; ++it) {
                if (static_cast<std::size_t>(it.row()) == term) {
                    out[static_cast<std::size_t>(j)] = it.value();
                }
            }
        }
        return out;
    }

    /// All stored entries in column-major order.
    std::vector<CountEntry> entries() const {
        std::vector<CountEntry> out;
        out.reserve(static_cast<std::size_t>(counts_.nonZeros()));
        for (Eigen::Index j = 0; j < counts_.outerSize(); ++j) {
            for (SparseCounts::InnerIterator it(counts_, j); it; ++it) {
                out.push_back({static_cast<std::size_t>(it.row()), static_cast<std::size_t>(j), it.value()});
            }
        }
        return out;
    }

    friend bool operator==(const DocTermMatrix& a, const DocTermMatrix& b) {
        if (a.terms() != b.terms() || a.docs() != b.docs()) {
            return false;
        }
        auto ea = a.entries();
        auto eb = b.entries();
        return std::equal(ea.begin(), ea.end(), eb.begin(), eb.end(), [](const CountEntry& x, const CountEntry& y) {
            return x.term == y.term && x.doc == y.doc && x.count == y.count;
        });
    }

private:
    SparseCounts counts_;
};

/// A document-term matrix together with the row and column metadata.
struct BuiltCorpus {
    Vocabulary vocab;
    DocTermMatrix matrix;
    std::vector<std::string> doc_ids;
    std::vector<std::optional<std::string>> labels;
    /// Ids of documents dropped because no token survived filtering.
    std::vector<std::string> dropped;

    bool has_labels() const {
        return std::any_of(labels.begin(), labels.end(), [](const auto& l) { return l.has_value(); });
    }
};

namespace detail {

inline void require_unique_ids(std::span<const Document> docs) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(docs.size());
    for (const auto& d : docs) {
        require(!d.id.empty(), ErrorKind::InvalidArgument, "document with empty id");
        require(seen.insert(d.id).second, ErrorKind::InvalidArgument, "duplicate document id '" + d.id + "'");
    }
}

} // namespace detail

/**
 * Count matrix over the terms that occur in at least `min_df` documents.
 * The vocabulary is sorted lexicographically; documents left without any
 * counted token are dropped and listed in `BuiltCorpus::dropped`.
 */
inline BuiltCorpus build_matrix(std::span<const Document> docs, std::size_t min_df = 1) {
    detail::require(min_df >= 1, ErrorKind::InvalidArgument, "min_df must be >= 1");
    detail::require_unique_ids(docs);

    std::map<std::string, std::size_t> df;
    for (const auto& d : docs) {
        std::unordered_set<std::string_view> distinct(d.tokens.begin(), d.tokens.end());
        for (auto t : distinct) {
            ++df[std::string(t)];
        }
    }

    std::vector<std::string> terms;
    for (const auto& [term, count] : df) {
        if (count >= min_df) {
            terms.push_back(term);
        }
    }

    BuiltCorpus out;
    out.vocab = Vocabulary(std::move(terms));

    std::vector<CountEntry> entries;
    std::size_t column = 0;
    for (const auto& d : docs) {
        std::map<std::size_t, int> counts;
        for (const auto& t : d.tokens) {
            if (auto idx = out.vocab.find(t)) {
                ++counts[*idx];
            }
        }
        if (counts.empty()) {
            out.dropped.push_back(d.id);
            continue;
        }
        for (const auto& [term, count] : counts) {
            entries.push_back({term, column, count});
        }
        out.doc_ids.push_back(d.id);
        out.labels.push_back(d.label);
        ++column;
    }

    detail::require(column > 0, ErrorKind::AllDocumentsEmpty, "no document has a token left after filtering");
    out.matrix = DocTermMatrix(out.vocab.size(), column, entries);
    return out;
}

/// Held-out documents counted against a fixed vocabulary.
struct MappedCorpus {
    DocTermMatrix matrix;
    std::vector<std::string> doc_ids;
    std::vector<std::optional<std::string>> labels;
    std::size_t oov_tokens = 0;
    /// Ids of documents whose tokens were all out of vocabulary; they stay as zero columns.
    std::vector<std::string> empty_docs;
};

inline MappedCorpus map_to_vocabulary(std::span<const Document> docs, const Vocabulary& vocab) {
    detail::require_unique_ids(docs);
    MappedCorpus out;
    std::vector<CountEntry> entries;
    for (std::size_t j = 0; j < docs.size(); ++j) {
        std::map<std::size_t, int> counts;
        for (const auto& t : docs[j].tokens) {
            if (auto idx = vocab.find(t)) {
                ++counts[*idx];
            } else {
                ++out.oov_tokens;
            }
        }
        if (counts.empty()) {
            out.empty_docs.push_back(docs[j].id);
        }
        for (const auto& [term, count] : counts) {
            entries.push_back({term, j, count});
        }
        out.doc_ids.push_back(docs[j].id);
        out.labels.push_back(docs[j].label);
    }
    out.matrix = DocTermMatrix(vocab.size(), docs.size(), entries);
    return out;
}

inline std::vector<Document> tokenize_all(std::vector<Document> docs, const TokenizerConfig& config) {
    for (auto& d : docs) {
        d = tokenize(std::move(d), config);
    }
    return docs;
}

} // namespace flsa

#endif
