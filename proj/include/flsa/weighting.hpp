#ifndef FLSA_WEIGHTING_HPP
#define FLSA_WEIGHTING_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "flsa/corpus.hpp"
#include "flsa/error.hpp"

/**
 * @file weighting.hpp
 * @brief Local (raw TF) and global term weights, and their product matrix.
 */

namespace flsa {

enum class GtwScheme { Entropy, IDF, Normal, ProbIDF, None };

inline constexpr std::array<GtwScheme, 4> all_gtw_schemes = {GtwScheme::Entropy, GtwScheme::IDF, GtwScheme::Normal,
                                                             GtwScheme::ProbIDF};

inline constexpr std::string_view to_string(GtwScheme s) noexcept {
    switch (s) {
    case GtwScheme::Entropy: return "entropy";
    case GtwScheme::IDF: return "idf";
    case GtwScheme::Normal: return "normal";
    case GtwScheme::ProbIDF: return "probidf";
    case GtwScheme::None: return "none";
    }
    return "none";
}

inline std::optional<GtwScheme> parse_gtw_scheme(std::string_view name) {
    std::string lower(name);
    for (auto& ch : lower) {
        ch = detail::ascii_lower(static_cast<unsigned char>(ch));
    }
    for (auto s : {GtwScheme::Entropy, GtwScheme::IDF, GtwScheme::Normal, GtwScheme::ProbIDF, GtwScheme::None}) {
        if (lower == to_string(s)) {
            return s;
        }
    }
    return std::nullopt;
}

inline constexpr int binary_indicator(long long tf) noexcept { return tf > 0 ? 1 : 0; }

/// p_ij = tf_ij / sum_j tf_ij for one term row, dense over documents.
inline std::vector<double> term_probabilities(const DocTermMatrix& matrix, std::size_t term) {
    detail::require(term < matrix.terms(), ErrorKind::DimensionMismatch, "term index out of range");
    auto row = matrix.row(term);
    double total = 0.0;
    for (int tf : row) {
        total += tf;
    }
    detail::require(total > 0.0, ErrorKind::ZeroRow, "term " + std::to_string(term) + " never occurs");
    std::vector<double> p(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
        p[j] = row[j] / total;
    }
    return p;
}

/// Sufficient statistics of one term row for every global weight.
struct TermRowStats {
    double sum = 0.0;         // sum_j tf_ij
    double sum_sq = 0.0;      // sum_j tf_ij^2
    double doc_freq = 0.0;    // sum_j b(tf_ij)
    double plogp = 0.0;       // sum_j p_ij log2 p_ij, with 0 log 0 = 0
};

/**
 * Global weight g_i from the row statistics of a corpus with `n` documents.
 *
 * Conventions at the singular points:
 *  - Entropy with n = 1 is 1 (log2 n would be 0).
 *  - ProbIDF for a term present in every document uses 0.5 in place of the
 *    zero numerator, giving log2(0.5 / n).
 */
inline double gtw_from_stats(const TermRowStats& s, std::size_t n, GtwScheme scheme) {
    detail::require(s.sum > 0.0, ErrorKind::ZeroRow, "term never occurs");
    const double nd = static_cast<double>(n);
    switch (scheme) {
    case GtwScheme::Entropy:
        return n <= 1 ? 1.0 : 1.0 + s.plogp / std::log2(nd);
    case GtwScheme::IDF:
        return std::log2(nd / s.sum);
    case GtwScheme::Normal:
        return 1.0 / std::sqrt(s.sum_sq);
    case GtwScheme::ProbIDF: {
        double numerator = nd - s.doc_freq;
        if (numerator <= 0.0) {
            numerator = 0.5;
        }
        return std::log2(numerator / s.doc_freq);
    }
    case GtwScheme::None:
        return 1.0;
    }
    return 1.0;
}

/// Row statistics for every term in two passes over the stored entries.
inline std::vector<TermRowStats> term_row_stats(const DocTermMatrix& matrix) {
    std::vector<TermRowStats> stats(matrix.terms());
    const auto& counts = matrix.counts();
    for (Eigen::Index j = 0; j < counts.outerSize(); ++j) {
        for (SparseCounts::InnerIterator it(counts, j); it; ++it) {
            auto& s = stats[static_cast<std::size_t>(it.row())];
            const double tf = it.value();
            s.sum += tf;
            s.sum_sq += tf * tf;
            s.doc_freq += binary_indicator(it.value());
        }
    }
    for (Eigen::Index j = 0; j < counts.outerSize(); ++j) {
        for (SparseCounts::InnerIterator it(counts, j); it; ++it) {
            auto& s = stats[static_cast<std::size_t>(it.row())];
            const double p = it.value() / s.sum;
            s.plogp += p * std::log2(p);
        }
    }
    return stats;
}

inline double gtw_weight(const DocTermMatrix& matrix, std::size_t term, GtwScheme scheme) {
    detail::require(term < matrix.terms(), ErrorKind::DimensionMismatch, "term index out of range");
    detail::require(matrix.docs() >= 1, ErrorKind::InvalidArgument, "matrix has no documents");
    auto row = matrix.row(term);
    TermRowStats s;
    for (int tf : row) {
        s.sum += tf;
        s.sum_sq += static_cast<double>(tf) * tf;
        s.doc_freq += binary_indicator(tf);
    }
    detail::require(s.sum > 0.0, ErrorKind::ZeroRow, "term " + std::to_string(term) + " never occurs");
    for (int tf : row) {
        if (tf > 0) {
            const double p = tf / s.sum;
            s.plogp += p * std::log2(p);
        }
    }
    return gtw_from_stats(s, matrix.docs(), scheme);
}

inline std::vector<double> global_weights(const DocTermMatrix& matrix, GtwScheme scheme) {
    detail::require(matrix.docs() >= 1, ErrorKind::InvalidArgument, "matrix has no documents");
    auto stats = term_row_stats(matrix);
    std::vector<double> g(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) {
        try {
            g[i] = gtw_from_stats(stats[i], matrix.docs(), scheme);
        } catch (const Error& e) {
            throw Error(e.kind(), "term " + std::to_string(i) + ": " + e.detail());
        }
    }
    return g;
}

using SparseReal = Eigen::SparseMatrix<double, Eigen::ColMajor, std::int64_t>;

/// a_ij = tf_ij * g_i, same layout as the count matrix. Entries may be negative.
struct WeightedMatrix {
    SparseReal values;
    GtwScheme scheme = GtwScheme::None;
    std::vector<double> weights;

    std::size_t terms() const noexcept { return static_cast<std::size_t>(values.rows()); }
    std::size_t docs() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

/// Scale each row of `counts` by the matching weight.
inline SparseReal scale_rows(const DocTermMatrix& matrix, const std::vector<double>& weights) {
    detail::require(weights.size() == matrix.terms(), ErrorKind::DimensionMismatch,
                    "weight vector length differs from term count");
    SparseReal out = matrix.counts().cast<double>();
    for (Eigen::Index j = 0; j < out.outerSize(); ++j) {
        for (SparseReal::InnerIterator it(out, j); it; ++it) {
            it.valueRef() *= weights[static_cast<std::size_t>(it.row())];
        }
    }
    return out;
}

inline WeightedMatrix apply_weighting(const DocTermMatrix& matrix, GtwScheme scheme) {
    WeightedMatrix out;
    out.scheme = scheme;
    out.weights = global_weights(matrix, scheme);
    out.values = scale_rows(matrix, out.weights);
    return out;
}

} // namespace flsa

#endif
