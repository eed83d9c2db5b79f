#ifndef FLSA_LIKELIHOOD_HPP
#define FLSA_LIKELIHOOD_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "flsa/corpus.hpp"
#include "flsa/error.hpp"

namespace flsa {

/// Per-token probability floor in the mixture log-likelihood.
inline constexpr double kProbabilityFloor = 1e-12;

struct LoglikResult {
    double total = 0.0;
    std::int64_t tokens = 0;
    std::vector<double> per_doc;
    /// Test documents with no in-vocabulary token; they add nothing to the total.
    std::size_t empty_docs = 0;
    /// Tokens whose mixture probability fell to the floor.
    std::int64_t floored_tokens = 0;

    double per_token() const { return tokens > 0 ? total / static_cast<double>(tokens) : 0.0; }
};

/**
 * Token-mixture log-likelihood shared by every model:
 * sum over test tokens of ln sum_k P(w|T_k) P(T_k|d).
 * `p_w_given_t` is m x c and `p_t_given_d` is c x n_test.
 */
inline LoglikResult mixture_loglik(const Eigen::MatrixXd& p_w_given_t, const Eigen::MatrixXd& p_t_given_d,
                                   const DocTermMatrix& test) {
    detail::require(test.docs() > 0 && test.total() > 0, ErrorKind::EmptyTest, "test set has no in-vocabulary tokens");
    detail::require(static_cast<Eigen::Index>(test.terms()) == p_w_given_t.rows() &&
                        static_cast<Eigen::Index>(test.docs()) == p_t_given_d.cols() &&
                        p_w_given_t.cols() == p_t_given_d.rows(),
                    ErrorKind::DimensionMismatch, "likelihood: inconsistent shapes");
    LoglikResult out;
    out.per_doc.assign(test.docs(), 0.0);
    const auto& counts = test.counts();
    for (Eigen::Index j = 0; j < counts.outerSize(); ++j) {
        double doc_total = 0.0;
        std::int64_t doc_tokens = 0;
        for (SparseCounts::InnerIterator it(counts, j); it; ++it) {
            double p = p_w_given_t.row(it.row()).dot(p_t_given_d.col(j));
            if (!(p > kProbabilityFloor)) {
                p = kProbabilityFloor;
                out.floored_tokens += it.value();
            }
            doc_total += it.value() * std::log(p);
            doc_tokens += it.value();
        }
        if (doc_tokens == 0) {
            ++out.empty_docs;
        }
        out.per_doc[static_cast<std::size_t>(j)] = doc_total;
        out.total += doc_total;
        out.tokens += doc_tokens;
    }
    return out;
}

} // namespace flsa

#endif
