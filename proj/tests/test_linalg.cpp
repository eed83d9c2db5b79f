#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "flsa/linalg.hpp"
#include "flsa/weighting.hpp"
#include "test_support.hpp"

using namespace flsa;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index m, Eigen::Index n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd a(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            a(i, j) = normal(rng);
        }
    }
    return a;
}

/// Singular values as square roots of the eigenvalues of A^T A, descending.
Eigen::VectorXd gram_singular_values(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.transpose() * a);
    Eigen::VectorXd ev = eig.eigenvalues().reverse();
    return ev.cwiseMax(0.0).cwiseSqrt();
}

void expect_orthonormal_columns(const Eigen::MatrixXd& u, double tol) {
    Eigen::MatrixXd gram = u.transpose() * u;
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), tol);
}

} // namespace

TEST(TruncatedSvd, Identity) {
    auto f = truncated_svd(Eigen::MatrixXd::Identity(2, 2), 2, 1);
    EXPECT_NEAR(f.S(0), 1.0, 1e-12);
    EXPECT_NEAR(f.S(1), 1.0, 1e-12);
}

TEST(TruncatedSvd, RankOne) {
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 2, 4;
    auto f = truncated_svd(a, 2, 1);
    EXPECT_NEAR(f.S(0), 5.0, 1e-12);
    EXPECT_NEAR(f.S(1), 0.0, 1e-12);
}

TEST(TruncatedSvd, SmallMatchesGramOracle) {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_matrix(5, 4, rng);
        auto f = truncated_svd(a, 4, 9);
        auto oracle = gram_singular_values(a);
        for (Eigen::Index k = 0; k < 4; ++k) {
            EXPECT_NEAR(f.S(k), oracle(k), 1e-8);
        }
    }
}

TEST(TruncatedSvd, IterativePathMatchesGramOracle) {
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        auto counts = DocTermMatrix::from_dense(test::random_counts(80, 60, rng, 0.15));
        auto w = apply_weighting(counts, GtwScheme::Entropy);
        auto f = truncated_svd(w.values, 3, 100 + trial);
        Eigen::MatrixXd dense = test::dense_of(w.values);
        auto oracle = gram_singular_values(dense);
        for (Eigen::Index k = 0; k < 3; ++k) {
            EXPECT_NEAR(f.S(k), oracle(k), 1e-8 * oracle(0));
        }
        expect_orthonormal_columns(f.U, 1e-10);
        expect_orthonormal_columns(f.Vt.transpose(), 1e-10);
        Eigen::MatrixXd residual = dense * f.Vt.transpose() - f.U * f.S.asDiagonal();
        EXPECT_LT(residual.norm(), 1e-8 * oracle(0));
    }
}

TEST(TruncatedSvd, DeterministicAndSignNormalized) {
    Rng rng(23);
    auto a = random_matrix(50, 40, rng);
    auto f1 = truncated_svd(a, 4, 77);
    auto f2 = truncated_svd(a, 4, 77);
    EXPECT_EQ(f1.U, f2.U);
    EXPECT_EQ(f1.S, f2.S);
    for (Eigen::Index k = 0; k < 4; ++k) {
        Eigen::Index idx = 0;
        f1.U.col(k).cwiseAbs().maxCoeff(&idx);
        EXPECT_GT(f1.U(idx, k), 0.0);
    }
}

TEST(TruncatedSvd, RejectsBadDimension) {
    EXPECT_THROW(truncated_svd(Eigen::MatrixXd::Identity(3, 3), 4, 0), Error);
    EXPECT_THROW(truncated_svd(Eigen::MatrixXd::Identity(3, 3), 0, 0), Error);
}

TEST(EmbedDocuments, IdentityGivesUnitVectors) {
    auto e = embed_documents(truncated_svd(Eigen::MatrixXd::Identity(2, 2), 2, 1));
    for (Eigen::Index j = 0; j < 2; ++j) {
        EXPECT_NEAR(e.points.row(j).norm(), 1.0, 1e-12);
        EXPECT_NEAR(e.points.row(j).cwiseAbs().maxCoeff(), 1.0, 1e-12);
    }
}

TEST(EmbedDocuments, RankOneSecondCoordinateZero) {
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 2, 4;
    auto e = embed_documents(truncated_svd(a, 2, 1));
    EXPECT_NEAR(e.points(0, 1), 0.0, 1e-12);
    EXPECT_NEAR(e.points(1, 1), 0.0, 1e-12);
}

TEST(EmbedDocuments, InnerProductsMatchReconstruction) {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        auto a = random_matrix(30, 20, rng);
        const Eigen::Index d = 3;
        auto f = truncated_svd(a, d, 5);
        auto e = embed_documents(f);
        Eigen::JacobiSVD<Eigen::MatrixXd> ref(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Eigen::MatrixXd recon = ref.matrixU().leftCols(d) * ref.singularValues().head(d).asDiagonal() *
                                ref.matrixV().leftCols(d).transpose();
        Eigen::MatrixXd lhs = e.points * e.points.transpose();
        Eigen::MatrixXd rhs = recon.transpose() * recon;
        EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(ProjectColumns, TrainingColumnsReproduceEmbedding) {
    Rng rng(41);
    auto a = random_matrix(25, 18, rng);
    auto f = truncated_svd(a, 4, 2);
    auto projected = project_columns(f, a);
    EXPECT_LT((projected.points - embed_documents(f).points).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SqDistance, Examples) {
    std::vector<double> o = {0, 0}, p = {3, 4};
    EXPECT_EQ(sq_distance(o, p), 25.0);
    EXPECT_EQ(sq_distance(p, p), 0.0);
    std::vector<double> q = {1, 2, 3};
    EXPECT_THROW(sq_distance(o, q), Error);
}

TEST(SqDistance, Symmetric) {
    Rng rng(3);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(4), b(4);
        for (int k = 0; k < 4; ++k) {
            a[k] = u(rng);
            b[k] = u(rng);
        }
        EXPECT_EQ(sq_distance(a, b), sq_distance(b, a));
    }
}

TEST(KmeansppSeeds, DistinctIndices) {
    Rng rng(1);
    Eigen::MatrixXd x(6, 1);
    x << 0, 0, 0, 5, 5, 9;
    Rng seed_rng(2);
    auto seeds = kmeanspp_seeds(x, 3, seed_rng);
    std::sort(seeds.begin(), seeds.end());
    EXPECT_EQ(std::adjacent_find(seeds.begin(), seeds.end()), seeds.end());
    EXPECT_EQ(count_distinct_rows(x, 10), 3);
}
