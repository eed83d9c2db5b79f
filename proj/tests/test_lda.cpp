#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "flsa/lda.hpp"
#include "flsa/likelihood.hpp"
#include "flsa/synthetic.hpp"
#include "test_support.hpp"

using namespace flsa;

namespace {

/// Ten documents over words 0..2 followed by ten over words 3..5.
DocTermMatrix disjoint_groups(Rng& rng) {
    std::uniform_int_distribution<int> count(0, 4);
    std::vector<std::vector<int>> rows(6, std::vector<int>(20, 0));
    for (int j = 0; j < 20; ++j) {
        const int base = j < 10 ? 0 : 3;
        for (int w = 0; w < 3; ++w) {
            rows[base + w][j] = count(rng);
        }
        rows[base][j] += 1;
    }
    return DocTermMatrix::from_dense(rows);
}

} // namespace

TEST(LdaFit, OneWordVocabulary) {
    auto m = DocTermMatrix::from_dense({{3, 1, 2}});
    LdaConfig cfg;
    cfg.k_topics = 3;
    cfg.iterations = 20;
    auto model = lda_fit(m, cfg);
    EXPECT_TRUE(model.phi.isApprox(Eigen::MatrixXd::Ones(1, 3)));
}

TEST(LdaFit, SingleTopic) {
    auto m = DocTermMatrix::from_dense({{3, 1}, {0, 2}, {1, 1}});
    LdaConfig cfg;
    cfg.k_topics = 1;
    cfg.iterations = 10;
    auto model = lda_fit(m, cfg);
    EXPECT_TRUE((model.theta.array() == 1.0).all());
    const double denom = 8.0 + 3 * cfg.beta;
    EXPECT_NEAR(model.phi(0, 0), (4.0 + cfg.beta) / denom, 1e-15);
    EXPECT_NEAR(model.phi(1, 0), (2.0 + cfg.beta) / denom, 1e-15);
    EXPECT_NEAR(model.phi(2, 0), (2.0 + cfg.beta) / denom, 1e-15);
    EXPECT_DOUBLE_EQ(model.alpha, 50.0);
}

TEST(LdaFit, DisjointGroupsSeparateInMostSeeds) {
    int passes = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(seed + 100);
        auto m = disjoint_groups(rng);
        LdaConfig cfg;
        cfg.k_topics = 2;
        cfg.iterations = 1000;
        cfg.seed = seed;
        auto model = lda_fit(m, cfg);
        bool ok = true;
        for (int t = 0; t < 2; ++t) {
            const double first = model.phi.col(t).head(3).sum();
            const double second = model.phi.col(t).tail(3).sum();
            ok = ok && std::max(first, second) >= 0.9;
        }
        ok = ok && (model.phi.col(0).head(3).sum() >= 0.9) != (model.phi.col(1).head(3).sum() >= 0.9);
        passes += ok ? 1 : 0;
    }
    EXPECT_GE(passes, 3);
}

TEST(GibbsSampler, CountConservation) {
    Rng rng(7);
    auto m = DocTermMatrix::from_dense(test::random_counts(15, 10, rng, 0.4));
    GibbsSampler sampler(m, 4, 0.5, 0.01, 3);
    const auto total = m.total();
    EXPECT_EQ(static_cast<std::int64_t>(sampler.tokens()), total);
    for (int s = 0; s < 25; ++s) {
        sampler.sweep();
        EXPECT_EQ(sampler.word_topic_total(), total);
        EXPECT_EQ(sampler.doc_topic_total(), total);
        EXPECT_EQ(sampler.topic_total(), total);
    }
    auto phi = sampler.phi();
    auto theta = sampler.theta();
    for (Eigen::Index t = 0; t < phi.cols(); ++t) {
        EXPECT_NEAR(phi.col(t).sum(), 1.0, 1e-12);
    }
    for (Eigen::Index d = 0; d < theta.cols(); ++d) {
        EXPECT_NEAR(theta.col(d).sum(), 1.0, 1e-12);
    }
}

TEST(LdaFit, DeterministicForSeed) {
    Rng rng(9);
    auto m = DocTermMatrix::from_dense(test::random_counts(12, 8, rng, 0.5));
    LdaConfig cfg;
    cfg.k_topics = 3;
    cfg.iterations = 50;
    cfg.seed = 4;
    auto a = lda_fit(m, cfg);
    auto b = lda_fit(m, cfg);
    EXPECT_EQ(a.assignments, b.assignments);
    EXPECT_EQ(a.phi, b.phi);
}

TEST(LdaLoglik, UniformPhiCollapses) {
    LdaModel model;
    model.k = 2;
    model.alpha = 0.5;
    model.phi = Eigen::MatrixXd::Constant(4, 2, 0.25);
    auto test = DocTermMatrix::from_dense({{1, 0}, {2, 1}, {0, 0}, {1, 3}});
    auto r = lda_loglik(model, test, 10, 1);
    EXPECT_EQ(r.tokens, 8);
    EXPECT_NEAR(r.total, 8.0 * std::log(0.25), 1e-12);
}

TEST(LdaLoglik, EmptyTestRejected) {
    LdaModel model;
    model.k = 2;
    model.alpha = 0.5;
    model.phi = Eigen::MatrixXd::Constant(3, 2, 1.0 / 3.0);
    std::vector<CountEntry> none;
    try {
        lda_loglik(model, DocTermMatrix(3, 2, none));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyTest);
    }
}

TEST(LdaLoglik, PlantedBeatsShuffledControl) {
    PlantedCorpusConfig pc;
    pc.docs = 200;
    pc.topics = 2;
    pc.words_per_topic = 20;
    pc.seed = 12;
    auto docs = tokenize_all(planted_corpus(pc), TokenizerConfig{});
    std::vector<Document> train(docs.begin(), docs.begin() + 150);
    std::vector<Document> test(docs.begin() + 150, docs.end());
    auto built = build_matrix(train, 1);
    std::vector<std::string> pool;
    for (const auto& d : test) {
        pool.insert(pool.end(), d.tokens.begin(), d.tokens.end());
    }
    Rng rng(1);
    std::shuffle(pool.begin(), pool.end(), rng);
    auto control = test;
    std::size_t at = 0;
    for (auto& d : control) {
        for (auto& t : d.tokens) {
            t = pool[at++];
        }
    }
    LdaConfig cfg;
    cfg.k_topics = 2;
    cfg.iterations = 200;
    auto model = lda_fit(built.matrix, cfg);
    auto planted = lda_loglik(model, map_to_vocabulary(test, built.vocab).matrix, 50, 2);
    auto shuffled = lda_loglik(model, map_to_vocabulary(control, built.vocab).matrix, 50, 2);
    EXPECT_GT(planted.total, shuffled.total);
}

TEST(MixtureLoglik, AdditiveOverDocuments) {
    Rng rng(13);
    auto test = DocTermMatrix::from_dense(test::random_counts(6, 5, rng, 0.6));
    auto pwt = test::random_stochastic_columns(6, 3, rng);
    auto ptd = test::random_stochastic_columns(3, 5, rng);
    auto all = mixture_loglik(pwt, ptd, test);
    double sum = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
        std::vector<CountEntry> entries;
        for (std::size_t i = 0; i < 6; ++i) {
            if (test.at(i, j) > 0) {
                entries.push_back({i, 0, test.at(i, j)});
            }
        }
        DocTermMatrix single(6, 1, entries);
        sum += mixture_loglik(pwt, ptd.col(static_cast<Eigen::Index>(j)), single).total;
    }
    EXPECT_NEAR(all.total, sum, 1e-10);
}

TEST(MixtureLoglik, ZeroProbabilityIsFloored) {
    Eigen::MatrixXd pwt(2, 1);
    pwt << 1.0, 0.0;
    auto r = mixture_loglik(pwt, Eigen::MatrixXd::Ones(1, 1), DocTermMatrix::from_dense({{1}, {2}}));
    EXPECT_EQ(r.floored_tokens, 2);
    EXPECT_NEAR(r.total, 2.0 * std::log(kProbabilityFloor), 1e-9);
}
