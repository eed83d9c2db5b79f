// flsa: command-line front end for fitting, evaluating and stress-testing FLSA topic models.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "flsa/all.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

// --- argument helpers ----------------------------------------------------------

/// "2..8", "25..200:25" or "25,50,100".
std::vector<Eigen::Index> parse_int_list(const std::string& text) {
    std::vector<Eigen::Index> out;
    auto to_int = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            long long v = std::stoll(s, &used);
            if (used != s.size()) {
                throw std::invalid_argument(s);
            }
            return static_cast<Eigen::Index>(v);
        } catch (const std::exception&) {
            throw flsa::Error(flsa::ErrorKind::InvalidArgument, "bad integer '" + s + "' in list '" + text + "'");
        }
    };
    if (auto dots = text.find(".."); dots != std::string::npos) {
        std::string rest = text.substr(dots + 2);
        Eigen::Index step = 1;
        if (auto colon = rest.find(':'); colon != std::string::npos) {
            step = to_int(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        const auto lo = to_int(text.substr(0, dots));
        const auto hi = to_int(rest);
        if (step < 1 || hi < lo) {
            throw flsa::Error(flsa::ErrorKind::InvalidArgument, "bad range '" + text + "'");
        }
        for (auto v = lo; v <= hi; v += step) {
            out.push_back(v);
        }
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(to_int(item));
        }
    }
    if (out.empty()) {
        throw flsa::Error(flsa::ErrorKind::InvalidArgument, "empty list '" + text + "'");
    }
    return out;
}

std::vector<flsa::Method> parse_methods(const std::string& text) {
    std::vector<flsa::Method> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto m = flsa::parse_method(item);
        if (!m) {
            throw flsa::Error(flsa::ErrorKind::InvalidArgument,
                              "unknown method '" + item + "' (use flsa-<scheme> or lda)");
        }
        out.push_back(*m);
    }
    if (out.empty()) {
        throw flsa::Error(flsa::ErrorKind::InvalidArgument, "no methods given");
    }
    return out;
}

flsa::GtwScheme parse_scheme(const std::string& text) {
    auto s = flsa::parse_gtw_scheme(text);
    if (!s) {
        throw flsa::Error(flsa::ErrorKind::InvalidArgument, "unknown scheme '" + text + "'");
    }
    return *s;
}

json to_json(const std::vector<Eigen::Index>& v) { return json(std::vector<std::int64_t>(v.begin(), v.end())); }

json methods_json(const std::vector<flsa::Method>& methods) {
    json out = json::array();
    for (const auto& m : methods) {
        out.push_back(m.name());
    }
    return out;
}

// --- shared option bundles -----------------------------------------------------

struct CorpusOptions {
    std::string format = "auto";
    std::size_t min_df = 1;
    std::size_t min_len = 2;
    std::string stopwords = "default";

    void add(CLI::App* app) {
        app->add_option("--format", format, "Corpus format")->check(CLI::IsMember({"auto", "jsonl", "text"}));
        app->add_option("--min-df", min_df, "Minimum document frequency of kept terms");
        app->add_option("--min-len", min_len, "Minimum token length");
        app->add_option("--stopwords", stopwords, "Stopword list: 'default', 'none' or a file with one word per line");
    }

    flsa::TokenizerConfig tokenizer() const {
        flsa::TokenizerConfig cfg;
        cfg.min_len = min_len;
        if (stopwords == "none") {
            cfg.use_stopwords = false;
            cfg.stopwords.clear();
        } else if (stopwords != "default") {
            cfg.stopwords = flsa::io::read_lines(stopwords);
        }
        return cfg;
    }

    std::vector<flsa::Document> read(const std::string& path) const {
        auto fmt = format == "jsonl"  ? flsa::io::CorpusFormat::Jsonl
                   : format == "text" ? flsa::io::CorpusFormat::Text
                                      : flsa::io::CorpusFormat::Auto;
        auto docs = flsa::tokenize_all(flsa::io::read_corpus(path, fmt), tokenizer());
        spdlog::info("read {} documents from {}", docs.size(), path);
        return docs;
    }

    flsa::BuiltCorpus build(const std::string& path) const {
        auto docs = read(path);
        auto corpus = flsa::build_matrix(docs, min_df);
        spdlog::info("matrix: {} terms x {} documents, {} dropped", corpus.matrix.terms(), corpus.matrix.docs(),
                     corpus.dropped.size());
        return corpus;
    }

    json to_json() const {
        return {{"format", format}, {"min_df", min_df}, {"min_len", min_len}, {"stopwords", stopwords}};
    }
};

struct FlsaOptions {
    std::string scheme = "entropy";
    Eigen::Index dim = 2;
    double q = 2.0;
    int max_iter = 100;
    double epsilon = 1e-5;
    std::string init = "random";

    void add(CLI::App* app, bool with_scheme = true) {
        if (with_scheme) {
            app->add_option("--scheme", scheme, "Global term weighting: entropy, idf, normal, probidf, none");
        }
        app->add_option("--dim", dim, "SVD dimensions");
        app->add_option("--q", q, "FCM fuzzifier (> 1)");
        app->add_option("--max-iter", max_iter, "FCM iteration cap");
        app->add_option("--epsilon", epsilon, "FCM membership-change tolerance");
        app->add_option("--init", init, "FCM initialisation")->check(CLI::IsMember({"random", "kmeans++"}));
    }

    flsa::FlsaConfig config(std::uint64_t seed, Eigen::Index topics) const {
        flsa::FlsaConfig cfg;
        cfg.scheme = parse_scheme(scheme);
        cfg.topics = topics;
        cfg.dim = dim;
        cfg.q = q;
        cfg.max_iter = max_iter;
        cfg.epsilon = epsilon;
        cfg.init = init == "kmeans++" ? flsa::FcmInit::KmeansPlusPlusCenters : flsa::FcmInit::RandomMembership;
        cfg.seed = seed;
        return cfg;
    }

    json to_json() const {
        return {{"scheme", scheme}, {"dim", dim},         {"q", q},
                {"max_iter", max_iter}, {"epsilon", epsilon}, {"init", init}};
    }
};

struct LdaOptions {
    std::optional<double> alpha;
    double beta = 0.01;
    int iterations = 1000;
    int fold_in_sweeps = 100;

    void add(CLI::App* app) {
        app->add_option("--lda-alpha", alpha, "LDA document-topic prior (default 50/k)");
        app->add_option("--lda-beta", beta, "LDA topic-word prior");
        app->add_option("--lda-iterations", iterations, "LDA Gibbs sweeps");
        app->add_option("--fold-in-sweeps", fold_in_sweeps, "LDA fold-in sweeps on held-out documents");
    }

    flsa::LdaConfig config() const {
        flsa::LdaConfig cfg;
        cfg.alpha = alpha;
        cfg.beta = beta;
        cfg.iterations = iterations;
        return cfg;
    }

    json to_json() const {
        return {{"alpha", alpha ? json(*alpha) : json(nullptr)},
                {"beta", beta},
                {"iterations", iterations},
                {"fold_in_sweeps", fold_in_sweeps}};
    }
};

json manifest(const std::string& command, json config, json seeds) {
    return {{"tool", "flsa"}, {"command", command}, {"config", std::move(config)}, {"derived_seeds", std::move(seeds)}};
}

void write_text(const fs::path& path, const std::string& text) {
    auto out = flsa::io::open_out(path);
    out << text;
    flsa::io::finish(out, path);
}

std::string topics_table(const std::vector<std::vector<flsa::TopWord>>& tops) {
    std::ostringstream os;
    for (std::size_t t = 0; t < tops.size(); ++t) {
        os << "topic " << t << ':';
        for (const auto& w : tops[t]) {
            os << ' ' << w.word << " (" << flsa::io::format_double(w.probability) << ')';
        }
        os << '\n';
    }
    return os.str();
}

// --- commands ------------------------------------------------------------------

struct FitCommand {
    std::string corpus;
    std::string out = "flsa_out";
    Eigen::Index topics = 2;
    std::uint64_t seed = 0;
    std::size_t top = 10;
    std::string matrix_format = "dense";
    CorpusOptions corpus_opts;
    FlsaOptions flsa_opts;

    void add(CLI::App& root) {
        auto* app = root.add_subcommand("fit", "Fit an FLSA topic model");
        app->add_option("--corpus", corpus, "Corpus (.jsonl or plain text)")->required();
        app->add_option("--out", out, "Output directory");
        app->add_option("--topics,-c", topics, "Number of topics");
        app->add_option("--seed", seed, "Master seed");
        app->add_option("--top", top, "Words per topic in topics.txt");
        app->add_option("--matrix-format", matrix_format, "Weighted matrix export")
            ->check(CLI::IsMember({"dense", "sparse"}));
        corpus_opts.add(app);
        flsa_opts.add(app);
        app->callback([this] { run(); });
    }

    void run() const {
        auto built = corpus_opts.build(corpus);
        auto cfg = flsa_opts.config(seed, topics);
        auto fit = flsa::fit_flsa_detailed(built.matrix, cfg);
        auto& model = fit.model;
        model.vocab = built.vocab.terms();
        model.doc_ids = built.doc_ids;
        model.labels = built.labels;
        spdlog::info("fcm: {} iterations, converged={}, J={}", model.fcm_iterations, model.fcm_converged,
                     model.objective);

        const fs::path dir(out);
        flsa::io::save_model(dir / "model.json", model);
        write_text(dir / "topics.txt", topics_table(flsa::top_words(model.p_w_given_t, model.vocab, top)));
        flsa::io::save_count_matrix(dir, built);
        flsa::io::write_weighted(dir / "weighted.csv", flsa::apply_weighting(built.matrix, cfg.scheme), built.doc_ids,
                                 matrix_format == "sparse" ? flsa::io::MatrixFormat::Sparse
                                                           : flsa::io::MatrixFormat::Dense);
        flsa::io::write_embedding(dir / "embedding.csv", fit.embedding, built.doc_ids);

        json config = {{"corpus", corpus}, {"topics", topics}, {"seed", seed}, {"top", top},
                       {"matrix_format", matrix_format}};
        config["tokenizer"] = corpus_opts.to_json();
        config["flsa"] = flsa_opts.to_json();
        json info = manifest("fit", config, {{"svd", cfg.svd_seed()}, {"fcm", cfg.fcm_config(topics).seed}});
        info["dropped_documents"] = built.dropped;
        flsa::io::write_json(dir / "manifest.json", info);
        std::cout << "wrote " << (dir / "model.json").string() << " (c=" << model.c << ", scheme="
                  << flsa::to_string(model.scheme) << ")\n";
    }
};

struct TopicsShowCommand {
    std::string model;
    std::size_t top = 10;

    void add(CLI::App& root) {
        auto* topics = root.add_subcommand("topics", "Inspect fitted topics");
        topics->require_subcommand(1);
        auto* app = topics->add_subcommand("show", "Print the top words of every topic");
        app->add_option("--model", model, "model.json written by fit")->required();
        app->add_option("--top,-k", top, "Words per topic");
        app->callback([this] { run(); });
    }

    void run() const {
        auto j = flsa::io::read_json(model);
        Eigen::MatrixXd p_w_given_t;
        std::vector<std::string> vocab;
        try {
            vocab = j.at("vocab").get<std::vector<std::string>>();
            const auto m = static_cast<Eigen::Index>(vocab.size());
            const auto& flat = j.at("p_w_given_t");
            if (m == 0 || flat.size() % static_cast<std::size_t>(m) != 0) {
                throw flsa::Error(flsa::ErrorKind::Parse, model + ": p_w_given_t does not match the vocabulary");
            }
            const auto c = static_cast<Eigen::Index>(flat.size()) / m;
            p_w_given_t.resize(m, c);
            for (Eigen::Index w = 0; w < m; ++w) {
                for (Eigen::Index t = 0; t < c; ++t) {
                    p_w_given_t(w, t) = flat.at(static_cast<std::size_t>(w * c + t)).get<double>();
                }
            }
        } catch (const json::exception& e) {
            throw flsa::Error(flsa::ErrorKind::Parse, model + ": " + e.what());
        }
        std::cout << topics_table(flsa::top_words(p_w_given_t, vocab, top));
    }
};

struct EstimateKCommand {
    std::string corpus;
    std::string candidates = "2..10";
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    std::string out;
    CorpusOptions corpus_opts;
    FlsaOptions flsa_opts;

    void add(CLI::App& root) {
        auto* app = root.add_subcommand("estimate-k", "Choose the topic count at the knee of the FCM objective curve");
        app->add_option("--corpus", corpus, "Corpus (.jsonl or plain text)")->required();
        app->add_option("--candidates", candidates, "Candidate topic counts, e.g. 2..8 or 25,50,75");
        app->add_option("--seed", seed, "Master seed");
        app->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
        app->add_option("--out", out, "Optional directory for curve.csv and manifest.json");
        corpus_opts.add(app);
        flsa_opts.add(app);
        app->callback([this] { run(); });
    }

    void run() const {
        auto cands = parse_int_list(candidates);
        auto built = corpus_opts.build(corpus);
        auto cfg = flsa_opts.config(seed, cands.front());
        auto est = flsa::estimate_topic_count(built.matrix, cfg, cands, jobs);
        if (est.non_decreasing_warning) {
            spdlog::warn("objective curve is not monotonically decreasing");
        }
        if (est.knee.degenerate) {
            spdlog::warn("flat objective curve; knee defaults to the first candidate");
        }
        std::ostringstream csv;
        csv << "c,J\n";
        for (std::size_t i = 0; i < est.candidates.size(); ++i) {
            csv << est.candidates[i] << ',' << flsa::io::format_double(est.objectives[i]) << '\n';
        }
        std::cout << csv.str() << "chosen: " << est.chosen << '\n';
        if (!out.empty()) {
            const fs::path dir(out);
            write_text(dir / "curve.csv", csv.str());
            json config = {{"corpus", corpus}, {"candidates", to_json(cands)}, {"seed", seed}};
            config["tokenizer"] = corpus_opts.to_json();
            config["flsa"] = flsa_opts.to_json();
            json info = manifest("estimate-k", config, {{"svd", cfg.svd_seed()}, {"fcm", cfg.fcm_config(0).seed}});
            info["chosen"] = est.chosen;
            info["non_decreasing_warning"] = est.non_decreasing_warning;
            flsa::io::write_json(dir / "manifest.json", info);
        }
    }
};

struct EvalClusterCommand {
    std::string corpus;
    std::string ks = "2..8";
    Eigen::Index topics = 50;
    std::string methods = "flsa-entropy,flsa-idf,flsa-normal,flsa-probidf";
    int kmeans_iters = 500;
    std::uint64_t seed = 0;
    std::string out = "eval_cluster";
    CorpusOptions corpus_opts;
    FlsaOptions flsa_opts;
    LdaOptions lda_opts;

    void add(CLI::App* eval) {
        auto* app = eval->add_subcommand("cluster", "Calinski-Harabasz curves over k-means of topic proportions");
        app->add_option("--corpus", corpus, "Corpus (.jsonl or plain text)")->required();
        app->add_option("--k", ks, "Cluster counts, e.g. 2..8");
        app->add_option("--topics,-c", topics, "Topics per model");
        app->add_option("--methods", methods, "Comma-separated flsa-<scheme> and/or lda");
        app->add_option("--kmeans-iters", kmeans_iters, "k-means iteration cap");
        app->add_option("--seed", seed, "Master seed");
        app->add_option("--out", out, "Output directory");
        corpus_opts.add(app);
        flsa_opts.add(app, false);
        lda_opts.add(app);
        app->callback([this] { run(); });
    }

    void run() const {
        auto k_list = parse_int_list(ks);
        auto method_list = parse_methods(methods);
        auto built = corpus_opts.build(corpus);
        auto curves = flsa::cluster_curves(built.matrix, method_list, topics, k_list, flsa_opts.config(0, topics),
                                           lda_opts.config(), kmeans_iters, seed);
        const fs::path dir(out);
        json report = json::array();
        std::cout << "method,k,ch\n";
        for (const auto& curve : curves) {
            std::ostringstream csv;
            csv << "k,ch\n";
            json points = json::array();
            for (const auto& p : curve.points) {
                const auto value = p.score.defined ? flsa::io::format_double(p.score.value) : std::string("inf");
                csv << p.k << ',' << value << '\n';
                std::cout << curve.method << ',' << p.k << ',' << value << '\n';
                points.push_back({{"k", p.k}, {"ch", p.score.defined ? json(p.score.value) : json(nullptr)}});
            }
            write_text(dir / ("ch_" + curve.method + ".csv"), csv.str());
            report.push_back({{"method", curve.method}, {"points", points}});
        }
        json config = {{"corpus", corpus}, {"k", to_json(k_list)}, {"topics", topics},
                       {"methods", methods_json(method_list)}, {"kmeans_iters", kmeans_iters}, {"seed", seed}};
        config["tokenizer"] = corpus_opts.to_json();
        config["flsa"] = flsa_opts.to_json();
        config["lda"] = lda_opts.to_json();
        flsa::io::write_json(dir / "report.json",
                             {{"curves", report},
                              {"manifest", manifest("eval cluster", config,
                                                    {{"flsa", flsa::derive_seed(seed, "flsa")},
                                                     {"lda", flsa::derive_seed(seed, "lda")},
                                                     {"kmeans", flsa::derive_seed(seed, "kmeans")}})}});
    }
};

json loglik_rows_json(const std::vector<flsa::LoglikRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"replicate", r.replicate},
                       {"topics", r.topics},
                       {"method", r.method},
                       {"loglik", r.loglik},
                       {"tokens", r.tokens},
                       {"empty_docs", r.empty_docs}});
    }
    return out;
}

std::string loglik_rows_csv(const std::vector<flsa::LoglikRow>& rows) {
    std::ostringstream csv;
    csv << "replicate,topics,method,loglik,tokens,empty_docs\n";
    for (const auto& r : rows) {
        csv << r.replicate << ',' << r.topics << ',' << r.method << ',' << flsa::io::format_double(r.loglik) << ','
            << r.tokens << ',' << r.empty_docs << '\n';
    }
    return csv.str();
}

json loglik_seeds(std::uint64_t seed) {
    return {{"flsa", flsa::derive_seed(seed, "flsa")},
            {"lda", flsa::derive_seed(seed, "lda")},
            {"fold_in", flsa::derive_seed(seed, "fold_in")}};
}

struct EvalLoglikCommand {
    std::string train;
    std::string test;
    std::string methods = "flsa-entropy,lda";
    std::string topics = "10";
    std::uint64_t seed = 0;
    std::string out = "eval_loglik";
    CorpusOptions corpus_opts;
    FlsaOptions flsa_opts;
    LdaOptions lda_opts;

    void add(CLI::App* eval) {
        auto* app = eval->add_subcommand("loglik", "Held-out log-likelihood of FLSA and LDA models");
        app->add_option("--train", train, "Training corpus")->required();
        app->add_option("--test", test, "Held-out corpus")->required();
        app->add_option("--methods", methods, "Comma-separated flsa-<scheme> and/or lda");
        app->add_option("--topics,-c", topics, "Topic counts, e.g. 10 or 10,25,50");
        app->add_option("--seed", seed, "Master seed");
        app->add_option("--out", out, "Output directory");
        corpus_opts.add(app);
        flsa_opts.add(app, false);
        lda_opts.add(app);
        app->callback([this] { run(); });
    }

    void run() const {
        flsa::LoglikOptions opts;
        opts.methods = parse_methods(methods);
        opts.topics = parse_int_list(topics);
        opts.flsa = flsa_opts.config(0, opts.topics.front());
        opts.lda = lda_opts.config();
        opts.fold_in_sweeps = lda_opts.fold_in_sweeps;
        opts.seed = seed;
        auto built = corpus_opts.build(train);
        auto mapped = flsa::map_to_vocabulary(corpus_opts.read(test), built.vocab);
        spdlog::info("test set: {} documents, {} out-of-vocabulary tokens", mapped.doc_ids.size(), mapped.oov_tokens);
        auto rows = flsa::loglik_comparison(built, mapped, opts);

        const auto csv = loglik_rows_csv(rows);
        std::cout << csv;
        const fs::path dir(out);
        write_text(dir / "loglik.csv", csv);
        json config = {{"train", train}, {"test", test}, {"methods", methods_json(opts.methods)},
                       {"topics", to_json(opts.topics)}, {"seed", seed}};
        config["tokenizer"] = corpus_opts.to_json();
        config["flsa"] = flsa_opts.to_json();
        config["lda"] = lda_opts.to_json();
        flsa::io::write_json(dir / "report.json", {{"rows", loglik_rows_json(rows)},
                                                   {"oov_tokens", mapped.oov_tokens},
                                                   {"manifest", manifest("eval loglik", config, loglik_seeds(seed))}});
    }
};

struct EvalBenchCommand {
    std::string corpus;
    std::string topics = "25..200:25";
    std::string methods = "flsa-entropy,lda";
    int repeats = 3;
    std::uint64_t seed = 0;
    std::string out = "eval_bench";
    CorpusOptions corpus_opts;
    FlsaOptions flsa_opts;
    LdaOptions lda_opts;

    void add(CLI::App* eval) {
        auto* app = eval->add_subcommand("bench", "Fit-time sweep over topic counts");
        app->add_option("--corpus", corpus, "Corpus (.jsonl or plain text)")->required();
        app->add_option("--topics,-c", topics, "Topic counts, e.g. 25..200:25");
        app->add_option("--methods", methods, "Comma-separated flsa-<scheme> and/or lda");
        app->add_option("--repeats", repeats, "Timed runs per point (median is reported)");
        app->add_option("--seed", seed, "Master seed");
        app->add_option("--out", out, "Output directory");
        corpus_opts.add(app);
        flsa_opts.add(app, false);
        lda_opts.add(app);
        app->callback([this] { run(); });
    }

    void run() const {
        auto method_list = parse_methods(methods);
        flsa::BenchConfig cfg;
        cfg.schemes.clear();
        for (const auto& m : method_list) {
            if (m.lda) {
                cfg.lda = lda_opts.config();
                cfg.lda->seed = flsa::derive_seed(seed, "lda");
            } else {
                cfg.schemes.push_back(m.scheme);
            }
        }
        cfg.topic_counts = parse_int_list(topics);
        cfg.flsa = flsa_opts.config(flsa::derive_seed(seed, "flsa"), cfg.topic_counts.front());
        cfg.repeats = repeats;
        auto built = corpus_opts.build(corpus);
        auto timings = flsa::runtime_bench(built.matrix, cfg);

        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> series;
        std::map<std::string, std::string> csvs;
        json rows = json::array();
        std::cout << "method,topics,seconds\n";
        for (const auto& t : timings) {
            auto& csv = csvs[t.method];
            if (csv.empty()) {
                csv = "topics,seconds\n";
            }
            csv += std::to_string(t.topics) + ',' + flsa::io::format_double(t.median_seconds) + '\n';
            series[t.method].first.push_back(static_cast<double>(t.topics));
            series[t.method].second.push_back(t.median_seconds);
            std::cout << t.method << ',' << t.topics << ',' << t.median_seconds << '\n';
            rows.push_back({{"method", t.method}, {"topics", t.topics}, {"seconds", t.median_seconds},
                            {"samples", t.samples}});
        }
        const fs::path dir(out);
        json summary = json::object();
        for (const auto& [method, xy] : series) {
            write_text(dir / ("time_" + method + ".csv"), csvs[method]);
            const auto [lo, hi] = std::minmax_element(xy.second.begin(), xy.second.end());
            summary[method] = {{"slope", flsa::least_squares_slope(xy.first, xy.second)},
                               {"max_min_ratio", *hi / *lo}};
        }
        json config = {{"corpus", corpus}, {"topics", to_json(cfg.topic_counts)},
                       {"methods", methods_json(method_list)}, {"repeats", repeats}, {"seed", seed}};
        config["tokenizer"] = corpus_opts.to_json();
        config["flsa"] = flsa_opts.to_json();
        config["lda"] = lda_opts.to_json();
        flsa::io::write_json(dir / "report.json",
                             {{"timings", rows},
                              {"summary", summary},
                              {"manifest", manifest("eval bench", config,
                                                    {{"flsa", flsa::derive_seed(seed, "flsa")},
                                                     {"lda", flsa::derive_seed(seed, "lda")}})}});
    }
};

struct RedundancyOptions {
    int replicates = 11;
    int min_copies = 1;
    int max_copies = 5;

    void add(CLI::App* app) {
        app->add_option("--replicates", replicates, "Number of redundant corpora");
        app->add_option("--min-copies", min_copies, "Fewest copies per document");
        app->add_option("--max-copies", max_copies, "Most copies per document");
    }

    flsa::RedundancySpec spec(std::uint64_t seed) const { return {min_copies, max_copies, replicates, seed}; }
};

void write_corpora(const fs::path& dir, const std::vector<flsa::RedundantCorpus>& corpora) {
    for (const auto& c : corpora) {
        flsa::io::write_jsonl(dir / ("replicate_" + std::to_string(c.replicate) + ".jsonl"), c.docs);
    }
}

struct EvalRedundancyCommand {
    std::string base;
    std::string topics = "10,25,50";
    std::string methods = "flsa-entropy,lda";
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
    std::string out = "eval_redundancy";
    RedundancyOptions red_opts;
    CorpusOptions corpus_opts;
    FlsaOptions flsa_opts;
    LdaOptions lda_opts;

    void add(CLI::App* eval) {
        auto* app = eval->add_subcommand("redundancy", "Held-out likelihood on corpora with duplicated documents");
        app->add_option("--base", base, "Base corpus")->required();
        app->add_option("--topics,-c", topics, "Topic counts");
        app->add_option("--methods", methods, "Comma-separated flsa-<scheme> and/or lda");
        app->add_option("--test-fraction", test_fraction, "Share of base documents held out before duplication");
        app->add_option("--seed", seed, "Master seed");
        app->add_option("--out", out, "Output directory");
        red_opts.replicates = 3;
        red_opts.add(app);
        corpus_opts.add(app);
        flsa_opts.add(app, false);
        lda_opts.add(app);
        app->callback([this] { run(); });
    }

    void run() const {
        flsa::RedundancyExperimentOptions opts;
        opts.spec = red_opts.spec(0);
        opts.test_fraction = test_fraction;
        opts.min_df = corpus_opts.min_df;
        opts.loglik.methods = parse_methods(methods);
        opts.loglik.topics = parse_int_list(topics);
        opts.loglik.flsa = flsa_opts.config(0, opts.loglik.topics.front());
        opts.loglik.lda = lda_opts.config();
        opts.loglik.fold_in_sweeps = lda_opts.fold_in_sweeps;
        opts.loglik.seed = seed;
        auto result = flsa::run_redundancy_experiment(corpus_opts.read(base), opts);

        const fs::path dir(out);
        write_corpora(dir, result.corpora);
        auto spec = opts.spec;
        spec.seed = flsa::derive_seed(seed, "synth");
        flsa::io::write_json(dir / "corpora_manifest.json", flsa::redundancy_manifest(result.corpora, spec));
        std::vector<std::string> test_ids;
        for (const auto& d : result.split.test) {
            test_ids.push_back(d.id);
        }
        flsa::io::write_lines(dir / "test_ids.txt", test_ids);

        const auto csv = loglik_rows_csv(result.rows);
        std::cout << csv;
        write_text(dir / "loglik.csv", csv);
        json config = {{"base", base}, {"topics", to_json(opts.loglik.topics)},
                       {"methods", methods_json(opts.loglik.methods)}, {"test_fraction", test_fraction},
                       {"replicates", red_opts.replicates}, {"min_copies", red_opts.min_copies},
                       {"max_copies", red_opts.max_copies}, {"seed", seed}};
        config["tokenizer"] = corpus_opts.to_json();
        config["flsa"] = flsa_opts.to_json();
        config["lda"] = lda_opts.to_json();
        json seeds = {{"split", flsa::derive_seed(seed, "split")}, {"synth", spec.seed}};
        for (int r = 0; r < red_opts.replicates; ++r) {
            seeds["replicate_" + std::to_string(r)] = flsa::derive_seed(seed, "replicate", static_cast<std::uint64_t>(r));
        }
        flsa::io::write_json(dir / "report.json", {{"rows", loglik_rows_json(result.rows)},
                                                   {"manifest", manifest("eval redundancy", config, seeds)}});
    }
};

struct SynthRedundantCommand {
    std::string base;
    std::uint64_t seed = 0;
    std::string out = "redundant";
    std::string format = "auto";
    RedundancyOptions red_opts;

    void add(CLI::App& root) {
        auto* app = root.add_subcommand("synth-redundant", "Write corpora in which every document is duplicated");
        app->add_option("--base", base, "Base corpus")->required();
        app->add_option("--seed", seed, "Master seed");
        app->add_option("--out", out, "Output directory");
        app->add_option("--format", format, "Corpus format")->check(CLI::IsMember({"auto", "jsonl", "text"}));
        red_opts.add(app);
        app->callback([this] { run(); });
    }

    void run() const {
        auto fmt = format == "jsonl"  ? flsa::io::CorpusFormat::Jsonl
                   : format == "text" ? flsa::io::CorpusFormat::Text
                                      : flsa::io::CorpusFormat::Auto;
        auto docs = flsa::io::read_corpus(base, fmt);
        auto spec = red_opts.spec(seed);
        auto corpora = flsa::synthesize_redundant(docs, spec);
        const fs::path dir(out);
        write_corpora(dir, corpora);
        json info = flsa::redundancy_manifest(corpora, spec);
        json seeds = json::object();
        for (int r = 0; r < spec.replicates; ++r) {
            seeds["replicate_" + std::to_string(r)] = flsa::derive_seed(seed, "redundancy", static_cast<std::uint64_t>(r));
        }
        info["manifest"] = manifest("synth-redundant", {{"base", base}, {"format", format}, {"seed", seed},
                                                        {"replicates", spec.replicates},
                                                        {"min_copies", spec.min_copies},
                                                        {"max_copies", spec.max_copies}},
                                    seeds);
        flsa::io::write_json(dir / "manifest.json", info);
        std::cout << "wrote " << corpora.size() << " corpora to " << dir.string() << '\n';
    }
};

struct ExportFeaturesCommand {
    std::string model;
    std::string out = "features.csv";

    void add(CLI::App& root) {
        auto* app = root.add_subcommand("export-features", "Write P(T|D) per training document as classifier features");
        app->add_option("--model", model, "model.json written by fit")->required();
        app->add_option("--out", out, "CSV path (doc_id,t0,...,label)");
        app->callback([this] { run(); });
    }

    void run() const {
        flsa::export_features(flsa::io::load_model(model), out);
        std::cout << "wrote " << out << '\n';
    }
};

struct SynthCorpusCommand {
    flsa::PlantedCorpusConfig cfg;
    std::string out = "corpus.jsonl";

    void add(CLI::App& root) {
        auto* app = root.add_subcommand("synth-corpus", "Generate a labelled corpus with planted topics");
        app->add_option("--docs", cfg.docs, "Number of documents");
        app->add_option("--topics", cfg.topics, "Number of planted topics");
        app->add_option("--words-per-topic", cfg.words_per_topic, "Vocabulary block size per topic");
        app->add_option("--background-words", cfg.background_words, "Shared background vocabulary size");
        app->add_option("--background-rate", cfg.background_rate, "Probability of a background token");
        app->add_option("--min-length", cfg.min_length, "Shortest document in tokens");
        app->add_option("--max-length", cfg.max_length, "Longest document in tokens");
        app->add_option("--mixing", cfg.mixing, "Dirichlet concentration of topic mixtures (0 = single topic)");
        app->add_option("--zipf", cfg.zipf, "Zipf exponent of within-topic word frequencies");
        app->add_option("--seed", cfg.seed, "Seed");
        app->add_option("--out", out, "Output JSONL path");
        app->callback([this] { run(); });
    }

    void run() const {
        flsa::io::write_jsonl(out, flsa::planted_corpus(cfg));
        std::cout << "wrote " << cfg.docs << " documents to " << out << '\n';
    }
};

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("flsa");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("FLSA_LOG")) {
        spdlog::set_level(spdlog::level::from_str(env));
    }
}

} // namespace

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"Fuzzy latent semantic analysis topic models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "flsa 1.0.0");

    FitCommand fit;
    TopicsShowCommand topics_show;
    EstimateKCommand estimate_k;
    EvalClusterCommand eval_cluster;
    EvalLoglikCommand eval_loglik;
    EvalBenchCommand eval_bench;
    EvalRedundancyCommand eval_redundancy;
    SynthRedundantCommand synth_redundant;
    ExportFeaturesCommand export_features;
    SynthCorpusCommand synth_corpus;

    fit.add(app);
    topics_show.add(app);
    estimate_k.add(app);
    auto* eval = app.add_subcommand("eval", "Evaluation experiments");
    eval->require_subcommand(1);
    eval_cluster.add(eval);
    eval_loglik.add(eval);
    eval_bench.add(eval);
    eval_redundancy.add(eval);
    synth_redundant.add(app);
    export_features.add(app);
    synth_corpus.add(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    } catch (const flsa::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.category() == flsa::ErrorCategory::Numerical ? kExitNumerical : kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}
