#ifndef FLSA_IO_HPP
#define FLSA_IO_HPP

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "flsa/corpus.hpp"
#include "flsa/error.hpp"
#include "flsa/flsa.hpp"
#include "flsa/lda.hpp"
#include "flsa/linalg.hpp"
#include "flsa/weighting.hpp"

/**
 * @file io.hpp
 * @brief File formats: JSONL/plain-text corpora, sparse count triples, dense and
 * sparse weighted matrices, embeddings and model JSON.
 */

namespace flsa::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return ec == std::errc() ? std::string(buf, end) : std::to_string(v);
}

inline std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    detail::require(in.good(), ErrorKind::IoFailure, "cannot open '" + path.string() + "' for reading");
    return in;
}

inline std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    detail::require(out.good(), ErrorKind::IoFailure, "cannot open '" + path.string() + "' for writing");
    return out;
}

inline void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    detail::require(out.good(), ErrorKind::IoFailure, "failed writing '" + path.string() + "'");
}

// --- corpora -----------------------------------------------------------------

/// One JSON object per line: {"id": str, "text": str, "label": str|null}. Blank lines are skipped.
inline std::vector<Document> read_jsonl(const fs::path& path) {
    auto in = open_in(path);
    std::vector<Document> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(line_no);
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::Parse, where + ": " + e.what());
        }
        detail::require(obj.is_object() && obj.contains("id") && obj["id"].is_string() && obj.contains("text") &&
                            obj["text"].is_string(),
                        ErrorKind::Parse, where + ": expected string fields 'id' and 'text'");
        Document d;
        d.id = obj["id"].get<std::string>();
        d.text = obj["text"].get<std::string>();
        if (obj.contains("label") && !obj["label"].is_null()) {
            detail::require(obj["label"].is_string(), ErrorKind::Parse, where + ": 'label' must be a string or null");
            d.label = obj["label"].get<std::string>();
        }
        docs.push_back(std::move(d));
    }
    return docs;
}

/// One document per line with ids d0, d1, ...
inline std::vector<Document> read_plain(const fs::path& path) {
    auto in = open_in(path);
    std::vector<Document> docs;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        Document d;
        d.id = "d" + std::to_string(docs.size());
        d.text = std::move(line);
        docs.push_back(std::move(d));
    }
    return docs;
}

enum class CorpusFormat { Auto, Jsonl, Text };

inline std::vector<Document> read_corpus(const fs::path& path, CorpusFormat format = CorpusFormat::Auto) {
    detail::require(fs::exists(path), ErrorKind::IoFailure, "corpus file '" + path.string() + "' does not exist");
    if (format == CorpusFormat::Auto) {
        const auto ext = path.extension().string();
        format = (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") ? CorpusFormat::Jsonl : CorpusFormat::Text;
    }
    return format == CorpusFormat::Jsonl ? read_jsonl(path) : read_plain(path);
}

inline void write_jsonl(const fs::path& path, const std::vector<Document>& docs) {
    auto out = open_out(path);
    for (const auto& d : docs) {
        json obj = {{"id", d.id}, {"text", d.text}, {"label", d.label ? json(*d.label) : json(nullptr)}};
        out << obj.dump() << '\n';
    }
    finish(out, path);
}

inline void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
    auto out = open_out(path);
    for (const auto& l : lines) {
        out << l << '\n';
    }
    finish(out, path);
}

inline std::vector<std::string> read_lines(const fs::path& path) {
    auto in = open_in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

// --- count matrix ------------------------------------------------------------

inline void write_count_triples(const fs::path& path, const DocTermMatrix& matrix) {
    auto out = open_out(path);
    out << "term_index,doc_index,count\n";
    for (const auto& e : matrix.entries()) {
        out << e.term << ',' << e.doc << ',' << e.count << '\n';
    }
    finish(out, path);
}

namespace detail {

template <class T>
T parse_number(std::string_view field, const std::string& where) {
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    flsa::detail::require(ec == std::errc() && ptr == field.data() + field.size(), ErrorKind::Parse,
                          where + ": bad number '" + std::string(field) + "'");
    return value;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

} // namespace detail

inline DocTermMatrix read_count_triples(const fs::path& path, std::size_t terms, std::size_t docs) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    flsa::detail::require(line.rfind("term_index,doc_index,count", 0) == 0, ErrorKind::Parse,
                          path.string() + ": missing header term_index,doc_index,count");
    std::vector<CountEntry> entries;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(line_no);
        auto fields = detail::split_csv(line);
        flsa::detail::require(fields.size() == 3, ErrorKind::Parse, where + ": expected 3 fields");
        entries.push_back({detail::parse_number<std::size_t>(fields[0], where),
                           detail::parse_number<std::size_t>(fields[1], where),
                           detail::parse_number<int>(fields[2], where)});
    }
    return DocTermMatrix(terms, docs, entries);
}

/// matrix.csv + vocab.txt + docs.txt in `dir`.
inline void save_count_matrix(const fs::path& dir, const BuiltCorpus& corpus) {
    write_count_triples(dir / "matrix.csv", corpus.matrix);
    write_lines(dir / "vocab.txt", corpus.vocab.terms());
    write_lines(dir / "docs.txt", corpus.doc_ids);
}

inline BuiltCorpus load_count_matrix(const fs::path& dir) {
    BuiltCorpus out;
    out.vocab = Vocabulary(read_lines(dir / "vocab.txt"));
    out.doc_ids = read_lines(dir / "docs.txt");
    out.labels.assign(out.doc_ids.size(), std::nullopt);
    out.matrix = read_count_triples(dir / "matrix.csv", out.vocab.size(), out.doc_ids.size());
    return out;
}

// --- weighted matrix and embedding ---------------------------------------------

enum class MatrixFormat { Dense, Sparse };

/// Dense: header of document ids, then one row of n weights per term. Sparse: term_index,doc_index,weight.
inline void write_weighted(const fs::path& path, const WeightedMatrix& weighted, const std::vector<std::string>& doc_ids,
                           MatrixFormat format) {
    flsa::detail::require(doc_ids.size() == weighted.docs(), ErrorKind::DimensionMismatch,
                          "document id count differs from matrix columns");
    auto out = open_out(path);
    if (format == MatrixFormat::Sparse) {
        out << "term_index,doc_index,weight\n";
        for (Eigen::Index j = 0; j < weighted.values.outerSize(); ++j) {
            for (SparseReal::InnerIterator it(weighted.values, j); it; ++it) {
                out << it.row() << ',' << j << ',' << format_double(it.value()) << '\n';
            }
        }
    } else {
        Eigen::MatrixXd dense = Eigen::MatrixXd(weighted.values);
        for (std::size_t j = 0; j < doc_ids.size(); ++j) {
            out << (j ? "," : "") << doc_ids[j];
        }
        out << '\n';
        for (Eigen::Index i = 0; i < dense.rows(); ++i) {
            for (Eigen::Index j = 0; j < dense.cols(); ++j) {
                out << (j ? "," : "") << format_double(dense(i, j));
            }
            out << '\n';
        }
    }
    finish(out, path);
}

inline void write_embedding(const fs::path& path, const Embedding& emb, const std::vector<std::string>& doc_ids) {
    flsa::detail::require(static_cast<Eigen::Index>(doc_ids.size()) == emb.size(), ErrorKind::DimensionMismatch,
                          "document id count differs from embedding rows");
    auto out = open_out(path);
    out << "doc_id";
    for (Eigen::Index c = 0; c < emb.dim(); ++c) {
        out << ",x" << (c + 1);
    }
    out << '\n';
    for (Eigen::Index j = 0; j < emb.size(); ++j) {
        out << doc_ids[static_cast<std::size_t>(j)];
        for (Eigen::Index c = 0; c < emb.dim(); ++c) {
            out << ',' << format_double(emb.points(j, c));
        }
        out << '\n';
    }
    finish(out, path);
}

// --- model JSON ----------------------------------------------------------------

namespace detail {

inline json row_major(const Eigen::MatrixXd& m) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            arr.push_back(m(i, j));
        }
    }
    return arr;
}

inline Eigen::MatrixXd from_row_major(const json& arr, Eigen::Index rows, Eigen::Index cols, const char* name) {
    flsa::detail::require(arr.is_array() && static_cast<Eigen::Index>(arr.size()) == rows * cols, ErrorKind::Parse,
                          std::string("model field '") + name + "' has the wrong length");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = arr[static_cast<std::size_t>(i * cols + j)].get<double>();
        }
    }
    return m;
}

inline json labels_json(const std::vector<std::optional<std::string>>& labels) {
    json arr = json::array();
    for (const auto& l : labels) {
        arr.push_back(l ? json(*l) : json(nullptr));
    }
    return arr;
}

inline std::vector<std::optional<std::string>> labels_from(const json& arr) {
    std::vector<std::optional<std::string>> out;
    for (const auto& l : arr) {
        out.push_back(l.is_null() ? std::nullopt : std::optional<std::string>(l.get<std::string>()));
    }
    return out;
}

} // namespace detail

inline json to_json(const TopicModel& model) {
    json meta = {{"scheme", std::string(to_string(model.scheme))},
                 {"c", model.c},
                 {"d", model.d},
                 {"seed", model.seed},
                 {"epsilon", model.epsilon},
                 {"objective", model.objective},
                 {"q", model.q},
                 {"terms", model.terms()},
                 {"docs", model.docs()},
                 {"fcm_iterations", model.fcm_iterations},
                 {"fcm_converged", model.fcm_converged},
                 {"rectified_entries", model.rectified_entries},
                 {"excluded_docs", model.excluded_docs}};
    json out = {{"method", "flsa"},
                {"meta", meta},
                {"vocab", model.vocab},
                {"doc_ids", model.doc_ids},
                {"p_w_given_t", detail::row_major(model.p_w_given_t)},
                {"p_t_given_d", detail::row_major(model.p_t_given_d)},
                {"fold_in",
                 {{"global_weights", model.global_weights},
                  {"projection", detail::row_major(model.projection)},
                  {"centers", detail::row_major(model.centers)}}}};
    if (std::any_of(model.labels.begin(), model.labels.end(), [](const auto& l) { return l.has_value(); })) {
        out["labels"] = detail::labels_json(model.labels);
    }
    return out;
}

inline TopicModel topic_model_from_json(const json& j) {
    try {
        flsa::detail::require(j.value("method", std::string("flsa")) == "flsa", ErrorKind::Parse,
                              "model file is not an FLSA model");
        const auto& meta = j.at("meta");
        TopicModel m;
        auto scheme = parse_gtw_scheme(meta.at("scheme").get<std::string>());
        flsa::detail::require(scheme.has_value(), ErrorKind::Parse, "unknown scheme in model file");
        m.scheme = *scheme;
        m.c = meta.at("c").get<Eigen::Index>();
        m.d = meta.at("d").get<Eigen::Index>();
        m.seed = meta.at("seed").get<std::uint64_t>();
        m.epsilon = meta.at("epsilon").get<double>();
        m.objective = meta.at("objective").get<double>();
        m.q = meta.value("q", 2.0);
        m.fcm_iterations = meta.value("fcm_iterations", 0);
        m.fcm_converged = meta.value("fcm_converged", false);
        m.rectified_entries = meta.value("rectified_entries", std::size_t{0});
        if (meta.contains("excluded_docs")) {
            m.excluded_docs = meta["excluded_docs"].get<std::vector<Eigen::Index>>();
        }
        m.vocab = j.at("vocab").get<std::vector<std::string>>();
        m.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
        const auto terms = meta.value("terms", static_cast<Eigen::Index>(m.vocab.size()));
        const auto docs = meta.value("docs", static_cast<Eigen::Index>(m.doc_ids.size()));
        m.p_w_given_t = detail::from_row_major(j.at("p_w_given_t"), terms, m.c, "p_w_given_t");
        m.p_t_given_d = detail::from_row_major(j.at("p_t_given_d"), m.c, docs, "p_t_given_d");
        if (j.contains("labels")) {
            m.labels = detail::labels_from(j["labels"]);
        }
        if (j.contains("fold_in")) {
            const auto& f = j["fold_in"];
            m.global_weights = f.at("global_weights").get<std::vector<double>>();
            m.projection = detail::from_row_major(f.at("projection"), terms, m.d, "projection");
            m.centers = detail::from_row_major(f.at("centers"), m.c, m.d, "centers");
        }
        return m;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("model JSON: ") + e.what());
    }
}

inline json to_json(const LdaModel& model) {
    json meta = {{"k", model.k},       {"alpha", model.alpha},           {"beta", model.beta},
                 {"seed", model.seed}, {"iterations", model.iterations}, {"terms", model.phi.rows()},
                 {"docs", model.theta.cols()}};
    return {{"method", "lda"},
            {"meta", meta},
            {"vocab", model.vocab},
            {"doc_ids", model.doc_ids},
            {"p_w_given_t", detail::row_major(model.phi)},
            {"p_t_given_d", detail::row_major(model.theta)}};
}

inline void write_json(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    finish(out, path);
}

inline json read_json(const fs::path& path) {
    auto in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
    }
}

inline void save_model(const fs::path& path, const TopicModel& model) { write_json(path, to_json(model)); }

inline TopicModel load_model(const fs::path& path) { return topic_model_from_json(read_json(path)); }

} // namespace flsa::io

#endif
