#include "morphlex/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "json.hpp"

#include "morphlex/error.hpp"
#include "morphlex/io.hpp"
#include "morphlex/utf8.hpp"

namespace morphlex {

EmbeddingSpace::EmbeddingSpace(std::vector<std::string> words, RowMatrix vectors,
                               std::vector<bool> composed)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
    if (static_cast<std::size_t>(vectors_.rows()) != words_.size()) {
        throw FormatError("embedding space: " + std::to_string(words_.size()) + " words but " +
                          std::to_string(vectors_.rows()) + " rows");
    }
    if (!composed.empty() && composed.size() != words_.size()) {
        throw FormatError("embedding space: composed flags do not match the word count");
    }
    file_rows_ = words_.size();
    for (std::size_t i = 0; i < composed.size(); ++i) {
        if (composed[i]) {
            file_rows_ = i;
            break;
        }
    }
    for (std::size_t i = file_rows_; i < composed.size(); ++i) {
        if (!composed[i]) throw FormatError("embedding space: composed rows must come last");
    }
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (!index_.emplace(words_[i], i).second) {
            throw FormatError("embedding space: duplicate word '" + words_[i] + "'");
        }
    }
    norms_.resize(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) norms_[i] = row(i).norm();
}

std::optional<std::size_t> EmbeddingSpace::find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> EmbeddingSpace::rank(std::string_view word) const {
    auto idx = find(word);
    if (!idx || is_composed(*idx)) return std::nullopt;
    return idx;
}

EmbeddingSpace EmbeddingSpace::with_composed(
    const std::vector<std::pair<std::string, Vector>>& extra) const {
    std::vector<std::string> words = words_;
    std::vector<const Vector*> added;
    std::unordered_map<std::string, std::size_t> seen;
    for (const auto& [word, vec] : extra) {
        if (index_.count(word) || seen.count(word)) continue;
        if (static_cast<std::size_t>(vec.size()) != dim()) {
            throw DimensionError("composed vector for '" + word + "' has dimension " +
                                 std::to_string(vec.size()) + ", expected " +
                                 std::to_string(dim()));
        }
        seen.emplace(word, added.size());
        words.push_back(word);
        added.push_back(&vec);
    }
    RowMatrix vectors(static_cast<Eigen::Index>(words.size()), vectors_.cols());
    vectors.topRows(vectors_.rows()) = vectors_;
    for (std::size_t i = 0; i < added.size(); ++i) {
        vectors.row(vectors_.rows() + static_cast<Eigen::Index>(i)) = added[i]->transpose();
    }
    std::vector<bool> flags(words.size(), false);
    for (std::size_t i = file_rows_; i < words.size(); ++i) flags[i] = true;
    return EmbeddingSpace(std::move(words), std::move(vectors), std::move(flags));
}

EmbeddingSpace EmbeddingSpace::with_vectors(RowMatrix vectors) const {
    if (vectors.rows() != vectors_.rows()) {
        throw DimensionError("with_vectors: row count changed");
    }
    std::vector<bool> flags(words_.size(), false);
    for (std::size_t i = file_rows_; i < words_.size(); ++i) flags[i] = true;
    return EmbeddingSpace(words_, std::move(vectors), std::move(flags));
}

namespace {

struct VecRows {
    std::vector<std::string> words;
    std::vector<double> values;
    std::size_t dim = 0;
    std::size_t declared = 0;
};

// Reads rows after the header. `limit` counts unique words.
VecRows read_vec_rows(const std::filesystem::path& path, std::size_t limit, Warnings* warnings) {
    auto in = io::open_input(path);
    const std::string name = path.string();
    std::string line;
    if (!std::getline(in, line)) throw FormatError(name + ":1: missing header");
    io::chomp(line);
    const auto header = io::split_ws(line);
    if (header.size() != 2) throw FormatError(name + ":1: header must be '<count> <dim>'");
    VecRows out;
    const long count = io::parse_long(header[0], name + ":1");
    const long dim = io::parse_long(header[1], name + ":1");
    if (count < 0 || dim <= 0) throw FormatError(name + ":1: bad header values");
    out.dim = static_cast<std::size_t>(dim);
    out.declared = static_cast<std::size_t>(count);

    const std::size_t wanted = std::min(out.declared, limit);
    std::unordered_map<std::string, bool> seen;
    std::size_t line_no = 1;
    std::size_t rows_read = 0;
    while (out.words.size() < wanted && rows_read < out.declared && std::getline(in, line)) {
        ++line_no;
        io::chomp(line);
        if (io::trim(line).empty()) continue;
        ++rows_read;
        const auto fields = io::split_ws(line);
        const std::string where = name + ":" + std::to_string(line_no);
        if (fields.size() != out.dim + 1) {
            throw FormatError(where + ": " + std::to_string(fields.size() - 1) +
                              " floats, expected " + std::to_string(out.dim));
        }
        std::string word(fields[0]);
        if (!seen.emplace(word, true).second) {
            if (warnings) warnings->push_back(where + ": duplicate word '" + word + "' skipped");
            continue;
        }
        for (std::size_t j = 1; j <= out.dim; ++j) {
            out.values.push_back(io::parse_double(fields[j], where));
        }
        out.words.push_back(std::move(word));
    }
    if (out.words.size() < wanted && rows_read < out.declared) {
        throw FormatError(name + ": header declares " + std::to_string(out.declared) +
                          " rows, found " + std::to_string(out.words.size()));
    }
    return out;
}

RowMatrix to_matrix(const VecRows& rows) {
    RowMatrix m(static_cast<Eigen::Index>(rows.words.size()), static_cast<Eigen::Index>(rows.dim));
    std::copy(rows.values.begin(), rows.values.end(), m.data());
    return m;
}

void write_rows(std::ostream& out, const EmbeddingSpace& space) {
    for (std::size_t i = 0; i < space.size(); ++i) {
        out << space.word(i);
        const auto r = space.row(i);
        for (Eigen::Index j = 0; j < r.size(); ++j) out << ' ' << io::format_double(r[j]);
        out << '\n';
    }
}

}  // namespace

EmbeddingSpace load_vec_file(const std::filesystem::path& path, std::size_t max_words,
                             Warnings* warnings) {
    VecRows rows = read_vec_rows(path, max_words, warnings);
    RowMatrix m = to_matrix(rows);
    return EmbeddingSpace(std::move(rows.words), std::move(m));
}

void save_vec_file(const EmbeddingSpace& space, const std::filesystem::path& path) {
    auto out = io::open_output(path);
    out << space.size() << ' ' << space.dim() << '\n';
    write_rows(out, space);
    if (!out) throw FormatError("failed writing " + path.string());
}

std::filesystem::path composed_sidecar_path(const std::filesystem::path& vec_path) {
    return std::filesystem::path(vec_path.string() + ".composed.json");
}

void save_augmented_space(const EmbeddingSpace& space, const std::filesystem::path& path) {
    save_vec_file(space, path);
    const auto sidecar = composed_sidecar_path(path);
    if (space.file_rows() == space.size()) {
        std::filesystem::remove(sidecar);
        return;
    }
    nlohmann::json meta;
    meta["file_rows"] = space.file_rows();
    meta["composed"] = std::vector<std::string>(space.words().begin() +
                                                    static_cast<std::ptrdiff_t>(space.file_rows()),
                                                space.words().end());
    auto out = io::open_output(sidecar);
    out << meta.dump(2) << '\n';
}

EmbeddingSpace load_augmented_space(const std::filesystem::path& path, std::size_t max_words,
                                    Warnings* warnings) {
    const auto sidecar = composed_sidecar_path(path);
    if (!std::filesystem::exists(sidecar)) return load_vec_file(path, max_words, warnings);

    nlohmann::json meta;
    try {
        auto in = io::open_input(sidecar);
        meta = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(sidecar.string() + ": " + e.what());
    }
    const std::size_t file_rows = meta.at("file_rows").get<std::size_t>();
    const auto composed = meta.at("composed").get<std::vector<std::string>>();

    VecRows rows = read_vec_rows(path, file_rows + composed.size(), warnings);
    if (rows.words.size() != file_rows + composed.size()) {
        throw FormatError(path.string() + ": row count disagrees with " + sidecar.string());
    }
    for (std::size_t i = 0; i < composed.size(); ++i) {
        if (rows.words[file_rows + i] != composed[i]) {
            throw FormatError(path.string() + ": composed row '" + rows.words[file_rows + i] +
                              "' not listed in sidecar");
        }
    }
    const std::size_t keep = std::min(file_rows, max_words);
    std::vector<std::string> words(rows.words.begin(),
                                   rows.words.begin() + static_cast<std::ptrdiff_t>(keep));
    words.insert(words.end(), composed.begin(), composed.end());
    RowMatrix all = to_matrix(rows);
    RowMatrix m(static_cast<Eigen::Index>(words.size()), all.cols());
    m.topRows(static_cast<Eigen::Index>(keep)) = all.topRows(static_cast<Eigen::Index>(keep));
    m.bottomRows(static_cast<Eigen::Index>(composed.size())) =
        all.bottomRows(static_cast<Eigen::Index>(composed.size()));
    std::vector<bool> flags(words.size(), false);
    std::fill(flags.begin() + static_cast<std::ptrdiff_t>(keep), flags.end(), true);
    return EmbeddingSpace(std::move(words), std::move(m), std::move(flags));
}

NormalizeResult length_normalize(const EmbeddingSpace& space) {
    NormalizeResult result;
    RowMatrix m = space.vectors();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double norm = m.row(i).norm();
        if (norm == 0.0) {
            result.zero_rows.push_back(space.word(static_cast<std::size_t>(i)));
            continue;
        }
        m.row(i) /= norm;
    }
    result.space = space.with_vectors(std::move(m));
    return result;
}

EmbeddingSpace mean_center(const EmbeddingSpace& space) {
    if (space.empty()) throw DataError("mean_center: empty embedding space");
    const Vector mean = space.vectors().colwise().mean().transpose();
    return mean_center(space, mean);
}

EmbeddingSpace mean_center(const EmbeddingSpace& space, const Vector& mean) {
    if (static_cast<std::size_t>(mean.size()) != space.dim()) {
        throw DimensionError("mean_center: mean has the wrong dimension");
    }
    RowMatrix m = space.vectors();
    m.rowwise() -= mean.transpose();
    return space.with_vectors(std::move(m));
}

Vector file_rows_mean(const EmbeddingSpace& space) {
    if (space.file_rows() == 0) throw DataError("empty embedding space");
    return space.vectors().topRows(static_cast<Eigen::Index>(space.file_rows())).colwise().mean().transpose();
}

PreprocessedSpace preprocess(const EmbeddingSpace& space) {
    PreprocessedSpace out;
    NormalizeResult normalized = length_normalize(space);
    for (const auto& w : normalized.zero_rows) out.warnings.push_back("zero vector: '" + w + "'");
    out.mean = file_rows_mean(normalized.space);
    out.space = mean_center(normalized.space, out.mean);
    return out;
}

Vector preprocess_vector(const Vector& raw, const Vector& mean) {
    if (raw.size() != mean.size()) throw DimensionError("preprocess_vector: dimension mismatch");
    const double norm = raw.norm();
    Vector v = norm > 0.0 ? Vector(raw / norm) : raw;
    return v - mean;
}

void NgramTable::add(std::string ngram, Vector vec) {
    if (static_cast<std::size_t>(vec.size()) != dim_) {
        throw DimensionError("n-gram '" + ngram + "' has dimension " + std::to_string(vec.size()) +
                             ", expected " + std::to_string(dim_));
    }
    table_.insert_or_assign(std::move(ngram), std::move(vec));
}

const Vector* NgramTable::find(std::string_view ngram) const {
    auto it = table_.find(std::string(ngram));
    return it == table_.end() ? nullptr : &it->second;
}

NgramTable load_ngram_table(const std::filesystem::path& path, std::size_t dim) {
    auto in = io::open_input(path);
    NgramTable table(dim);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        io::chomp(line);
        if (io::trim(line).empty()) continue;
        const auto fields = io::split_ws(line);
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (fields.size() != dim + 1) {
            throw FormatError(where + ": " + std::to_string(fields.size() - 1) +
                              " floats, expected " + std::to_string(dim));
        }
        Vector v(static_cast<Eigen::Index>(dim));
        for (std::size_t j = 0; j < dim; ++j) v[static_cast<Eigen::Index>(j)] = io::parse_double(fields[j + 1], where);
        table.add(std::string(fields[0]), std::move(v));
    }
    return table;
}

Vector compose_oov(std::string_view form, const NgramTable& table, NgramRange range) {
    const std::string wrapped = "<" + std::string(form) + ">";
    Vector sum = Vector::Zero(static_cast<Eigen::Index>(table.dim()));
    std::size_t hits = 0;
    for (std::string_view gram : utf8::ngrams(wrapped, range.min_n, range.max_n)) {
        if (const Vector* v = table.find(gram)) {
            sum += *v;
            ++hits;
        }
    }
    if (hits == 0) {
        throw CompositionError("no character n-gram of '" + std::string(form) + "' in the table");
    }
    return sum;
}

double cosine(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
    if (a.size() != b.size()) throw DimensionError("cosine: dimension mismatch");
    const double denom = a.norm() * b.norm();
    return denom == 0.0 ? 0.0 : a.dot(b) / denom;
}

std::vector<Neighbor> nearest(const EmbeddingSpace& space, const Eigen::Ref<const Vector>& query,
                              std::size_t k) {
    if (static_cast<std::size_t>(query.size()) != space.dim()) {
        throw DimensionError("nearest: query has dimension " + std::to_string(query.size()) +
                             ", space has " + std::to_string(space.dim()));
    }
    const double qnorm = query.norm();
    if (qnorm == 0.0) throw DimensionError("nearest: zero query vector");
    if (k == 0) throw Error("nearest: k must be positive");

    const Vector dots = space.vectors() * query;
    std::vector<double> scores(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double rn = space.row_norm(i);
        scores[i] = rn == 0.0 ? 0.0 : dots[static_cast<Eigen::Index>(i)] / (rn * qnorm);
    }
    std::vector<std::size_t> order(space.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t take = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return a < b;
                      });
    std::vector<Neighbor> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.push_back({space.word(order[i]), order[i], scores[order[i]]});
    }
    return out;
}

}  // namespace morphlex
