#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace morphlex {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Warnings = std::vector<std::string>;

/// Translators are trained on the most frequent 200k forms of each language.
inline constexpr std::size_t kDefaultMaxWords = 200000;

/// A monolingual vocabulary with one dense vector per word.
///
/// Row order is frequency rank: row 0 is the most frequent word. Rows whose
/// vectors were composed from character n-grams (out-of-vocabulary forms)
/// always come after every row read from a vector file, so composing never
/// changes the rank of a real word. Instances are immutable.
class EmbeddingSpace {
public:
    EmbeddingSpace() = default;

    /// Throws FormatError on duplicate words or mismatched shapes. `composed`
    /// may be empty (nothing composed); otherwise one flag per word, and all
    /// set flags must form a trailing block.
    EmbeddingSpace(std::vector<std::string> words, RowMatrix vectors,
                   std::vector<bool> composed = {});

    std::size_t size() const { return words_.size(); }
    std::size_t dim() const { return static_cast<std::size_t>(vectors_.cols()); }
    bool empty() const { return words_.empty(); }

    const std::vector<std::string>& words() const { return words_; }
    const std::string& word(std::size_t index) const { return words_.at(index); }
    const RowMatrix& vectors() const { return vectors_; }
    Eigen::Map<const Vector> row(std::size_t index) const {
        return Eigen::Map<const Vector>(vectors_.row(static_cast<Eigen::Index>(index)).data(),
                                        vectors_.cols());
    }
    double row_norm(std::size_t index) const { return norms_[index]; }

    std::optional<std::size_t> find(std::string_view word) const;
    bool contains(std::string_view word) const { return find(word).has_value(); }

    bool is_composed(std::size_t index) const { return index >= file_rows_; }
    /// Number of rows read from a vector file (the leading, ranked block).
    std::size_t file_rows() const { return file_rows_; }

    /// Frequency rank of a file-loaded word; composed and unknown words have none.
    std::optional<std::size_t> rank(std::string_view word) const;

    /// Copy of this space with composed vectors appended. Words already present
    /// are skipped.
    EmbeddingSpace with_composed(const std::vector<std::pair<std::string, Vector>>& extra) const;

    /// Copy with the same words and flags but new vectors.
    EmbeddingSpace with_vectors(RowMatrix vectors) const;

private:
    std::vector<std::string> words_;
    RowMatrix vectors_;
    std::vector<double> norms_;
    std::size_t file_rows_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Reads the word-vector text format: a "<count> <dim>" header, then one
/// "<word> <f1> ... <fdim>" line per word. Keeps the first `max_words` unique
/// words in file order; later duplicates are skipped with a warning.
EmbeddingSpace load_vec_file(const std::filesystem::path& path,
                             std::size_t max_words = kDefaultMaxWords,
                             Warnings* warnings = nullptr);

/// Writes every row (composed rows included) in the word-vector text format.
void save_vec_file(const EmbeddingSpace& space, const std::filesystem::path& path);

/// Sidecar that records which rows of a vector file were composed.
std::filesystem::path composed_sidecar_path(const std::filesystem::path& vec_path);

/// Writes the vector file plus, when the space has composed rows, its sidecar.
void save_augmented_space(const EmbeddingSpace& space, const std::filesystem::path& path);

/// Like load_vec_file, but honours a composed-rows sidecar if one exists: the
/// vocabulary cap applies to the file-loaded block only, and composed rows
/// are restored with their flags.
EmbeddingSpace load_augmented_space(const std::filesystem::path& path,
                                    std::size_t max_words = kDefaultMaxWords,
                                    Warnings* warnings = nullptr);

struct NormalizeResult {
    EmbeddingSpace space;
    /// Words whose rows were all zero and were left unchanged.
    std::vector<std::string> zero_rows;
};

/// Scales every row to unit Euclidean norm. Zero rows are left as they are.
NormalizeResult length_normalize(const EmbeddingSpace& space);

/// Subtracts the column mean of all rows. Throws DataError on an empty space.
EmbeddingSpace mean_center(const EmbeddingSpace& space);

/// Subtracts the given mean from every row.
EmbeddingSpace mean_center(const EmbeddingSpace& space, const Vector& mean);

/// Column mean over the file-loaded rows only.
Vector file_rows_mean(const EmbeddingSpace& space);

struct PreprocessedSpace {
    EmbeddingSpace space;
    /// Mean of the normalized file-loaded rows; composed vectors added later
    /// must be shifted by the same amount.
    Vector mean;
    Warnings warnings;
};

/// Length-normalize, then mean-center by the file-loaded rows' mean. No
/// re-normalization afterwards.
PreprocessedSpace preprocess(const EmbeddingSpace& space);

/// Applies the same transformation to a vector composed after preprocessing.
Vector preprocess_vector(const Vector& raw, const Vector& mean);

/// Character n-gram vectors used to build vectors for unseen forms.
class NgramTable {
public:
    NgramTable() = default;
    explicit NgramTable(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return table_.size(); }

    /// Throws DimensionError if the vector does not have dim() entries.
    void add(std::string ngram, Vector vec);
    const Vector* find(std::string_view ngram) const;

private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, Vector> table_;
};

/// Reads "<ngram> <f1> ... <fdim>" lines (no header). Every row must have
/// `dim` floats.
NgramTable load_ngram_table(const std::filesystem::path& path, std::size_t dim);

struct NgramRange {
    std::size_t min_n = 3;
    std::size_t max_n = 6;
};

/// Sums the table vectors of every character n-gram of "<" + form + ">".
/// Throws CompositionError when none of them is in the table.
Vector compose_oov(std::string_view form, const NgramTable& table, NgramRange range = {});

struct Neighbor {
    std::string word;
    std::size_t index = 0;
    double score = 0.0;
};

double cosine(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

/// The k rows closest to `query` by cosine similarity, best first. Equal
/// scores are ordered by frequency rank (lower row index first). Zero rows
/// score 0. Throws on a zero query or a dimension mismatch.
std::vector<Neighbor> nearest(const EmbeddingSpace& space, const Eigen::Ref<const Vector>& query,
                              std::size_t k);

}  // namespace morphlex
