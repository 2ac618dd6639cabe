#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "morphlex/embeddings.hpp"
#include "morphlex/morph.hpp"

namespace morphlex {

struct EvalEntry {
    std::string source;
    std::vector<std::string> gold;  // non-empty, unique, in file order
    std::optional<MorphTag> tag;
    std::optional<std::string> lemma;  // gold source lemma, for oracle runs
};

struct EvalDictionary {
    std::vector<EvalEntry> entries;
    std::string provenance;
};

/// Reads "source<TAB>target[<TAB>source_tag[<TAB>source_lemma]]" lines.
/// Repeated source forms merge their gold targets.
EvalDictionary load_eval_dictionary(const std::filesystem::path& path);
void save_eval_dictionary(const EvalDictionary& dict, const std::filesystem::path& path);

/// A system maps an entry to its 1-best prediction, or nothing when it cannot
/// translate the entry.
using TranslationSystem = std::function<std::optional<std::string>(const EvalEntry&)>;

struct ScoredEntry {
    std::string source;
    std::optional<std::string> prediction;
    bool correct = false;
    bool in_vocab = false;          // file-loaded word of the source space
    std::optional<std::size_t> rank;  // set iff in_vocab
    std::optional<MorphTag> tag;
};

struct Cell {
    std::string label;
    std::size_t count = 0;
    std::size_t correct = 0;
    bool low_support = false;

    double accuracy() const {
        return count == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(count);
    }
};

struct BinOptions {
    std::size_t bin_width = 10000;
    std::size_t num_bins = 10;
};

struct EvalReport {
    Cell voc;
    Cell all;
    std::size_t untranslatable = 0;
    std::vector<Cell> bins;
    std::vector<Cell> tags;  // empty when the dictionary carries no tags
    std::vector<ScoredEntry> entries;
};

/// Runs the system on every entry. A prediction is correct iff it is in the
/// gold set; untranslatable entries count as wrong.
std::vector<ScoredEntry> score_entries(const TranslationSystem& system, const EvalDictionary& dict,
                                       const EmbeddingSpace& source_space);

/// Precision@1 over VOC and ALL plus the frequency and tag breakdowns.
/// Throws DataError on an empty dictionary.
EvalReport precision_at_1(const TranslationSystem& system, const EvalDictionary& dict,
                          const EmbeddingSpace& source_space, BinOptions bins = {},
                          std::size_t min_tag_count = 5);

/// Bin i holds ranks in [i*width, (i+1)*width) for i < num_bins, then one
/// overflow bin and one OOV bin (forms without a file-loaded vector).
std::vector<Cell> frequency_bins(std::span<const ScoredEntry> scored, BinOptions options = {});

/// Per canonical source tag; groups smaller than `min_count` are flagged.
/// Throws DataError when no entry has a tag.
std::vector<Cell> tag_breakdown(std::span<const ScoredEntry> scored, std::size_t min_count = 5);

/// Words spelled identically in both vocabularies (file-loaded rows only),
/// ordered by source rank. Throws DataError on an empty intersection.
std::vector<std::pair<std::string, std::string>> extract_identical_seed(
    const EmbeddingSpace& source_space, const EmbeddingSpace& target_space);

/// Writes <prefix>.summary.tsv, <prefix>.bins.tsv, <prefix>.tags.tsv (when
/// tagged), <prefix>.predictions.tsv and <prefix>.json.
void write_report(const EvalReport& report, const std::string& prefix);

std::string summary_tsv(const EvalReport& report);

}  // namespace morphlex
