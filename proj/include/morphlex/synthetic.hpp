#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "morphlex/embeddings.hpp"
#include "morphlex/eval.hpp"
#include "morphlex/morph.hpp"

// Desk-scale stand-in for a real language pair: two suffix-grammar languages
// over one lexeme inventory, Zipfian form frequencies, and embedding spaces
// related by a random orthogonal map. Rare forms get noisier vectors, the way
// rarely seen words get poorly estimated embeddings.
namespace morphlex::synthetic {

struct Config {
    std::size_t lexemes = 600;
    std::size_t dim = 40;
    double zipf_exponent = 1.0;
    double tag_weight = 0.5;       // norm share of the slot component
    double noise_min = 0.05;       // vector noise of the most frequent form
    double noise_max = 1.2;        // vector noise of the rarest form
    double noise_power = 1.0;      // noise grows as (rank / vocab)^power
    double irregular_fraction = 0.0;  // share of frequent lexemes with a suppletive form
    std::uint64_t seed = 7;
};

struct Language {
    std::vector<UniMorphEntry> entries;  // full paradigms, lexeme-major
    EmbeddingSpace space;                // raw vectors, frequency-ranked
};

struct Lexicon {
    std::vector<MorphTag> slots;  // slot 0 is the citation form
    std::size_t lexemes = 0;
    Language source;
    Language target;
    /// Indexed by lexeme * slots.size() + slot.
    std::vector<std::string> source_forms;
    std::vector<std::string> target_forms;
    std::vector<bool> irregular;  // source form is suppletive
    Matrix rotation;              // the rotation between the spaces

    std::size_t cell(std::size_t lexeme, std::size_t slot) const { return lexeme * slots.size() + slot; }
    const std::string& source_lemma(std::size_t lexeme) const { return source_forms[cell(lexeme, 0)]; }
    const std::string& target_lemma(std::size_t lexeme) const { return target_forms[cell(lexeme, 0)]; }
};

/// The eight paradigm slots shared by both languages.
std::vector<MorphTag> paradigm_slots();

Lexicon generate(const Config& config);

struct SplitConfig {
    double test_lexeme_fraction = 0.2;
    std::size_t top_forms = 300;  // seed pairs also cover forms ranked below this
    std::uint64_t seed = 11;
};

struct Benchmark {
    std::vector<std::size_t> train_lexemes;
    std::vector<std::size_t> test_lexemes;
    /// Lemma pairs plus top-frequency form pairs of the training lexemes.
    std::vector<std::pair<std::string, std::string>> seed;
    /// Non-citation forms of held-out lexemes, with gold tag and lemma.
    EvalDictionary test;
    /// Paradigm entries with the test forms removed.
    std::vector<UniMorphEntry> source_morph;
    std::vector<UniMorphEntry> target_morph;
};

Benchmark split(const Lexicon& lexicon, const SplitConfig& config);

/// Uniformly random orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Matrix random_orthogonal(std::size_t dim, std::uint64_t seed);

/// Random orthogonal matrix with determinant +1. An identity-initialized,
/// orthogonally regularized Ω cannot reach a reflection, so generated spaces
/// use proper rotations.
Matrix random_rotation(std::size_t dim, std::uint64_t seed);

}  // namespace morphlex::synthetic
