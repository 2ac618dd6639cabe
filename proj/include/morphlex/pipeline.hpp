#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "morphlex/embeddings.hpp"
#include "morphlex/morph.hpp"
#include "morphlex/translator.hpp"

namespace morphlex {

enum class Mode { base, hybrid, oracle, direct };

Mode parse_mode(std::string_view name);
std::string_view to_string(Mode mode);

enum class Route { lemma, direct };

std::string_view to_string(Route route);

/// Log-probabilities of the factors that produced a candidate. Factors that
/// did not take part are left empty.
struct ComponentScores {
    std::optional<double> analyzer;
    std::optional<double> translator;
    std::optional<double> inflector;
};

struct TranslationCandidate {
    std::string form;
    std::optional<MorphTag> tag;  // empty on the direct route
    Route route = Route::direct;
    ComponentScores scores;
    std::string source_lemma;  // lemma-route only
    std::string target_lemma;  // lemma-route only
};

/// Looks up source-side vectors, composing and preprocessing a vector from
/// character n-grams when a word is missing from the space.
class SourceLookup {
public:
    explicit SourceLookup(const EmbeddingSpace& space) : space_(&space) {}
    SourceLookup(const EmbeddingSpace& space, const NgramTable& ngrams, Vector mean,
                 NgramRange range = {});

    /// Empty when the word is unknown and cannot be composed.
    std::optional<Vector> resolve(std::string_view word) const;
    const EmbeddingSpace& space() const { return *space_; }

private:
    const EmbeddingSpace* space_;
    const NgramTable* ngrams_ = nullptr;
    Vector mean_;
    NgramRange range_;
};

/// Non-owning references to the trained components of the joint model.
/// The analyzer and inflector may be null for direct-only use.
struct JointComponents {
    const Analyzer* analyzer = nullptr;
    const TranslationModel* model = nullptr;
    const SourceLookup* source = nullptr;
    const EmbeddingSpace* target = nullptr;
    const Inflector* inflector = nullptr;
};

/// Analyze -> translate the lemma -> copy the tag -> inflect, with greedy
/// 1-best decisions at every step. Stateless; safe to share across threads.
class JointModel {
public:
    explicit JointModel(JointComponents components);

    /// Lemma route; falls back to translate_direct on any failure along the
    /// way. Throws UntranslatableError if the direct route fails too.
    TranslationCandidate translate_base(std::string_view source_form) const;

    /// Lemma route only when the analyzer's lemma is strictly more frequent
    /// than the form itself, otherwise the direct route.
    TranslationCandidate translate_hybrid(std::string_view source_form) const;

    /// Gold lemma and tag replace the analyzer. No fallback.
    TranslationCandidate translate_oracle(std::string_view source_form, std::string_view gold_lemma,
                                          const MorphTag& gold_tag) const;

    /// Translator only, applied to the surface form.
    TranslationCandidate translate_direct(std::string_view source_form) const;

    /// The hybrid routing decision for a form.
    bool prefers_lemma_route(std::string_view source_form) const;

    /// Sum of the candidate's recorded factor log-probabilities.
    static double joint_log_prob(const TranslationCandidate& candidate);

private:
    TranslationCandidate lemma_route(std::string_view lemma, const MorphTag& tag,
                                     std::optional<double> analyzer_score) const;

    JointComponents c_;
};

}  // namespace morphlex
