#include "morphlex/pipeline.hpp"

#include "morphlex/error.hpp"

namespace morphlex {

Mode parse_mode(std::string_view name) {
    if (name == "base") return Mode::base;
    if (name == "hybrid") return Mode::hybrid;
    if (name == "oracle") return Mode::oracle;
    if (name == "direct") return Mode::direct;
    throw Error("unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(Mode mode) {
    switch (mode) {
        case Mode::base: return "base";
        case Mode::hybrid: return "hybrid";
        case Mode::oracle: return "oracle";
        case Mode::direct: return "direct";
    }
    return "?";
}

std::string_view to_string(Route route) { return route == Route::lemma ? "lemma" : "direct"; }

SourceLookup::SourceLookup(const EmbeddingSpace& space, const NgramTable& ngrams, Vector mean,
                           NgramRange range)
    : space_(&space), ngrams_(&ngrams), mean_(std::move(mean)), range_(range) {
    if (ngrams.dim() != space.dim() || static_cast<std::size_t>(mean_.size()) != space.dim()) {
        throw DimensionError("n-gram table or mean does not match the source space");
    }
}

std::optional<Vector> SourceLookup::resolve(std::string_view word) const {
    if (auto idx = space_->find(word)) return Vector(space_->row(*idx));
    if (!ngrams_) return std::nullopt;
    try {
        return preprocess_vector(compose_oov(word, *ngrams_, range_), mean_);
    } catch (const CompositionError&) {
        return std::nullopt;
    }
}

namespace {

// Translator log-probability of a retrieved word. Retrieval ranges over the
// whole target space; a word beyond the normalizer support joins the sum.
double translator_score(const TranslationModel& model, const EmbeddingSpace& target,
                        std::size_t word_index, const Vector& source_vec) {
    const Vector scores = support_scores(model, target, source_vec);
    if (word_index < static_cast<std::size_t>(scores.size())) {
        return scores[static_cast<Eigen::Index>(word_index)] - log_sum_exp(scores);
    }
    const double own = bilinear_score(model, target.row(word_index), source_vec);
    Vector extended(scores.size() + 1);
    extended << scores, own;
    return own - log_sum_exp(extended);
}

}  // namespace

JointModel::JointModel(JointComponents components) : c_(components) {
    if (!c_.model || !c_.source || !c_.target) {
        throw Error("joint model needs a translation model and both spaces");
    }
    if (c_.model->source_dim() != c_.source->space().dim() ||
        c_.model->target_dim() != c_.target->dim()) {
        throw DimensionError("translation model does not match the embedding spaces");
    }
}

TranslationCandidate JointModel::translate_direct(std::string_view source_form) const {
    const auto vec = c_.source->resolve(source_form);
    if (!vec) throw UntranslatableError("no vector for '" + std::string(source_form) + "'");
    const Vector query = c_.model->map(*vec);
    if (query.norm() == 0.0) throw UntranslatableError("zero query for '" + std::string(source_form) + "'");
    const Neighbor best = nearest(*c_.target, query, 1).front();
    TranslationCandidate out;
    out.form = best.word;
    out.route = Route::direct;
    out.scores.translator = translator_score(*c_.model, *c_.target, best.index, *vec);
    return out;
}

TranslationCandidate JointModel::lemma_route(std::string_view lemma, const MorphTag& tag,
                                             std::optional<double> analyzer_score) const {
    if (!c_.inflector) throw Error("lemma route needs an inflector");
    const auto vec = c_.source->resolve(lemma);
    if (!vec) throw UnresolvableError("no vector for lemma '" + std::string(lemma) + "'");
    const Vector query = c_.model->map(*vec);
    if (query.norm() == 0.0) throw UnresolvableError("zero query for lemma '" + std::string(lemma) + "'");
    const Neighbor target_lemma = nearest(*c_.target, query, 1).front();
    // Indicator tag translator: the target tag is the source tag.
    const Inflection inflection = c_.inflector->inflect(target_lemma.word, tag);

    TranslationCandidate out;
    out.form = inflection.form;
    out.tag = tag;
    out.route = Route::lemma;
    out.source_lemma = std::string(lemma);
    out.target_lemma = target_lemma.word;
    out.scores.analyzer = analyzer_score;
    out.scores.translator = translator_score(*c_.model, *c_.target, target_lemma.index, *vec);
    out.scores.inflector = inflection.log_prob;
    return out;
}

TranslationCandidate JointModel::translate_base(std::string_view source_form) const {
    if (c_.analyzer && c_.inflector) {
        try {
            const Analysis analysis = c_.analyzer->analyze(source_form);
            return lemma_route(analysis.lemma, analysis.tag, analysis.log_prob);
        } catch (const Error&) {
            // Fall through to the direct route.
        }
    }
    try {
        return translate_direct(source_form);
    } catch (const Error& e) {
        throw UntranslatableError("cannot translate '" + std::string(source_form) + "': " + e.what());
    }
}

bool JointModel::prefers_lemma_route(std::string_view source_form) const {
    if (!c_.analyzer) return false;
    std::string lemma;
    try {
        lemma = c_.analyzer->analyze(source_form).lemma;
    } catch (const Error&) {
        return false;
    }
    const EmbeddingSpace& space = c_.source->space();
    const auto lemma_rank = space.rank(lemma);
    if (!lemma_rank) return false;
    const auto form_rank = space.rank(source_form);
    return !form_rank || *lemma_rank < *form_rank;
}

TranslationCandidate JointModel::translate_hybrid(std::string_view source_form) const {
    if (prefers_lemma_route(source_form)) return translate_base(source_form);
    try {
        return translate_direct(source_form);
    } catch (const Error& e) {
        throw UntranslatableError("cannot translate '" + std::string(source_form) + "': " + e.what());
    }
}

TranslationCandidate JointModel::translate_oracle(std::string_view source_form,
                                                  std::string_view gold_lemma,
                                                  const MorphTag& gold_tag) const {
    try {
        return lemma_route(gold_lemma, gold_tag, 0.0);
    } catch (const UnresolvableError& e) {
        throw UntranslatableError("cannot translate '" + std::string(source_form) + "': " + e.what());
    }
}

double JointModel::joint_log_prob(const TranslationCandidate& candidate) {
    double total = 0.0;
    if (candidate.scores.analyzer) total += *candidate.scores.analyzer;
    if (candidate.scores.translator) total += *candidate.scores.translator;
    if (candidate.scores.inflector) total += *candidate.scores.inflector;
    return total;
}

}  // namespace morphlex
