#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "morphlex/embeddings.hpp"
#include "morphlex/translator.hpp"

namespace morphlex {

struct ProcrustesResult {
    TranslationModel model;
    std::size_t pairs_used = 0;
    std::size_t pairs_dropped = 0;
    Warnings warnings;
};

/// Closed-form orthogonal map: with source vectors as the columns of A and
/// target vectors as the columns of B, Ω = U Vᵀ where B Aᵀ = U S Vᵀ. This
/// minimizes ‖ΩA − B‖_F over orthogonal Ω.
Matrix procrustes(const Matrix& source_cols, const Matrix& target_cols);

/// Fits Ω on the resolvable seed pairs. Throws DataError when none resolve
/// and DimensionError when the spaces differ in dimension. Fewer pairs than
/// dimensions only produce a warning.
ProcrustesResult procrustes_fit(std::span<const std::pair<std::string, std::string>> seed_dict,
                                const EmbeddingSpace& source_space,
                                const EmbeddingSpace& target_space);

/// Same retrieval as the translator: cosine of Ω·e(s) against target rows.
std::vector<Neighbor> baseline_predict(const TranslationModel& model, std::string_view source_word,
                                       const EmbeddingSpace& source_space,
                                       const EmbeddingSpace& target_space, std::size_t k);

}  // namespace morphlex
