#include "morphlex/baseline.hpp"

#include <Eigen/SVD>

#include "morphlex/error.hpp"

namespace morphlex {

Matrix procrustes(const Matrix& source_cols, const Matrix& target_cols) {
    if (source_cols.rows() != target_cols.rows() || source_cols.cols() != target_cols.cols()) {
        throw DimensionError("procrustes: A and B must have the same shape");
    }
    const Matrix cross = target_cols * source_cols.transpose();  // D x D
    Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

ProcrustesResult procrustes_fit(std::span<const std::pair<std::string, std::string>> seed_dict,
                                const EmbeddingSpace& source_space,
                                const EmbeddingSpace& target_space) {
    if (source_space.dim() != target_space.dim()) {
        throw DimensionError("procrustes: source and target dimensions differ");
    }
    ProcrustesResult result;
    std::vector<std::pair<std::size_t, std::size_t>> rows;
    for (const auto& [src, tgt] : seed_dict) {
        const auto s = source_space.find(src);
        const auto t = target_space.find(tgt);
        if (s && t) {
            rows.emplace_back(*s, *t);
        } else {
            ++result.pairs_dropped;
        }
    }
    if (rows.empty()) throw DataError("procrustes: no seed pair resolvable in both spaces");
    result.pairs_used = rows.size();
    if (rows.size() < source_space.dim()) {
        result.warnings.push_back("only " + std::to_string(rows.size()) + " seed pairs for dimension " +
                                  std::to_string(source_space.dim()) + "; the map is underdetermined");
    }

    const auto d = static_cast<Eigen::Index>(source_space.dim());
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix a(d, n);
    Matrix b(d, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        a.col(j) = source_space.row(rows[static_cast<std::size_t>(j)].first);
        b.col(j) = target_space.row(rows[static_cast<std::size_t>(j)].second);
    }
    result.model.omega = procrustes(a, b);
    result.model.normalizer_vocab_size = target_space.size();
    return result;
}

std::vector<Neighbor> baseline_predict(const TranslationModel& model, std::string_view source_word,
                                       const EmbeddingSpace& source_space,
                                       const EmbeddingSpace& target_space, std::size_t k) {
    return predict(model, source_word, source_space, target_space, k);
}

}  // namespace morphlex
