#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "morphlex/embeddings.hpp"

namespace morphlex {

/// Log-bilinear lexeme translator: p(t | s) ∝ exp(e(t)ᵀ Ω e(s)), normalized
/// over the first `normalizer_vocab_size` rows of the target space.
struct TranslationModel {
    Matrix omega;  // target_dim x source_dim
    std::size_t normalizer_vocab_size = 0;

    std::size_t source_dim() const { return static_cast<std::size_t>(omega.cols()); }
    std::size_t target_dim() const { return static_cast<std::size_t>(omega.rows()); }

    /// Maps a source vector into the target space.
    Vector map(const Eigen::Ref<const Vector>& source_vec) const;
};

struct TrainConfig {
    double alpha = 10.0;  // orthogonal regularization weight
    double learning_rate = 0.05;
    double min_learning_rate = 1e-8;
    std::size_t batch_size = 24;
    std::size_t max_epochs = 30;
    double dev_fraction = 0.1;
    std::uint64_t seed = 1;

    /// Throws Error when a field is outside its allowed range.
    void validate() const;
};

/// Adam moment accumulators shaped like Ω.
class AdamState {
public:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEpsilon = 1e-8;

    AdamState(Eigen::Index rows, Eigen::Index cols)
        : first_(Matrix::Zero(rows, cols)), second_(Matrix::Zero(rows, cols)) {}

    /// One bias-corrected Adam step on `params`.
    void update(Matrix& params, const Matrix& grad, double learning_rate);

    long step() const { return step_; }
    const Matrix& first_moment() const { return first_; }
    const Matrix& second_moment() const { return second_; }

private:
    Matrix first_;
    Matrix second_;
    long step_ = 0;
};

/// e(t)ᵀ Ω e(s), the exponent of the unnormalized translation score.
double bilinear_score(const TranslationModel& model, const Eigen::Ref<const Vector>& target_vec,
                      const Eigen::Ref<const Vector>& source_vec);

/// Bilinear scores of the source vector against every row in the
/// normalizer support.
Vector support_scores(const TranslationModel& model, const EmbeddingSpace& target_space,
                      const Eigen::Ref<const Vector>& source_vec);

/// Numerically stable log Σ exp.
double log_sum_exp(const Eigen::Ref<const Vector>& scores);

/// log p(target_word | source_vec). Throws if the word is unknown or falls
/// outside the normalizer support.
double log_prob(const TranslationModel& model, const EmbeddingSpace& target_space,
                std::string_view target_word, const Eigen::Ref<const Vector>& source_vec);

/// α‖ΩᵀΩ − I‖_F.
double orth_penalty(const TranslationModel& model, double alpha);

/// A training pair as row indices into the source and target spaces.
struct IndexPair {
    std::size_t source = 0;
    std::size_t target = 0;
};

struct LossGradient {
    double loss = 0.0;
    Matrix gradient;
};

/// Mean negative log-likelihood over the batch plus (α / |batch|)‖ΩᵀΩ − I‖_F,
/// and its exact gradient with respect to Ω.
LossGradient loss_and_gradient(const TranslationModel& model, std::span<const IndexPair> batch,
                               const EmbeddingSpace& source_space,
                               const EmbeddingSpace& target_space, double alpha);

/// Word-level convenience overload; throws UnresolvableError for unknown words.
LossGradient loss_and_gradient(const TranslationModel& model,
                               std::span<const std::pair<std::string, std::string>> batch,
                               const EmbeddingSpace& source_space,
                               const EmbeddingSpace& target_space, double alpha);

/// Identity when the dimensions agree, otherwise uniform(-0.01, 0.01).
TranslationModel initial_model(std::size_t source_dim, std::size_t target_dim,
                               std::size_t normalizer_vocab_size, std::uint64_t seed);

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double dev_loss = 0.0;
    double learning_rate = 0.0;
};

struct TrainResult {
    TranslationModel model;  // snapshot with the lowest development loss
    std::size_t pairs_used = 0;
    std::size_t pairs_dropped = 0;
    std::size_t train_pairs = 0;
    std::size_t dev_pairs = 0;
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;
    double best_dev_loss = 0.0;
    std::vector<EpochRecord> history;
};

/// Trains Ω with Adam on mini-batches. Pairs whose words are missing from
/// either space (or fall outside the normalizer support) are dropped and
/// counted. After each epoch the development loss is computed; the learning
/// rate is halved whenever it increased, and training stops once the rate
/// drops below `min_learning_rate` or `max_epochs` is reached.
/// `normalizer_vocab_size` = 0 means the whole target space.
TrainResult train(std::span<const std::pair<std::string, std::string>> seed_dict,
                  const EmbeddingSpace& source_space, const EmbeddingSpace& target_space,
                  const TrainConfig& config, std::size_t normalizer_vocab_size = 0);

/// Top-k target words for a source vector, by cosine of Ω·e(s) with e(t).
std::vector<Neighbor> predict(const TranslationModel& model, const Eigen::Ref<const Vector>& source_vec,
                              const EmbeddingSpace& target_space, std::size_t k);

std::vector<Neighbor> predict(const TranslationModel& model, std::string_view source_word,
                              const EmbeddingSpace& source_space,
                              const EmbeddingSpace& target_space, std::size_t k);

void save_model(const TranslationModel& model, const std::filesystem::path& path);
TranslationModel load_model(const std::filesystem::path& path);

/// Preprocessing statistics stored next to a model so that vectors composed
/// at prediction time can be shifted like the training data.
struct ModelMetadata {
    Vector source_mean;
    Vector target_mean;
    std::size_t source_vocab = 0;
    std::size_t target_vocab = 0;
};

std::filesystem::path metadata_path(const std::filesystem::path& model_path);
void save_metadata(const ModelMetadata& meta, const std::filesystem::path& path);
ModelMetadata load_metadata(const std::filesystem::path& path);

/// Reads "source<TAB>target" lines, dropping exact duplicate pairs.
std::vector<std::pair<std::string, std::string>> load_seed_dictionary(
    const std::filesystem::path& path);
void save_seed_dictionary(std::span<const std::pair<std::string, std::string>> pairs,
                          const std::filesystem::path& path);

}  // namespace morphlex
