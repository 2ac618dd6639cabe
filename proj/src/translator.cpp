#include "morphlex/translator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "json.hpp"

#include "morphlex/error.hpp"
#include "morphlex/io.hpp"

namespace morphlex {

namespace {

constexpr double kPenaltyFloor = 1e-12;
constexpr std::size_t kDevChunk = 256;

std::size_t support_size(const TranslationModel& model, const EmbeddingSpace& target_space) {
    const std::size_t z = model.normalizer_vocab_size;
    if (z == 0 || z > target_space.size()) {
        throw DimensionError("normalizer support of " + std::to_string(z) +
                             " rows does not fit a target space of " +
                             std::to_string(target_space.size()) + " words");
    }
    return z;
}

void check_dims(const TranslationModel& model, const EmbeddingSpace& source_space,
                const EmbeddingSpace& target_space) {
    if (source_space.dim() != model.source_dim() || target_space.dim() != model.target_dim()) {
        throw DimensionError("model is " + std::to_string(model.target_dim()) + "x" +
                             std::to_string(model.source_dim()) + " but spaces have dims " +
                             std::to_string(target_space.dim()) + " (target) and " +
                             std::to_string(source_space.dim()) + " (source)");
    }
}

// Mean NLL of the pairs (no penalty), evaluated in chunks to bound memory.
double mean_nll(const TranslationModel& model, std::span<const IndexPair> pairs,
                const EmbeddingSpace& source_space, const EmbeddingSpace& target_space) {
    double total = 0.0;
    for (std::size_t start = 0; start < pairs.size(); start += kDevChunk) {
        const auto chunk = pairs.subspan(start, std::min(kDevChunk, pairs.size() - start));
        const double loss = loss_and_gradient(model, chunk, source_space, target_space, 0.0).loss;
        total += loss * static_cast<double>(chunk.size());
    }
    return total / static_cast<double>(pairs.size());
}

}  // namespace

Vector TranslationModel::map(const Eigen::Ref<const Vector>& source_vec) const {
    if (static_cast<std::size_t>(source_vec.size()) != source_dim()) {
        throw DimensionError("source vector has dimension " + std::to_string(source_vec.size()) +
                             ", model expects " + std::to_string(source_dim()));
    }
    return omega * source_vec;
}

void TrainConfig::validate() const {
    if (!(alpha >= 0.0)) throw Error("alpha must be non-negative");
    if (!(learning_rate > 0.0)) throw Error("learning rate must be positive");
    if (!(min_learning_rate > 0.0)) throw Error("minimum learning rate must be positive");
    if (batch_size == 0) throw Error("batch size must be positive");
    if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) throw Error("dev fraction must be in (0, 1)");
}

void AdamState::update(Matrix& params, const Matrix& grad, double learning_rate) {
    if (params.rows() != first_.rows() || params.cols() != first_.cols() ||
        grad.rows() != first_.rows() || grad.cols() != first_.cols()) {
        throw DimensionError("Adam: parameter shape mismatch");
    }
    ++step_;
    first_ = kBeta1 * first_ + (1.0 - kBeta1) * grad;
    second_ = kBeta2 * second_ + (1.0 - kBeta2) * grad.cwiseProduct(grad);
    const double correction1 = 1.0 - std::pow(kBeta1, static_cast<double>(step_));
    const double correction2 = 1.0 - std::pow(kBeta2, static_cast<double>(step_));
    params.array() -= learning_rate * (first_.array() / correction1) /
                      ((second_.array() / correction2).sqrt() + kEpsilon);
}

double bilinear_score(const TranslationModel& model, const Eigen::Ref<const Vector>& target_vec,
                      const Eigen::Ref<const Vector>& source_vec) {
    if (static_cast<std::size_t>(target_vec.size()) != model.target_dim()) {
        throw DimensionError("target vector has dimension " + std::to_string(target_vec.size()) +
                             ", model expects " + std::to_string(model.target_dim()));
    }
    return target_vec.dot(model.map(source_vec));
}

Vector support_scores(const TranslationModel& model, const EmbeddingSpace& target_space,
                      const Eigen::Ref<const Vector>& source_vec) {
    if (target_space.dim() != model.target_dim()) {
        throw DimensionError("target space dimension does not match the model");
    }
    const std::size_t z = support_size(model, target_space);
    return target_space.vectors().topRows(static_cast<Eigen::Index>(z)) * model.map(source_vec);
}

double log_sum_exp(const Eigen::Ref<const Vector>& scores) {
    if (scores.size() == 0) return -std::numeric_limits<double>::infinity();
    const double top = scores.maxCoeff();
    return top + std::log((scores.array() - top).exp().sum());
}

double log_prob(const TranslationModel& model, const EmbeddingSpace& target_space,
                std::string_view target_word, const Eigen::Ref<const Vector>& source_vec) {
    const auto idx = target_space.find(target_word);
    if (!idx) throw UnresolvableError("target word '" + std::string(target_word) + "' not in space");
    if (*idx >= support_size(model, target_space)) {
        throw UnresolvableError("target word '" + std::string(target_word) +
                                "' is outside the normalizer support");
    }
    const Vector scores = support_scores(model, target_space, source_vec);
    return scores[static_cast<Eigen::Index>(*idx)] - log_sum_exp(scores);
}

double orth_penalty(const TranslationModel& model, double alpha) {
    const Eigen::Index n = model.omega.cols();
    return alpha * (model.omega.transpose() * model.omega - Matrix::Identity(n, n)).norm();
}

LossGradient loss_and_gradient(const TranslationModel& model, std::span<const IndexPair> batch,
                               const EmbeddingSpace& source_space,
                               const EmbeddingSpace& target_space, double alpha) {
    if (batch.empty()) throw DataError("loss_and_gradient: empty batch");
    check_dims(model, source_space, target_space);
    const std::size_t z = support_size(model, target_space);
    const auto b = static_cast<Eigen::Index>(batch.size());

    Matrix sources(static_cast<Eigen::Index>(model.source_dim()), b);
    Matrix targets(static_cast<Eigen::Index>(model.target_dim()), b);
    for (Eigen::Index j = 0; j < b; ++j) {
        const IndexPair& p = batch[static_cast<std::size_t>(j)];
        if (p.source >= source_space.size() || p.target >= z) {
            throw UnresolvableError("training pair outside the source space or normalizer support");
        }
        sources.col(j) = source_space.row(p.source);
        targets.col(j) = target_space.row(p.target);
    }

    const auto support = target_space.vectors().topRows(static_cast<Eigen::Index>(z));
    Matrix scores = support * (model.omega * sources);  // z x b

    double nll = 0.0;
    for (Eigen::Index j = 0; j < b; ++j) {
        auto col = scores.col(j);
        const double lse = log_sum_exp(col);
        nll += lse - col[static_cast<Eigen::Index>(batch[static_cast<std::size_t>(j)].target)];
        col = (col.array() - lse).exp().matrix();  // softmax, in place
    }
    const double inv_b = 1.0 / static_cast<double>(b);

    // d/dΩ of -log p(t|s) is (E_p[e(t')] - e(t)) e(s)ᵀ.
    const Matrix expected = support.transpose() * scores;  // target_dim x b
    LossGradient out;
    out.gradient = (expected - targets) * sources.transpose() * inv_b;
    out.loss = nll * inv_b;

    if (alpha > 0.0) {
        const Eigen::Index n = model.omega.cols();
        const Matrix deviation = model.omega.transpose() * model.omega - Matrix::Identity(n, n);
        const double norm = deviation.norm();
        const double weight = alpha * inv_b;
        out.loss += weight * norm;
        if (norm > kPenaltyFloor) {
            out.gradient += (weight * 2.0 / norm) * (model.omega * deviation);
        }
    }
    return out;
}

LossGradient loss_and_gradient(const TranslationModel& model,
                               std::span<const std::pair<std::string, std::string>> batch,
                               const EmbeddingSpace& source_space,
                               const EmbeddingSpace& target_space, double alpha) {
    std::vector<IndexPair> pairs;
    pairs.reserve(batch.size());
    for (const auto& [src, tgt] : batch) {
        const auto s = source_space.find(src);
        const auto t = target_space.find(tgt);
        if (!s) throw UnresolvableError("source word '" + src + "' not in space");
        if (!t) throw UnresolvableError("target word '" + tgt + "' not in space");
        pairs.push_back({*s, *t});
    }
    return loss_and_gradient(model, pairs, source_space, target_space, alpha);
}

TranslationModel initial_model(std::size_t source_dim, std::size_t target_dim,
                               std::size_t normalizer_vocab_size, std::uint64_t seed) {
    TranslationModel model;
    model.normalizer_vocab_size = normalizer_vocab_size;
    const auto rows = static_cast<Eigen::Index>(target_dim);
    const auto cols = static_cast<Eigen::Index>(source_dim);
    if (source_dim == target_dim) {
        model.omega = Matrix::Identity(rows, cols);
        return model;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-0.01, 0.01);
    model.omega.resize(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) model.omega(i, j) = uniform(rng);
    }
    return model;
}

TrainResult train(std::span<const std::pair<std::string, std::string>> seed_dict,
                  const EmbeddingSpace& source_space, const EmbeddingSpace& target_space,
                  const TrainConfig& config, std::size_t normalizer_vocab_size) {
    config.validate();
    if (seed_dict.empty()) throw DataError("train: empty seed dictionary");
    const std::size_t z = normalizer_vocab_size == 0 ? target_space.size() : normalizer_vocab_size;
    if (z > target_space.size()) throw DimensionError("normalizer support exceeds the target space");

    TrainResult result;
    std::vector<IndexPair> pairs;
    for (const auto& [src, tgt] : seed_dict) {
        const auto s = source_space.find(src);
        const auto t = target_space.find(tgt);
        if (s && t && *t < z) {
            pairs.push_back({*s, *t});
        } else {
            ++result.pairs_dropped;
        }
    }
    if (pairs.empty()) throw DataError("train: no seed pair resolvable in both spaces");
    result.pairs_used = pairs.size();

    std::mt19937_64 rng(config.seed);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    std::vector<IndexPair> train_set;
    std::vector<IndexPair> dev_set;
    if (pairs.size() < 2) {
        // Too small to split; the schedule watches the training pair itself.
        train_set = pairs;
        dev_set = pairs;
    } else {
        auto n_dev = static_cast<std::size_t>(
            std::llround(config.dev_fraction * static_cast<double>(pairs.size())));
        n_dev = std::clamp<std::size_t>(n_dev, 1, pairs.size() - 1);
        dev_set.assign(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(n_dev));
        train_set.assign(pairs.begin() + static_cast<std::ptrdiff_t>(n_dev), pairs.end());
    }
    result.train_pairs = train_set.size();
    result.dev_pairs = dev_set.size();

    TranslationModel model = initial_model(source_space.dim(), target_space.dim(), z, config.seed);
    check_dims(model, source_space, target_space);

    const double penalty_weight = config.alpha / static_cast<double>(config.batch_size);
    const auto dev_loss = [&](const TranslationModel& m) {
        return mean_nll(m, dev_set, source_space, target_space) + penalty_weight * orth_penalty(m, 1.0);
    };

    double previous = dev_loss(model);
    result.model = model;
    result.best_dev_loss = previous;
    result.best_epoch = 0;

    AdamState adam(model.omega.rows(), model.omega.cols());
    double lr = config.learning_rate;
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::shuffle(train_set.begin(), train_set.end(), rng);
        double train_total = 0.0;
        for (std::size_t start = 0; start < train_set.size(); start += config.batch_size) {
            const std::span<const IndexPair> batch(
                train_set.data() + start, std::min(config.batch_size, train_set.size() - start));
            LossGradient lg = loss_and_gradient(model, batch, source_space, target_space, config.alpha);
            train_total += lg.loss * static_cast<double>(batch.size());
            adam.update(model.omega, lg.gradient, lr);
        }
        const double dev = dev_loss(model);
        const EpochRecord record{epoch, train_total / static_cast<double>(train_set.size()), dev, lr};
        result.history.push_back(record);
        result.epochs_run = epoch;
        if (dev < result.best_dev_loss) {
            result.best_dev_loss = dev;
            result.best_epoch = epoch;
            result.model = model;
        }
        if (dev > previous) lr *= 0.5;
        previous = dev;
        if (lr < config.min_learning_rate) break;
    }
    return result;
}

std::vector<Neighbor> predict(const TranslationModel& model, const Eigen::Ref<const Vector>& source_vec,
                              const EmbeddingSpace& target_space, std::size_t k) {
    return nearest(target_space, model.map(source_vec), k);
}

std::vector<Neighbor> predict(const TranslationModel& model, std::string_view source_word,
                              const EmbeddingSpace& source_space,
                              const EmbeddingSpace& target_space, std::size_t k) {
    const auto idx = source_space.find(source_word);
    if (!idx) throw UnresolvableError("source word '" + std::string(source_word) + "' not in space");
    return predict(model, source_space.row(*idx), target_space, k);
}

void save_model(const TranslationModel& model, const std::filesystem::path& path) {
    auto out = io::open_output(path);
    out << "MORPHLEX-OMEGA v1 " << model.target_dim() << ' ' << model.source_dim() << ' '
        << model.normalizer_vocab_size << '\n';
    for (Eigen::Index i = 0; i < model.omega.rows(); ++i) {
        for (Eigen::Index j = 0; j < model.omega.cols(); ++j) {
            if (j > 0) out << ' ';
            out << io::format_double(model.omega(i, j));
        }
        out << '\n';
    }
    if (!out) throw FormatError("failed writing " + path.string());
}

TranslationModel load_model(const std::filesystem::path& path) {
    auto in = io::open_input(path);
    const std::string name = path.string();
    std::string line;
    if (!std::getline(in, line)) throw FormatError(name + ": empty model file");
    io::chomp(line);
    const auto header = io::split_ws(line);
    if (header.size() != 5 || header[0] != "MORPHLEX-OMEGA" || header[1] != "v1") {
        throw FormatError(name + ":1: expected 'MORPHLEX-OMEGA v1 <N_t> <N_s> <Z>'");
    }
    const long rows = io::parse_long(header[2], name + ":1");
    const long cols = io::parse_long(header[3], name + ":1");
    const long z = io::parse_long(header[4], name + ":1");
    if (rows <= 0 || cols <= 0 || z < 0) throw FormatError(name + ":1: bad dimensions");

    TranslationModel model;
    model.normalizer_vocab_size = static_cast<std::size_t>(z);
    model.omega.resize(rows, cols);
    for (long i = 0; i < rows; ++i) {
        const std::string where = name + ":" + std::to_string(i + 2);
        if (!std::getline(in, line)) throw FormatError(where + ": missing matrix row");
        io::chomp(line);
        const auto fields = io::split_ws(line);
        if (fields.size() != static_cast<std::size_t>(cols)) {
            throw FormatError(where + ": " + std::to_string(fields.size()) + " values, expected " +
                              std::to_string(cols));
        }
        for (long j = 0; j < cols; ++j) {
            const double v = io::parse_double(fields[static_cast<std::size_t>(j)], where);
            if (!std::isfinite(v)) throw FormatError(where + ": non-finite value");
            model.omega(i, j) = v;
        }
    }
    return model;
}

std::filesystem::path metadata_path(const std::filesystem::path& model_path) {
    return std::filesystem::path(model_path.string() + ".meta.json");
}

void save_metadata(const ModelMetadata& meta, const std::filesystem::path& path) {
    nlohmann::json j;
    j["format"] = "MORPHLEX-OMEGA-META v1";
    j["source_mean"] = std::vector<double>(meta.source_mean.data(),
                                           meta.source_mean.data() + meta.source_mean.size());
    j["target_mean"] = std::vector<double>(meta.target_mean.data(),
                                           meta.target_mean.data() + meta.target_mean.size());
    j["source_vocab"] = meta.source_vocab;
    j["target_vocab"] = meta.target_vocab;
    auto out = io::open_output(path);
    out << j.dump(2) << '\n';
}

ModelMetadata load_metadata(const std::filesystem::path& path) {
    try {
        auto in = io::open_input(path);
        const auto j = nlohmann::json::parse(in);
        ModelMetadata meta;
        const auto src = j.at("source_mean").get<std::vector<double>>();
        const auto tgt = j.at("target_mean").get<std::vector<double>>();
        meta.source_mean = Eigen::Map<const Vector>(src.data(), static_cast<Eigen::Index>(src.size()));
        meta.target_mean = Eigen::Map<const Vector>(tgt.data(), static_cast<Eigen::Index>(tgt.size()));
        meta.source_vocab = j.value("source_vocab", std::size_t{0});
        meta.target_vocab = j.value("target_vocab", std::size_t{0});
        return meta;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::vector<std::pair<std::string, std::string>> load_seed_dictionary(
    const std::filesystem::path& path) {
    auto in = io::open_input(path);
    std::vector<std::pair<std::string, std::string>> out;
    std::set<std::pair<std::string, std::string>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        io::chomp(line);
        if (io::trim(line).empty()) continue;
        const auto fields = io::split(line, '\t');
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) +
                              ": expected 'source<TAB>target'");
        }
        std::pair<std::string, std::string> pair{std::string(fields[0]), std::string(fields[1])};
        if (seen.insert(pair).second) out.push_back(std::move(pair));
    }
    return out;
}

void save_seed_dictionary(std::span<const std::pair<std::string, std::string>> pairs,
                          const std::filesystem::path& path) {
    auto out = io::open_output(path);
    for (const auto& [s, t] : pairs) out << s << '\t' << t << '\n';
}

}  // namespace morphlex
