#include <cmath>
#include <random>

#include "doctest.h"
#include "morphlex/error.hpp"
#include "morphlex/synthetic.hpp"
#include "morphlex/translator.hpp"
#include "support.hpp"

using namespace morphlex;
using testing::make_space;

namespace {

TranslationModel model_of(const Matrix& omega, std::size_t z) {
    TranslationModel m;
    m.omega = omega;
    m.normalizer_vocab_size = z;
    return m;
}

// Loss written out with plain loops: mean NLL over the batch plus the scaled
// Frobenius penalty.
double brute_loss(const Matrix& omega, const std::vector<IndexPair>& batch, const EmbeddingSpace& src,
                  const EmbeddingSpace& tgt, std::size_t z, double alpha) {
    double nll = 0.0;
    for (const auto& p : batch) {
        std::vector<double> s(z);
        for (std::size_t t = 0; t < z; ++t) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < omega.rows(); ++i)
                for (Eigen::Index j = 0; j < omega.cols(); ++j)
                    acc += tgt.row(t)[i] * omega(i, j) * src.row(p.source)[j];
            s[t] = acc;
        }
        double sum = 0.0;
        for (double v : s) sum += std::exp(v);
        nll += std::log(sum) - s[p.target];
    }
    double frob = 0.0;
    for (Eigen::Index a = 0; a < omega.cols(); ++a) {
        for (Eigen::Index b = 0; b < omega.cols(); ++b) {
            double g = 0.0;
            for (Eigen::Index k = 0; k < omega.rows(); ++k) g += omega(k, a) * omega(k, b);
            if (a == b) g -= 1.0;
            frob += g * g;
        }
    }
    const double n = static_cast<double>(batch.size());
    return nll / n + alpha / n * std::sqrt(frob);
}

struct RotatedToy {
    EmbeddingSpace source;
    EmbeddingSpace target;
    Matrix q;
};

RotatedToy rotated_toy(std::size_t n, std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    RotatedToy toy;
    toy.q = synthetic::random_rotation(dim, seed + 1);
    toy.source = testing::random_space(n, dim, rng, "s");
    toy.target = testing::rotated_space(toy.source, toy.q, "t");
    return toy;
}

std::vector<std::pair<std::string, std::string>> index_pairs(std::size_t from, std::size_t to) {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = from; i < to; ++i) out.emplace_back("s" + std::to_string(i), "t" + std::to_string(i));
    return out;
}

}  // namespace

TEST_CASE("bilinear_score") {
    const auto m = model_of(Matrix::Identity(2, 2), 1);
    CHECK(bilinear_score(m, Vector::Unit(2, 0), Vector::Unit(2, 0)) == 1.0);
    CHECK(bilinear_score(m, Vector::Unit(2, 1), Vector::Unit(2, 0)) == 0.0);
    CHECK_THROWS_AS(bilinear_score(m, Vector::Unit(3, 0), Vector::Unit(2, 0)), DimensionError);
}

TEST_CASE("bilinear_score matches the explicit double sum") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix omega = testing::gaussian_matrix(3, 3, rng);
        const Vector t = testing::gaussian_matrix(3, 1, rng);
        const Vector s = testing::gaussian_matrix(3, 1, rng);
        double sum = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) sum += t[i] * omega(i, j) * s[j];
        CHECK(bilinear_score(model_of(omega, 1), t, s) == doctest::Approx(sum).epsilon(1e-12));
    }
}

TEST_CASE("log_prob: uniform case and brute-force normalizer") {
    const auto tgt = make_space({"a", "b"}, {{1, 0}, {1, 0}});
    const auto m = model_of(Matrix::Identity(2, 2), 2);
    Vector s(2);
    s << 0.3, -0.7;
    CHECK(log_prob(m, tgt, "a", s) == doctest::Approx(std::log(0.5)));
    CHECK(log_prob(m, tgt, "b", s) == doctest::Approx(std::log(0.5)));

    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        const auto three = testing::random_space(3, 3, rng);
        const Matrix omega = testing::gaussian_matrix(3, 3, rng);
        const Vector src = testing::gaussian_matrix(3, 1, rng);
        double z = 0.0;
        std::vector<double> e(3);
        for (std::size_t t = 0; t < 3; ++t) {
            e[t] = std::exp(three.row(t).dot(omega * src));
            z += e[t];
        }
        for (std::size_t t = 0; t < 3; ++t) {
            CHECK(std::abs(log_prob(model_of(omega, 3), three, three.word(t), src) - std::log(e[t] / z)) < 1e-9);
        }
    }
}

TEST_CASE("log_prob rejects words outside the support") {
    const auto tgt = make_space({"a", "b", "c"}, {{1, 0}, {0, 1}, {1, 1}});
    const auto m = model_of(Matrix::Identity(2, 2), 2);
    CHECK_THROWS(log_prob(m, tgt, "c", Vector::Unit(2, 0)));
    CHECK_THROWS(log_prob(m, tgt, "nope", Vector::Unit(2, 0)));
}

TEST_CASE("softmax is invariant to a constant shift of the scores") {
    std::mt19937_64 rng(3);
    const Vector scores = testing::gaussian_matrix(20, 1, rng, 5.0);
    const Vector shifted = (scores.array() + 123.25).matrix();
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        CHECK(std::abs((scores[i] - log_sum_exp(scores)) - (shifted[i] - log_sum_exp(shifted))) < 1e-9);
    }
    // Large magnitudes stay finite.
    Vector big(2);
    big << 1000.0, 1000.0;
    CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
}

TEST_CASE("log_prob sums to one over the support") {
    std::mt19937_64 rng(4);
    const auto tgt = testing::random_space(50, 6, rng);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = model_of(testing::gaussian_matrix(6, 6, rng), 50);
        const Vector s = testing::gaussian_matrix(6, 1, rng);
        double total = 0.0;
        for (std::size_t t = 0; t < 50; ++t) total += std::exp(log_prob(m, tgt, tgt.word(t), s));
        CHECK(std::abs(total - 1.0) < 1e-6);
    }
}

TEST_CASE("orth_penalty") {
    CHECK(orth_penalty(model_of(Matrix::Identity(3, 3), 1), 7.0) == 0.0);
    CHECK(orth_penalty(model_of(2.0 * Matrix::Identity(2, 2), 1), 1.0) == doctest::Approx(3.0 * std::sqrt(2.0)));
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix w = testing::gaussian_matrix(3, 3, rng);
        double frob = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                double g = 0.0;
                for (int k = 0; k < 3; ++k) g += w(k, a) * w(k, b);
                g -= a == b ? 1.0 : 0.0;
                frob += g * g;
            }
        CHECK(orth_penalty(model_of(w, 1), 2.0) == doctest::Approx(2.0 * std::sqrt(frob)).epsilon(1e-12));
    }
}

TEST_CASE("loss: symmetric two-word lexicon gives log 2") {
    const auto src = make_space({"s"}, {{1, 0}});
    const auto tgt = make_space({"a", "b"}, {{0, 1}, {0, -1}});
    const auto m = model_of(Matrix::Identity(2, 2), 2);
    const std::vector<IndexPair> batch = {{0, 0}};
    const auto lg = loss_and_gradient(m, batch, src, tgt, 0.0);
    CHECK(lg.loss == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(loss_and_gradient(m, std::span<const IndexPair>{}, src, tgt, 0.0), DataError);
}

TEST_CASE("loss matches the brute-force formula") {
    std::mt19937_64 rng(6);
    const auto src = testing::random_space(6, 4, rng);
    const auto tgt = testing::random_space(9, 4, rng);
    const std::vector<IndexPair> batch = {{0, 1}, {2, 2}, {5, 8}};
    for (double alpha : {0.0, 1.0, 10.0}) {
        const Matrix w = testing::gaussian_matrix(4, 4, rng, 0.5);
        const auto lg = loss_and_gradient(model_of(w, 9), batch, src, tgt, alpha);
        CHECK(lg.loss == doctest::Approx(brute_loss(w, batch, src, tgt, 9, alpha)).epsilon(1e-10));
    }
}

TEST_CASE("gradient matches central finite differences") {
    std::mt19937_64 rng(7);
    const double h = 1e-5;
    for (int config = 0; config < 20; ++config) {
        const double alpha = std::vector<double>{0.0, 1.0, 10.0}[static_cast<std::size_t>(config % 3)];
        const auto src = testing::random_space(5, 4, rng);
        const auto tgt = testing::random_space(7, 4, rng);
        const std::vector<IndexPair> batch = {{0, 3}, {1, 0}, {4, 6}};
        const Matrix w = testing::gaussian_matrix(4, 4, rng, 0.7);
        const auto lg = loss_and_gradient(model_of(w, 7), batch, src, tgt, alpha);
        double worst = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                Matrix plus = w, minus = w;
                plus(i, j) += h;
                minus(i, j) -= h;
                const double fd = (brute_loss(plus, batch, src, tgt, 7, alpha) -
                                   brute_loss(minus, batch, src, tgt, 7, alpha)) / (2 * h);
                const double g = lg.gradient(i, j);
                worst = std::max(worst, std::abs(g - fd) / std::max(1.0, std::abs(fd)));
            }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("penalty vanishes at an orthogonal omega") {
    std::mt19937_64 rng(8);
    const auto src = testing::random_space(4, 3, rng);
    const auto tgt = testing::random_space(4, 3, rng);
    const std::vector<IndexPair> batch = {{0, 0}, {1, 2}};
    const auto m = model_of(Matrix::Identity(3, 3), 4);
    const auto with = loss_and_gradient(m, batch, src, tgt, 10.0);
    const auto without = loss_and_gradient(m, batch, src, tgt, 0.0);
    CHECK(with.loss == without.loss);
    CHECK((with.gradient - without.gradient).norm() == 0.0);
}

TEST_CASE("Adam's first step moves each entry by about the learning rate") {
    Matrix p = Matrix::Zero(2, 2);
    Matrix g(2, 2);
    g << 1.0, -2.0, 0.5, -0.25;
    AdamState adam(2, 2);
    adam.update(p, g, 0.1);
    CHECK(adam.step() == 1);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            // m̂ = g, v̂ = g², so the step is lr·g/(|g| + ε).
            const double expect = -0.1 * g(i, j) / (std::abs(g(i, j)) + 1e-8);
            CHECK(p(i, j) == doctest::Approx(expect).epsilon(1e-12));
        }
    CHECK_THROWS_AS(adam.update(p, Matrix::Zero(3, 3), 0.1), DimensionError);
}

TEST_CASE("initial model") {
    CHECK(initial_model(3, 3, 5, 1).omega == Matrix::Identity(3, 3));
    const auto r = initial_model(3, 2, 5, 1);
    CHECK(r.omega.rows() == 2);
    CHECK(r.omega.cols() == 3);
    CHECK(r.omega.cwiseAbs().maxCoeff() <= 0.01);
    CHECK(initial_model(3, 2, 5, 1).omega == initial_model(3, 2, 5, 1).omega);
}

TEST_CASE("config validation") {
    TrainConfig c;
    CHECK_NOTHROW(c.validate());
    c.alpha = -1;
    CHECK_THROWS(c.validate());
    c = {};
    c.dev_fraction = 1.0;
    CHECK_THROWS(c.validate());
    c = {};
    c.batch_size = 0;
    CHECK_THROWS(c.validate());
}

TEST_CASE("train recovers a rotation from 50 seed pairs") {
    const auto toy = rotated_toy(70, 10, 31);
    const auto seed = index_pairs(0, 50);
    TrainConfig cfg;
    cfg.max_epochs = 60;
    const auto result = train(seed, toy.source, toy.target, cfg);
    CHECK(result.pairs_used == 50);
    CHECK(result.dev_pairs == 5);
    std::size_t hits = 0;
    for (std::size_t i = 50; i < 70; ++i) {
        const auto top = predict(result.model, "s" + std::to_string(i), toy.source, toy.target, 1);
        hits += top.front().word == "t" + std::to_string(i) ? 1 : 0;
    }
    CHECK(hits >= 19);
}

TEST_CASE("train with max_epochs = 0 returns the initial model") {
    const auto toy = rotated_toy(30, 5, 3);
    TrainConfig cfg;
    cfg.max_epochs = 0;
    const auto result = train(index_pairs(0, 20), toy.source, toy.target, cfg);
    CHECK(result.model.omega == Matrix::Identity(5, 5));
    CHECK(result.epochs_run == 0);
    CHECK(result.history.empty());
}

TEST_CASE("train is deterministic for a fixed seed") {
    const auto toy = rotated_toy(40, 6, 4);
    TrainConfig cfg;
    cfg.max_epochs = 5;
    const auto a = train(index_pairs(0, 30), toy.source, toy.target, cfg);
    const auto b = train(index_pairs(0, 30), toy.source, toy.target, cfg);
    CHECK((a.model.omega.array() == b.model.omega.array()).all());
    cfg.seed = 99;
    const auto c = train(index_pairs(0, 30), toy.source, toy.target, cfg);
    CHECK_FALSE((a.model.omega.array() == c.model.omega.array()).all());
}

TEST_CASE("train drops unresolvable pairs and fails when none remain") {
    const auto toy = rotated_toy(20, 4, 5);
    auto seed = index_pairs(0, 10);
    seed.emplace_back("nope", "t1");
    seed.emplace_back("s1", "nope");
    TrainConfig cfg;
    cfg.max_epochs = 1;
    const auto r = train(seed, toy.source, toy.target, cfg);
    CHECK(r.pairs_used == 10);
    CHECK(r.pairs_dropped == 2);
    const std::vector<std::pair<std::string, std::string>> bad = {{"x", "y"}};
    CHECK_THROWS_AS(train(bad, toy.source, toy.target, cfg), DataError);
    CHECK_THROWS_AS(train({}, toy.source, toy.target, cfg), DataError);
}

TEST_CASE("a single seed pair trains without a separate dev split") {
    const auto toy = rotated_toy(10, 3, 6);
    TrainConfig cfg;
    cfg.max_epochs = 2;
    const auto r = train(index_pairs(0, 1), toy.source, toy.target, cfg);
    CHECK(r.train_pairs == 1);
    CHECK(r.dev_pairs == 1);
}

TEST_CASE("the learning rate halves whenever the dev loss rises") {
    const auto toy = rotated_toy(60, 8, 7);
    TrainConfig cfg;
    cfg.max_epochs = 40;
    cfg.learning_rate = 0.5;
    const auto r = train(index_pairs(0, 50), toy.source, toy.target, cfg);
    double previous_dev = train(index_pairs(0, 50), toy.source, toy.target, [&] {
                              TrainConfig c = cfg;
                              c.max_epochs = 0;
                              return c;
                          }()).best_dev_loss;
    double lr = cfg.learning_rate;
    for (const auto& rec : r.history) {
        CHECK(rec.learning_rate == lr);
        if (rec.dev_loss > previous_dev) lr *= 0.5;
        previous_dev = rec.dev_loss;
    }
    double best = r.history.empty() ? 0.0 : r.history.front().dev_loss;
    for (const auto& rec : r.history) best = std::min(best, rec.dev_loss);
    CHECK(r.best_dev_loss <= best);
}

TEST_CASE("orthogonal regularization keeps omega closer to orthogonal") {
    // Noisy alignment: target = Q·source + noise.
    std::mt19937_64 rng(12);
    const std::size_t n = 200, dim = 10;
    const Matrix q = synthetic::random_rotation(dim, 13);
    const auto raw = testing::random_space(n, dim, rng, "s");
    RowMatrix noisy = raw.vectors() * q.transpose() + RowMatrix(testing::gaussian_matrix(n, dim, rng, 0.6));
    std::vector<std::string> tw;
    for (std::size_t i = 0; i < n; ++i) tw.push_back("t" + std::to_string(i));
    const auto src = preprocess(raw).space;
    const auto tgt = preprocess(EmbeddingSpace(tw, noisy)).space;
    const auto seed = index_pairs(0, 150);
    TrainConfig cfg;
    cfg.max_epochs = 20;
    cfg.alpha = 0.0;
    const auto free = train(seed, src, tgt, cfg);
    cfg.alpha = 10.0;
    const auto reg = train(seed, src, tgt, cfg);
    CHECK(orth_penalty(reg.model, 1.0) < orth_penalty(free.model, 1.0));
}

TEST_CASE("predict") {
    const auto shared = make_space({"a", "b", "c"}, {{1, 0}, {0, 1}, {-1, 0.2}});
    const auto m = model_of(Matrix::Identity(2, 2), 3);
    CHECK(predict(m, "b", shared, shared, 1).front().word == "b");
    CHECK_THROWS_AS(predict(m, "zz", shared, shared, 1), UnresolvableError);

    const auto toy = rotated_toy(40, 6, 15);
    const auto rot = model_of(toy.q, 40);
    for (std::size_t i = 0; i < 40; ++i) {
        CHECK(predict(rot, "s" + std::to_string(i), toy.source, toy.target, 1).front().word ==
              "t" + std::to_string(i));
    }
}

TEST_CASE("predict argmax equals bilinear argmax for unit target rows and ignores query scale") {
    std::mt19937_64 rng(16);
    const auto tgt = length_normalize(testing::random_space(25, 5, rng)).space;
    for (int trial = 0; trial < 30; ++trial) {
        const auto m = model_of(testing::gaussian_matrix(5, 5, rng), 25);
        const Vector s = testing::gaussian_matrix(5, 1, rng);
        const auto top = predict(m, s, tgt, 1).front();
        std::size_t best = 0;
        for (std::size_t t = 1; t < 25; ++t)
            if (bilinear_score(m, tgt.row(t), s) > bilinear_score(m, tgt.row(best), s)) best = t;
        CHECK(top.index == best);
        CHECK(predict(m, Vector(3.5 * s), tgt, 1).front().index == top.index);
    }
}

TEST_CASE("model file round-trips bit-exactly and rejects junk") {
    testing::TempDir dir("tr");
    std::mt19937_64 rng(17);
    const auto m = model_of(testing::gaussian_matrix(3, 4, rng), 12);
    save_model(m, dir / "m.omega");
    const auto back = load_model(dir / "m.omega");
    CHECK(back.normalizer_vocab_size == 12);
    CHECK((back.omega.array() == m.omega.array()).all());
    CHECK(testing::read_file(dir / "m.omega").rfind("MORPHLEX-OMEGA v1 3 4 12\n", 0) == 0);

    testing::write_file(dir / "bad", "MORPHLEX-OMEGA v1 2 2 1\n1 0\n0\n");
    CHECK_THROWS_AS(load_model(dir / "bad"), FormatError);
    testing::write_file(dir / "bad2", "OMEGA 2 2\n");
    CHECK_THROWS_AS(load_model(dir / "bad2"), FormatError);
}

TEST_CASE("metadata and seed dictionary files") {
    testing::TempDir dir("tr");
    ModelMetadata meta;
    meta.source_mean = Vector::LinSpaced(3, 0.1, 0.3);
    meta.target_mean = Vector::Constant(3, -1.0 / 3.0);
    meta.source_vocab = 7;
    save_metadata(meta, metadata_path(dir / "m.omega"));
    const auto back = load_metadata(dir / "m.omega.meta.json");
    CHECK(back.source_mean == meta.source_mean);
    CHECK(back.target_mean == meta.target_mean);
    CHECK(back.source_vocab == 7);

    testing::write_file(dir / "d.tsv", "a\tx\nb\ty\na\tx\n\nc\tz\r\n");
    const auto d = load_seed_dictionary(dir / "d.tsv");
    REQUIRE(d.size() == 3);
    CHECK(d[2].second == "z");
    testing::write_file(dir / "bad.tsv", "a x\n");
    CHECK_THROWS_AS(load_seed_dictionary(dir / "bad.tsv"), FormatError);
}
