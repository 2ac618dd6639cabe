#include <Eigen/Eigenvalues>
#include <random>

#include "doctest.h"
#include "morphlex/baseline.hpp"
#include "morphlex/error.hpp"
#include "morphlex/synthetic.hpp"
#include "support.hpp"

using namespace morphlex;

namespace {

double orthogonality_gap(const Matrix& m) {
    return (m.transpose() * m - Matrix::Identity(m.cols(), m.cols())).norm();
}

// Polar factor of M = B Aᵀ through the eigen-decomposition of MᵀM, an
// independent route to the orthogonal Procrustes solution.
Matrix polar_oracle(const Matrix& a, const Matrix& b) {
    const Matrix m = b * a.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m.transpose() * m);
    const Vector inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
    return m * eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

TEST_CASE("identical spaces give the identity") {
    std::mt19937_64 rng(1);
    const Matrix a = testing::gaussian_matrix(6, 30, rng);
    const Matrix omega = procrustes(a, a);
    CHECK((omega - Matrix::Identity(6, 6)).norm() < 1e-9);
}

TEST_CASE("a known orthogonal map is recovered") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(seed);
        const Matrix q = synthetic::random_orthogonal(8, seed + 100);
        REQUIRE(orthogonality_gap(q) < 1e-10);
        const Matrix a = testing::gaussian_matrix(8, 40, rng);
        const Matrix omega = procrustes(a, q * a);
        CHECK((omega - q).norm() < 1e-6);
    }
}

TEST_CASE("fits are orthogonal and agree with the polar-decomposition oracle") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix a = testing::gaussian_matrix(5, 25, rng);
        const Matrix b = testing::gaussian_matrix(5, 25, rng);
        const Matrix omega = procrustes(a, b);
        CHECK(orthogonality_gap(omega) < 1e-6);
        CHECK((omega - polar_oracle(a, b)).norm() < 1e-8);
    }
}

TEST_CASE("no random orthogonal matrix fits better") {
    std::mt19937_64 rng(3);
    const Matrix a = testing::gaussian_matrix(4, 20, rng);
    const Matrix q = synthetic::random_orthogonal(4, 9);
    const Matrix b = q * a + 0.3 * testing::gaussian_matrix(4, 20, rng);
    const Matrix omega = procrustes(a, b);
    const double best = (omega * a - b).norm();
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const Matrix other = synthetic::random_orthogonal(4, 1000 + i);
        CHECK((other * a - b).norm() >= best - 1e-9);
    }
}

TEST_CASE("procrustes_fit resolves pairs and reports problems") {
    const auto src = testing::make_space({"a", "b", "c"}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    const auto tgt = testing::make_space({"x", "y", "z"}, {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}});
    const std::vector<std::pair<std::string, std::string>> seed = {
        {"a", "y"}, {"b", "x"}, {"c", "z"}, {"q", "x"}};
    const auto fit = procrustes_fit(seed, src, tgt);
    CHECK(fit.pairs_used == 3);
    CHECK(fit.pairs_dropped == 1);
    CHECK(fit.warnings.empty());
    CHECK(fit.model.normalizer_vocab_size == 3);
    CHECK(baseline_predict(fit.model, "a", src, tgt, 1)[0].word == "y");
    CHECK(baseline_predict(fit.model, "b", src, tgt, 1)[0].word == "x");

    const std::vector<std::pair<std::string, std::string>> few = {{"a", "y"}};
    const auto under = procrustes_fit(few, src, tgt);
    CHECK(under.warnings.size() == 1);
    CHECK(orthogonality_gap(under.model.omega) < 1e-6);

    const std::vector<std::pair<std::string, std::string>> none = {{"q", "r"}};
    CHECK_THROWS_AS(procrustes_fit(none, src, tgt), DataError);
    const auto flat = testing::make_space({"x"}, {{1, 0}});
    CHECK_THROWS_AS(procrustes_fit(seed, src, flat), DimensionError);
    CHECK_THROWS_AS(procrustes(Matrix::Zero(2, 3), Matrix::Zero(3, 3)), DimensionError);
}

TEST_CASE("rotated spaces translate perfectly") {
    std::mt19937_64 rng(4);
    const auto src = testing::random_space(60, 10, rng);
    const Matrix q = synthetic::random_orthogonal(10, 5);
    const auto tgt = testing::rotated_space(src, q, "t_");
    std::vector<std::pair<std::string, std::string>> seed;
    for (std::size_t i = 0; i < 30; ++i) seed.emplace_back(src.word(i), tgt.word(i));
    const auto fit = procrustes_fit(seed, src, tgt);
    for (std::size_t i = 30; i < 60; ++i) {
        CHECK(baseline_predict(fit.model, src.word(i), src, tgt, 1)[0].word == tgt.word(i));
    }
}
