#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "morphlex/embeddings.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("morphlex-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline morphlex::EmbeddingSpace make_space(std::vector<std::string> words,
                                           const std::vector<std::vector<double>>& rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = n == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
    morphlex::RowMatrix m(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return morphlex::EmbeddingSpace(std::move(words), std::move(m));
}

inline morphlex::Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                                        double sd = 1.0) {
    std::normal_distribution<double> normal(0.0, sd);
    morphlex::Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    return m;
}

/// Random space with words w0..w{n-1}.
inline morphlex::EmbeddingSpace random_space(std::size_t n, std::size_t dim, std::mt19937_64& rng,
                                             const std::string& prefix = "w") {
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i) words.push_back(prefix + std::to_string(i));
    morphlex::RowMatrix m = gaussian_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim), rng);
    return morphlex::EmbeddingSpace(std::move(words), std::move(m));
}

/// Space whose rows are Q times the rows of `source`, same words with a prefix swap.
inline morphlex::EmbeddingSpace rotated_space(const morphlex::EmbeddingSpace& source,
                                              const morphlex::Matrix& q, const std::string& prefix) {
    std::vector<std::string> words;
    for (std::size_t i = 0; i < source.size(); ++i) words.push_back(prefix + std::to_string(i));
    morphlex::RowMatrix m = source.vectors() * q.transpose();
    return morphlex::EmbeddingSpace(std::move(words), std::move(m));
}

}  // namespace testing
