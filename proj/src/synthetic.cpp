#include "morphlex/synthetic.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "morphlex/error.hpp"

namespace morphlex::synthetic {
namespace {

constexpr std::size_t kSlots = 8;

// Relative use of each paradigm slot; the citation form dominates.
constexpr double kSlotWeight[kSlots] = {0.30, 0.10, 0.05, 0.22, 0.08, 0.10, 0.10, 0.05};

struct InflectionClass {
    std::string lemma_ending;
    std::string vowel;
};

// A form is stem + class vowel + slot marker; the citation form is
// stem + lemma ending. Markers share one length so no ending is a suffix of
// another. Source class "er" merges its 1SG and 3SG (syncretism).
struct Grammar {
    std::vector<InflectionClass> classes;
    std::vector<std::string> markers;  // slots 1..7
    std::size_t syncretic_class = static_cast<std::size_t>(-1);

    std::string ending(std::size_t cls, std::size_t slot) const {
        const auto& c = classes[cls];
        if (slot == 0) return c.lemma_ending;
        if (cls == syncretic_class && slot == 3) slot = 1;
        return c.vowel + markers[slot - 1];
    }
};

Grammar source_grammar() {
    return {{{"ar", "o"}, {"er", "a"}, {"ir", "ü"}}, {"mi", "si", "ta", "mu", "nu", "ke", "do"}, 1};
}

Grammar target_grammar() {
    return {{{"en", "a"}, {"on", "i"}}, {"ko", "so", "te", "mo", "ni", "ru", "da"}};
}

const std::vector<std::string> kOnsets = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
const std::vector<std::string> kNuclei = {"a", "e", "i", "o", "u"};
const std::vector<std::string> kCodas = {"l", "m", "n", "r", "s", "t", "k", "p", "d", "g"};

// (C V){1,2} C, so stems end in a consonant and endings start with a vowel.
std::string random_stem(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> syl(1, 2);
    std::uniform_int_distribution<std::size_t> on(0, kOnsets.size() - 1);
    std::uniform_int_distribution<std::size_t> nu(0, kNuclei.size() - 1);
    std::uniform_int_distribution<std::size_t> co(0, kCodas.size() - 1);
    std::string s;
    const std::size_t n = syl(rng);
    for (std::size_t i = 0; i < n; ++i) s += kOnsets[on(rng)] + kNuclei[nu(rng)];
    return s + kCodas[co(rng)];
}

std::vector<std::string> unique_stems(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    std::size_t attempts = 0;
    while (out.size() < n) {
        if (++attempts > 1000 * (n + 10)) throw DataError("synthetic: stem space exhausted");
        std::string s = random_stem(rng);
        if (seen.insert(s).second) out.push_back(std::move(s));
    }
    return out;
}

Vector gaussian(std::size_t dim, double scale, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, scale);
    Vector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
    return v;
}

struct FormInfo {
    double frequency = 0.0;
    std::vector<std::size_t> cells;
};

// Frequency-ranked embedding space; a form shared by several cells gets the
// mean of their clean vectors.
EmbeddingSpace build_space(const std::vector<std::string>& forms, const std::vector<double>& cell_freq,
                           const std::vector<Vector>& clean, const Config& config,
                           std::mt19937_64& rng) {
    std::map<std::string, FormInfo> by_form;
    for (std::size_t c = 0; c < forms.size(); ++c) {
        auto& info = by_form[forms[c]];
        info.frequency += cell_freq[c];
        info.cells.push_back(c);
    }
    std::vector<std::pair<std::string, const FormInfo*>> ranked;
    for (const auto& [form, info] : by_form) ranked.emplace_back(form, &info);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second->frequency != b.second->frequency) return a.second->frequency > b.second->frequency;
        return a.second->cells.front() < b.second->cells.front();
    });

    const std::size_t v = ranked.size();
    RowMatrix m(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(config.dim));
    std::vector<std::string> words;
    words.reserve(v);
    const double inv_sqrt_dim = 1.0 / std::sqrt(static_cast<double>(config.dim));
    for (std::size_t r = 0; r < v; ++r) {
        const FormInfo& info = *ranked[r].second;
        Vector x = Vector::Zero(static_cast<Eigen::Index>(config.dim));
        for (std::size_t c : info.cells) x += clean[c];
        x /= static_cast<double>(info.cells.size());
        const double u = v > 1 ? static_cast<double>(r) / static_cast<double>(v - 1) : 0.0;
        const double sigma =
            config.noise_min + (config.noise_max - config.noise_min) * std::pow(u, config.noise_power);
        x += gaussian(config.dim, sigma * inv_sqrt_dim, rng);
        m.row(static_cast<Eigen::Index>(r)) = x.transpose();
        words.push_back(ranked[r].first);
    }
    return EmbeddingSpace(std::move(words), std::move(m));
}

}  // namespace

std::vector<MorphTag> paradigm_slots() {
    return {parse_tag("V;NFIN"),      parse_tag("V;PRS;1;SG"), parse_tag("V;PRS;2;SG"),
            parse_tag("V;PRS;3;SG"),  parse_tag("V;PRS;1;PL"), parse_tag("V;PRS;3;PL"),
            parse_tag("V;PST;3;SG"),  parse_tag("V.PTCP;PST")};
}

Matrix random_orthogonal(std::size_t dim, std::uint64_t seed) {
    if (dim == 0) throw DimensionError("random_orthogonal: dimension must be positive");
    std::mt19937_64 rng(seed);
    const auto d = static_cast<Eigen::Index>(dim);
    Matrix g(d, d);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) g(i, j) = normal(rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < d; ++j) {
        if (r(j, j) < 0) q.col(j) *= -1.0;
    }
    return q;
}

Matrix random_rotation(std::size_t dim, std::uint64_t seed) {
    Matrix q = random_orthogonal(dim, seed);
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return q;
}

Lexicon generate(const Config& config) {
    if (config.lexemes == 0) throw DataError("synthetic: need at least one lexeme");
    if (config.dim == 0) throw DimensionError("synthetic: dimension must be positive");
    std::mt19937_64 rng(config.seed);
    const Grammar src_g = source_grammar();
    const Grammar tgt_g = target_grammar();

    Lexicon lex;
    lex.slots = paradigm_slots();
    lex.lexemes = config.lexemes;
    const std::size_t cells = config.lexemes * kSlots;
    lex.source_forms.resize(cells);
    lex.target_forms.resize(cells);
    lex.irregular.assign(cells, false);

    const auto src_stems = unique_stems(config.lexemes, rng);
    const auto tgt_stems = unique_stems(config.lexemes, rng);
    std::uniform_int_distribution<std::size_t> src_cls(0, src_g.classes.size() - 1);
    std::uniform_int_distribution<std::size_t> tgt_cls(0, tgt_g.classes.size() - 1);
    for (std::size_t l = 0; l < config.lexemes; ++l) {
        const std::size_t sc = src_cls(rng);
        const std::size_t tc = tgt_cls(rng);
        for (std::size_t s = 0; s < kSlots; ++s) {
            lex.source_forms[lex.cell(l, s)] = src_stems[l] + src_g.ending(sc, s);
            lex.target_forms[lex.cell(l, s)] = tgt_stems[l] + tgt_g.ending(tc, s);
        }
    }

    // Suppletive 1SG forms for a share of the most frequent lexemes.
    const auto n_irregular =
        static_cast<std::size_t>(std::llround(config.irregular_fraction * static_cast<double>(config.lexemes)));
    if (n_irregular > 0) {
        std::unordered_set<std::string> taken(lex.source_forms.begin(), lex.source_forms.end());
        for (std::size_t l = 0; l < std::min(n_irregular, config.lexemes); ++l) {
            std::string form;
            do {
                form = random_stem(rng) + "oi";
            } while (!taken.insert(form).second);
            lex.source_forms[lex.cell(l, 1)] = form;
            lex.irregular[lex.cell(l, 1)] = true;
        }
    }

    std::vector<double> freq(cells);
    for (std::size_t l = 0; l < config.lexemes; ++l) {
        const double zipf = 1.0 / std::pow(static_cast<double>(l + 1), config.zipf_exponent);
        for (std::size_t s = 0; s < kSlots; ++s) {
            // Suppletion survives only in frequent forms.
            const double boost = lex.irregular[lex.cell(l, s)] ? 5.0 : 1.0;
            freq[lex.cell(l, s)] = zipf * kSlotWeight[s] * boost;
        }
    }

    const double inv_sqrt_dim = 1.0 / std::sqrt(static_cast<double>(config.dim));
    std::vector<Vector> meaning;
    for (std::size_t l = 0; l < config.lexemes; ++l) meaning.push_back(gaussian(config.dim, inv_sqrt_dim, rng));
    std::vector<Vector> slot_vec;
    for (std::size_t s = 0; s < kSlots; ++s)
        slot_vec.push_back(gaussian(config.dim, config.tag_weight * inv_sqrt_dim, rng));
    lex.rotation = random_rotation(config.dim, rng());

    std::vector<Vector> src_clean(cells);
    std::vector<Vector> tgt_clean(cells);
    for (std::size_t l = 0; l < config.lexemes; ++l) {
        for (std::size_t s = 0; s < kSlots; ++s) {
            src_clean[lex.cell(l, s)] = meaning[l] + slot_vec[s];
            tgt_clean[lex.cell(l, s)] = lex.rotation * (meaning[l] + slot_vec[s]);
        }
    }
    lex.source.space = build_space(lex.source_forms, freq, src_clean, config, rng);
    lex.target.space = build_space(lex.target_forms, freq, tgt_clean, config, rng);

    for (std::size_t l = 0; l < config.lexemes; ++l) {
        for (std::size_t s = 0; s < kSlots; ++s) {
            const std::size_t c = lex.cell(l, s);
            lex.source.entries.push_back({lex.source_lemma(l), lex.source_forms[c], lex.slots[s]});
            lex.target.entries.push_back({lex.target_lemma(l), lex.target_forms[c], lex.slots[s]});
        }
    }
    return lex;
}

Benchmark split(const Lexicon& lexicon, const SplitConfig& config) {
    if (config.test_lexeme_fraction <= 0.0 || config.test_lexeme_fraction >= 1.0) {
        throw Error("synthetic: test fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> order(lexicon.lexemes);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(config.seed);
    std::shuffle(order.begin(), order.end(), rng);
    auto n_test = static_cast<std::size_t>(
        std::llround(config.test_lexeme_fraction * static_cast<double>(lexicon.lexemes)));
    n_test = std::clamp<std::size_t>(n_test, 1, lexicon.lexemes > 1 ? lexicon.lexemes - 1 : 1);

    Benchmark b;
    b.test_lexemes.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    b.train_lexemes.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    std::sort(b.test_lexemes.begin(), b.test_lexemes.end());
    std::sort(b.train_lexemes.begin(), b.train_lexemes.end());

    const std::size_t n_slots = lexicon.slots.size();
    for (std::size_t l : b.train_lexemes) {
        b.seed.emplace_back(lexicon.source_lemma(l), lexicon.target_lemma(l));
        for (std::size_t s = 1; s < n_slots; ++s) {
            const std::size_t c = lexicon.cell(l, s);
            const auto rank = lexicon.source.space.rank(lexicon.source_forms[c]);
            if (rank && *rank < config.top_forms) {
                b.seed.emplace_back(lexicon.source_forms[c], lexicon.target_forms[c]);
            }
        }
    }

    std::set<std::string> test_source;
    std::set<std::string> test_target;
    std::unordered_map<std::string, std::size_t> index;
    b.test.provenance = "synthetic";
    for (std::size_t l : b.test_lexemes) {
        for (std::size_t s = 1; s < n_slots; ++s) {
            const std::size_t c = lexicon.cell(l, s);
            const std::string& src = lexicon.source_forms[c];
            const std::string& tgt = lexicon.target_forms[c];
            test_source.insert(src);
            test_target.insert(tgt);
            auto [it, inserted] = index.emplace(src, b.test.entries.size());
            if (inserted) {
                b.test.entries.push_back({src, {tgt}, lexicon.slots[s], lexicon.source_lemma(l)});
            } else {
                b.test.entries[it->second].gold.push_back(tgt);
            }
        }
    }
    b.source_morph = exclude_forms(lexicon.source.entries, test_source);
    b.target_morph = exclude_forms(lexicon.target.entries, test_target);
    return b;
}

}  // namespace morphlex::synthetic
