#include "morphlex/eval.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "morphlex/error.hpp"
#include "morphlex/io.hpp"

namespace morphlex {

EvalDictionary load_eval_dictionary(const std::filesystem::path& path) {
    auto in = io::open_input(path);
    EvalDictionary dict;
    dict.provenance = path.string();
    std::unordered_map<std::string, std::size_t> index;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        io::chomp(line);
        if (io::trim(line).empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        const auto f = io::split(line, '\t');
        if (f.size() < 2 || f.size() > 4 || f[0].empty() || f[1].empty()) {
            throw FormatError(where + ": expected 'source<TAB>target[<TAB>tag[<TAB>lemma]]'");
        }
        std::optional<MorphTag> tag;
        if (f.size() >= 3 && !io::trim(f[2]).empty()) {
            try {
                tag = parse_tag(f[2]);
            } catch (const FormatError& e) {
                throw FormatError(where + ": " + e.what());
            }
        }
        std::optional<std::string> lemma;
        if (f.size() == 4 && !f[3].empty()) lemma = std::string(f[3]);

        const std::string source(f[0]);
        auto [it, inserted] = index.emplace(source, dict.entries.size());
        if (inserted) {
            dict.entries.push_back({source, {std::string(f[1])}, tag, lemma});
            continue;
        }
        EvalEntry& entry = dict.entries[it->second];
        if (std::find(entry.gold.begin(), entry.gold.end(), f[1]) == entry.gold.end()) {
            entry.gold.emplace_back(f[1]);
        }
        if (!entry.tag) entry.tag = tag;
        if (!entry.lemma) entry.lemma = lemma;
    }
    return dict;
}

void save_eval_dictionary(const EvalDictionary& dict, const std::filesystem::path& path) {
    auto out = io::open_output(path);
    for (const auto& e : dict.entries) {
        for (const auto& g : e.gold) {
            out << e.source << '\t' << g;
            if (e.tag || e.lemma) out << '\t' << (e.tag ? e.tag->str() : "");
            if (e.lemma) out << '\t' << *e.lemma;
            out << '\n';
        }
    }
}

std::vector<ScoredEntry> score_entries(const TranslationSystem& system, const EvalDictionary& dict,
                                       const EmbeddingSpace& source_space) {
    std::vector<ScoredEntry> out;
    out.reserve(dict.entries.size());
    for (const auto& e : dict.entries) {
        ScoredEntry s;
        s.source = e.source;
        s.tag = e.tag;
        s.rank = source_space.rank(e.source);
        s.in_vocab = s.rank.has_value();
        s.prediction = system(e);
        s.correct = s.prediction &&
                    std::find(e.gold.begin(), e.gold.end(), *s.prediction) != e.gold.end();
        out.push_back(std::move(s));
    }
    return out;
}

EvalReport precision_at_1(const TranslationSystem& system, const EvalDictionary& dict,
                          const EmbeddingSpace& source_space, BinOptions bins,
                          std::size_t min_tag_count) {
    if (dict.entries.empty()) throw DataError("evaluation dictionary is empty");
    EvalReport report;
    report.entries = score_entries(system, dict, source_space);
    report.voc.label = "VOC";
    report.all.label = "ALL";
    for (const auto& s : report.entries) {
        ++report.all.count;
        report.all.correct += s.correct ? 1 : 0;
        if (s.in_vocab) {
            ++report.voc.count;
            report.voc.correct += s.correct ? 1 : 0;
        }
        if (!s.prediction) ++report.untranslatable;
    }
    report.bins = frequency_bins(report.entries, bins);
    const bool tagged = std::any_of(report.entries.begin(), report.entries.end(),
                                    [](const ScoredEntry& s) { return s.tag.has_value(); });
    if (tagged) report.tags = tag_breakdown(report.entries, min_tag_count);
    return report;
}

std::vector<Cell> frequency_bins(std::span<const ScoredEntry> scored, BinOptions options) {
    if (options.bin_width == 0) throw Error("bin width must be positive");
    std::vector<Cell> cells(options.num_bins + 2);
    const auto short_count = [](std::size_t v) {
        return v % 1000 == 0 && v > 0 ? std::to_string(v / 1000) + "k" : std::to_string(v);
    };
    for (std::size_t i = 0; i < options.num_bins; ++i) {
        cells[i].label = short_count(i * options.bin_width) + "-" +
                         short_count((i + 1) * options.bin_width);
    }
    cells[options.num_bins].label = short_count(options.num_bins * options.bin_width) + "+";
    cells[options.num_bins + 1].label = "OOV";
    for (const auto& s : scored) {
        std::size_t bin = options.num_bins + 1;
        if (s.rank) bin = std::min(*s.rank / options.bin_width, options.num_bins);
        ++cells[bin].count;
        cells[bin].correct += s.correct ? 1 : 0;
    }
    return cells;
}

std::vector<Cell> tag_breakdown(std::span<const ScoredEntry> scored, std::size_t min_count) {
    std::map<std::string, Cell> groups;
    for (const auto& s : scored) {
        if (!s.tag) continue;
        Cell& c = groups[s.tag->key()];
        if (c.label.empty() || s.tag->str() < c.label) c.label = s.tag->str();
        ++c.count;
        c.correct += s.correct ? 1 : 0;
    }
    if (groups.empty()) throw DataError("no tagged entries for the tag breakdown");
    std::vector<Cell> out;
    for (auto& [key, cell] : groups) {
        cell.low_support = cell.count < min_count;
        out.push_back(std::move(cell));
    }
    std::sort(out.begin(), out.end(), [](const Cell& a, const Cell& b) { return a.label < b.label; });
    return out;
}

std::vector<std::pair<std::string, std::string>> extract_identical_seed(
    const EmbeddingSpace& source_space, const EmbeddingSpace& target_space) {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < source_space.file_rows(); ++i) {
        const std::string& w = source_space.word(i);
        if (target_space.rank(w)) out.emplace_back(w, w);
    }
    if (out.empty()) throw DataError("no identically spelled words in the two vocabularies");
    return out;
}

namespace {

void cell_line(std::ostream& out, const Cell& c) {
    out << c.label << '\t' << c.count << '\t' << c.correct << '\t' << io::format_double(c.accuracy());
}

nlohmann::json cell_json(const Cell& c) {
    return {{"label", c.label},
            {"count", c.count},
            {"correct", c.correct},
            {"precision_at_1", c.accuracy()},
            {"low_support", c.low_support}};
}

}  // namespace

std::string summary_tsv(const EvalReport& report) {
    std::ostringstream out;
    out << "population\tcount\tcorrect\tprecision_at_1\n";
    cell_line(out, report.voc);
    out << '\n';
    cell_line(out, report.all);
    out << '\n';
    out << "untranslatable\t" << report.untranslatable << '\n';
    return out.str();
}

void write_report(const EvalReport& report, const std::string& prefix) {
    {
        auto out = io::open_output(prefix + ".summary.tsv");
        out << summary_tsv(report);
    }
    {
        auto out = io::open_output(prefix + ".bins.tsv");
        out << "bin\tcount\tcorrect\tprecision_at_1\n";
        for (const auto& c : report.bins) {
            cell_line(out, c);
            out << '\n';
        }
    }
    if (!report.tags.empty()) {
        auto out = io::open_output(prefix + ".tags.tsv");
        out << "tag\tcount\tcorrect\tprecision_at_1\tlow_support\n";
        for (const auto& c : report.tags) {
            cell_line(out, c);
            out << '\t' << (c.low_support ? "yes" : "no") << '\n';
        }
    }
    {
        auto out = io::open_output(prefix + ".predictions.tsv");
        out << "source\tprediction\tcorrect\tin_vocab\n";
        for (const auto& s : report.entries) {
            out << s.source << '\t' << (s.prediction ? *s.prediction : "<NONE>") << '\t'
                << (s.correct ? 1 : 0) << '\t' << (s.in_vocab ? 1 : 0) << '\n';
        }
    }
    nlohmann::json j;
    j["voc"] = cell_json(report.voc);
    j["all"] = cell_json(report.all);
    j["untranslatable"] = report.untranslatable;
    j["bins"] = nlohmann::json::array();
    for (const auto& c : report.bins) j["bins"].push_back(cell_json(c));
    j["tags"] = nlohmann::json::array();
    for (const auto& c : report.tags) j["tags"].push_back(cell_json(c));
    auto out = io::open_output(prefix + ".json");
    out << j.dump(2) << '\n';
}

}  // namespace morphlex
