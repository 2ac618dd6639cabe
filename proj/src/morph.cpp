#include "morphlex/morph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <tuple>

#include "morphlex/error.hpp"
#include "morphlex/io.hpp"
#include "morphlex/utf8.hpp"

namespace morphlex {

MorphTag::MorphTag(std::vector<std::string> features) : features_(std::move(features)) {
    if (features_.empty()) throw FormatError("tag has no features");
    for (const auto& f : features_) {
        if (f.empty()) throw FormatError("tag has an empty feature");
        if (f.find(';') != std::string::npos) throw FormatError("feature contains ';': " + f);
    }
    std::vector<std::string> sorted = features_;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0) key_ += ';';
        key_ += sorted[i];
    }
}

std::string MorphTag::str() const {
    std::string out;
    for (std::size_t i = 0; i < features_.size(); ++i) {
        if (i > 0) out += ';';
        out += features_[i];
    }
    return out;
}

MorphTag parse_tag(std::string_view raw) {
    if (io::trim(raw).empty()) throw FormatError("empty tag");
    std::vector<std::string> features;
    for (std::string_view part : io::split(raw, ';')) {
        std::string f(io::trim(part));
        if (f.empty()) throw FormatError("empty feature in tag '" + std::string(raw) + "'");
        std::transform(f.begin(), f.end(), f.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        features.push_back(std::move(f));
    }
    return MorphTag(std::move(features));
}

double tag_translate(const MorphTag& source_tag, const MorphTag& target_tag) {
    return source_tag == target_tag ? 1.0 : 0.0;
}

std::vector<UniMorphEntry> load_unimorph(const std::filesystem::path& path) {
    auto in = io::open_input(path);
    std::vector<UniMorphEntry> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        io::chomp(line);
        if (io::trim(line).empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        const auto fields = io::split(line, '\t');
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
            throw FormatError(where + ": expected 'lemma<TAB>form<TAB>tag'");
        }
        try {
            out.push_back({std::string(fields[0]), std::string(fields[1]), parse_tag(fields[2])});
        } catch (const FormatError& e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    return out;
}

void save_unimorph(std::span<const UniMorphEntry> entries, const std::filesystem::path& path) {
    auto out = io::open_output(path);
    for (const auto& e : entries) out << e.lemma << '\t' << e.form << '\t' << e.tag.str() << '\n';
}

std::vector<UniMorphEntry> exclude_forms(std::span<const UniMorphEntry> entries,
                                         const std::set<std::string>& forms) {
    std::vector<UniMorphEntry> out;
    for (const auto& e : entries) {
        if (!forms.count(e.form)) out.push_back(e);
    }
    return out;
}

std::string_view to_string(Direction d) { return d == Direction::inflect ? "inflect" : "analyze"; }

void SuffixRuleTable::add(const RuleContext& context, const RuleOutcome& outcome, long count) {
    if (count <= 0) throw Error("rule count must be positive");
    if (!utf8::ends_with(outcome.strip, context.suffix)) {
        throw Error("rule strip '" + outcome.strip + "' does not end with its context '" +
                    context.suffix + "'");
    }
    rules_[context][outcome] += count;
    totals_[context] += count;
}

const std::string& SuffixRuleTable::register_tag(const MorphTag& tag) {
    auto [it, inserted] = tags_.emplace(tag.key(), tag);
    // Differently ordered spellings of one tag display as the smallest string.
    if (!inserted && tag.str() < it->second.str()) it->second = tag;
    return it->first;
}

const MorphTag& SuffixRuleTable::tag(const std::string& key) const {
    auto it = tags_.find(key);
    if (it == tags_.end()) throw UnknownTagError("unknown tag '" + key + "'");
    return it->second;
}

const SuffixRuleTable::Outcomes* SuffixRuleTable::find(const RuleContext& context) const {
    auto it = rules_.find(context);
    return it == rules_.end() ? nullptr : &it->second;
}

long SuffixRuleTable::total(const RuleContext& context) const {
    auto it = totals_.find(context);
    return it == totals_.end() ? 0 : it->second;
}

std::size_t SuffixRuleTable::rule_count() const {
    std::size_t n = 0;
    for (const auto& [ctx, outcomes] : rules_) n += outcomes.size();
    return n;
}

std::vector<std::pair<RuleOutcome, long>> SuffixRuleTable::ranked(const RuleContext& context) const {
    std::vector<std::pair<RuleOutcome, long>> out;
    const Outcomes* outcomes = find(context);
    if (!outcomes) return out;
    out.assign(outcomes->begin(), outcomes->end());
    const bool analyzing = direction_ == Direction::analyze;
    std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        if (analyzing) {
            const std::string ta = tag(a.first.tag).str();
            const std::string tb = tag(b.first.tag).str();
            return std::tie(ta, a.first.append, a.first.strip) <
                   std::tie(tb, b.first.append, b.first.strip);
        }
        return std::tie(a.first.append, a.first.strip) < std::tie(b.first.append, b.first.strip);
    });
    return out;
}

std::vector<RuleEntry> SuffixRuleTable::entries() const {
    std::vector<RuleEntry> out;
    for (const auto& [ctx, outcomes] : rules_) {
        for (const auto& [outcome, count] : outcomes) out.push_back({ctx, outcome, count});
    }
    return out;
}

namespace {

constexpr std::string_view kRulesMagic = "MORPHLEX-RULES";

struct Edit {
    std::string strip;
    std::string append;
};

Edit minimal_edit(std::string_view from, std::string_view to) {
    const std::size_t p = utf8::common_prefix(from, to);
    return {std::string(from.substr(p)), std::string(to.substr(p))};
}

// Records the edit under its full context and every shorter backoff context.
void add_with_backoffs(SuffixRuleTable& table, const std::string& tag_key, const Edit& edit,
                       const std::string& outcome_tag) {
    for (std::string_view suffix : utf8::suffixes(edit.strip)) {
        table.add({tag_key, std::string(suffix)}, {edit.strip, edit.append, outcome_tag});
    }
}

// Applies an outcome to a word that ends with the outcome's context suffix.
// Returns false when the word is too short for the edit.
bool apply(std::string_view word, const RuleOutcome& outcome, std::string& result) {
    if (utf8::ends_with(word, outcome.strip)) {
        result = std::string(word.substr(0, word.size() - outcome.strip.size())) + outcome.append;
        return true;
    }
    const std::size_t strip_chars = utf8::length(outcome.strip);
    if (utf8::length(word) < strip_chars) return false;
    result = std::string(utf8::drop_last(word, strip_chars)) + outcome.append;
    return true;
}

}  // namespace

SuffixRuleTable learn_inflector(std::span<const UniMorphEntry> entries) {
    SuffixRuleTable table(Direction::inflect);
    for (const auto& e : entries) {
        const std::string& key = table.register_tag(e.tag);
        add_with_backoffs(table, key, minimal_edit(e.lemma, e.form), "");
    }
    return table;
}

SuffixRuleTable learn_analyzer(std::span<const UniMorphEntry> entries) {
    // One analysis per surface form: smallest tag string, then smallest lemma.
    std::map<std::string, const UniMorphEntry*> chosen;
    for (const auto& e : entries) {
        auto [it, inserted] = chosen.emplace(e.form, &e);
        if (inserted) continue;
        const UniMorphEntry& cur = *it->second;
        const std::string ct = cur.tag.str();
        const std::string et = e.tag.str();
        if (std::tie(et, e.lemma) < std::tie(ct, cur.lemma)) it->second = &e;
    }
    SuffixRuleTable table(Direction::analyze);
    for (const auto& [form, e] : chosen) {
        const std::string& key = table.register_tag(e->tag);
        add_with_backoffs(table, "", minimal_edit(e->form, e->lemma), key);
    }
    return table;
}

Inflection inflect(const SuffixRuleTable& table, std::string_view lemma, const MorphTag& tag) {
    if (table.direction() != Direction::inflect) throw Error("inflect: table is not an inflector");
    if (!table.has_tag(tag)) throw UnknownTagError("inflector has no rules for tag " + tag.str());
    for (std::string_view suffix : utf8::suffixes(lemma)) {
        const RuleContext ctx{tag.key(), std::string(suffix)};
        const long total = table.total(ctx);
        for (const auto& [outcome, count] : table.ranked(ctx)) {
            std::string form;
            if (apply(lemma, outcome, form)) {
                return {std::move(form),
                        std::log(static_cast<double>(count) / static_cast<double>(total))};
            }
        }
    }
    throw NoRuleError("no rule inflects '" + std::string(lemma) + "' as " + tag.str());
}

Analysis analyze(const SuffixRuleTable& table, std::string_view form) {
    if (table.direction() != Direction::analyze) throw Error("analyze: table is not an analyzer");
    for (std::string_view suffix : utf8::suffixes(form)) {
        const RuleContext ctx{"", std::string(suffix)};
        const long total = table.total(ctx);
        for (const auto& [outcome, count] : table.ranked(ctx)) {
            std::string lemma;
            if (apply(form, outcome, lemma) && !lemma.empty()) {
                return {std::move(lemma), table.tag(outcome.tag),
                        std::log(static_cast<double>(count) / static_cast<double>(total))};
            }
        }
    }
    throw NoAnalysisError("no analysis for '" + std::string(form) + "'");
}

HeldOutAccuracy inflection_accuracy(const SuffixRuleTable& inflector, std::span<const UniMorphEntry> entries) {
    HeldOutAccuracy acc;
    for (const auto& e : entries) {
        ++acc.total;
        try {
            acc.correct += inflect(inflector, e.lemma, e.tag).form == e.form ? 1 : 0;
        } catch (const Error&) {
        }
    }
    return acc;
}

HeldOutAccuracy analysis_accuracy(const SuffixRuleTable& analyzer, std::span<const UniMorphEntry> entries) {
    std::set<std::tuple<std::string, std::string, std::string>> valid;
    for (const auto& e : entries) valid.emplace(e.form, e.lemma, e.tag.key());
    HeldOutAccuracy acc;
    for (const auto& e : entries) {
        ++acc.total;
        try {
            const Analysis a = analyze(analyzer, e.form);
            acc.correct += valid.count({e.form, a.lemma, a.tag.key()});
        } catch (const Error&) {
        }
    }
    return acc;
}

SuffixInflector::SuffixInflector(SuffixRuleTable table) : table_(std::move(table)) {
    if (table_.direction() != Direction::inflect) throw Error("SuffixInflector needs an inflect table");
}

Inflection SuffixInflector::inflect(std::string_view lemma, const MorphTag& tag) const {
    return morphlex::inflect(table_, lemma, tag);
}

SuffixAnalyzer::SuffixAnalyzer(SuffixRuleTable table) : table_(std::move(table)) {
    if (table_.direction() != Direction::analyze) throw Error("SuffixAnalyzer needs an analyze table");
}

Analysis SuffixAnalyzer::analyze(std::string_view form) const {
    return morphlex::analyze(table_, form);
}

void save_rules(const SuffixRuleTable& table, const std::filesystem::path& path) {
    auto out = io::open_output(path);
    out << kRulesMagic << " v1 " << to_string(table.direction()) << '\n';
    for (const auto& r : table.entries()) {
        if (table.direction() == Direction::inflect) {
            out << table.tag(r.context.tag).str() << '\t' << r.context.suffix << '\t'
                << r.outcome.append << '\t' << r.count << '\t' << r.outcome.strip << '\n';
        } else {
            out << r.context.suffix << '\t' << r.outcome.append << '\t'
                << table.tag(r.outcome.tag).str() << '\t' << r.count << '\t' << r.outcome.strip
                << '\n';
        }
    }
    if (!out) throw FormatError("failed writing " + path.string());
}

SuffixRuleTable load_rules(const std::filesystem::path& path) {
    auto in = io::open_input(path);
    const std::string name = path.string();
    std::string line;
    if (!std::getline(in, line)) throw FormatError(name + ": empty rule file");
    io::chomp(line);
    const auto header = io::split_ws(line);
    if (header.size() != 3 || header[0] != kRulesMagic || header[1] != "v1" ||
        (header[2] != "inflect" && header[2] != "analyze")) {
        throw FormatError(name + ":1: expected 'MORPHLEX-RULES v1 <inflect|analyze>'");
    }
    const Direction direction = header[2] == "inflect" ? Direction::inflect : Direction::analyze;
    SuffixRuleTable table(direction);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        io::chomp(line);
        if (line.empty()) continue;
        const std::string where = name + ":" + std::to_string(line_no);
        const auto f = io::split(line, '\t');
        if (f.size() != 5) throw FormatError(where + ": expected 5 tab-separated fields");
        try {
            const long count = io::parse_long(f[3], where);
            if (count <= 0) throw FormatError(where + ": count must be positive");
            if (direction == Direction::inflect) {
                const std::string& key = table.register_tag(parse_tag(f[0]));
                table.add({key, std::string(f[1])}, {std::string(f[4]), std::string(f[2]), ""}, count);
            } else {
                const std::string& key = table.register_tag(parse_tag(f[2]));
                table.add({"", std::string(f[0])}, {std::string(f[4]), std::string(f[1]), key}, count);
            }
        } catch (const FormatError&) {
            throw;
        } catch (const Error& e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    return table;
}

}  // namespace morphlex
