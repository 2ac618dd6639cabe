#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace morphlex {

/// A morpho-syntactic feature bundle such as V;PRS;3;SG.
///
/// Features keep their input order for display, but two tags are equal when
/// they hold the same multiset of features.
class MorphTag {
public:
    MorphTag() = default;
    /// Throws FormatError for an empty list, an empty feature or an embedded ';'.
    explicit MorphTag(std::vector<std::string> features);

    const std::vector<std::string>& features() const { return features_; }
    /// Features joined by ';' in their original order.
    std::string str() const;
    /// Order-insensitive identity: sorted features joined by ';'.
    const std::string& key() const { return key_; }

    friend bool operator==(const MorphTag& a, const MorphTag& b) { return a.key_ == b.key_; }

private:
    std::vector<std::string> features_;
    std::string key_;
};

/// Splits on ';', trims and upper-cases each feature.
MorphTag parse_tag(std::string_view raw);

/// Indicator tag translator: 1 when the tags are equal, else 0.
double tag_translate(const MorphTag& source_tag, const MorphTag& target_tag);

struct UniMorphEntry {
    std::string lemma;
    std::string form;
    MorphTag tag;
};

/// Reads "lemma<TAB>form<TAB>tag" lines; blank lines are skipped.
std::vector<UniMorphEntry> load_unimorph(const std::filesystem::path& path);
void save_unimorph(std::span<const UniMorphEntry> entries, const std::filesystem::path& path);

/// Drops entries whose surface form is in `forms`.
std::vector<UniMorphEntry> exclude_forms(std::span<const UniMorphEntry> entries,
                                         const std::set<std::string>& forms);

enum class Direction { inflect, analyze };

std::string_view to_string(Direction d);

/// Conditioning context of a rule. Inflection rules condition on (tag, lemma
/// suffix); analysis rules on the form suffix alone (tag left empty).
struct RuleContext {
    std::string tag;  // MorphTag::key(), or "" for analysis
    std::string suffix;
    auto operator<=>(const RuleContext&) const = default;
};

/// What a rule does: remove `strip` from the end of the word and append
/// `append`. For analysis rules `tag` is the predicted tag's key.
///
/// `strip` always ends with the context suffix. When the context is a backoff
/// (shorter than `strip`), the word is cut by the character length of `strip`.
struct RuleOutcome {
    std::string strip;
    std::string append;
    std::string tag;
    auto operator<=>(const RuleOutcome&) const = default;
};

struct RuleEntry {
    RuleContext context;
    RuleOutcome outcome;
    long count = 0;
};

/// Counted suffix-replacement rules backing the default inflector and analyzer.
class SuffixRuleTable {
public:
    explicit SuffixRuleTable(Direction direction = Direction::inflect) : direction_(direction) {}

    Direction direction() const { return direction_; }

    /// Adds `count` observations of a rule. The outcome's strip must end with
    /// the context suffix.
    void add(const RuleContext& context, const RuleOutcome& outcome, long count = 1);
    /// Registers a tag in the inventory; returns its key.
    const std::string& register_tag(const MorphTag& tag);

    bool has_tag(const MorphTag& tag) const { return tags_.count(tag.key()) > 0; }
    const MorphTag& tag(const std::string& key) const;
    const std::map<std::string, MorphTag>& tags() const { return tags_; }

    using Outcomes = std::map<RuleOutcome, long>;
    const std::map<RuleContext, Outcomes>& rules() const { return rules_; }
    const Outcomes* find(const RuleContext& context) const;
    long total(const RuleContext& context) const;
    std::size_t rule_count() const;

    /// Outcomes of one context, best first under the direction's tie-break:
    /// highest count, then smallest replacement (inflect) or smallest
    /// (tag, lemma suffix) (analyze).
    std::vector<std::pair<RuleOutcome, long>> ranked(const RuleContext& context) const;

    std::vector<RuleEntry> entries() const;

private:
    Direction direction_;
    std::map<RuleContext, Outcomes> rules_;
    std::map<RuleContext, long> totals_;
    std::map<std::string, MorphTag> tags_;
};

/// Versioned text format; see README for the column layout.
void save_rules(const SuffixRuleTable& table, const std::filesystem::path& path);
SuffixRuleTable load_rules(const std::filesystem::path& path);

/// Extracts (tag, lemma suffix) -> form suffix rules after stripping the
/// longest common prefix of lemma and form, plus backoff contexts for every
/// shorter suffix of the lemma side down to "".
SuffixRuleTable learn_inflector(std::span<const UniMorphEntry> entries);

/// Keeps one analysis per surface form (smallest tag string, then smallest
/// lemma) and extracts form suffix -> (lemma suffix, tag) rules with the
/// same backoff scheme.
SuffixRuleTable learn_analyzer(std::span<const UniMorphEntry> entries);

struct Inflection {
    std::string form;
    double log_prob = 0.0;
};

struct Analysis {
    std::string lemma;
    MorphTag tag;
    double log_prob = 0.0;
};

/// Greedy 1-best: longest matching context, then the ranked outcome order.
/// Throws UnknownTagError, or NoRuleError if nothing applies.
Inflection inflect(const SuffixRuleTable& table, std::string_view lemma, const MorphTag& tag);

/// Throws NoAnalysisError if no rule applies.
Analysis analyze(const SuffixRuleTable& table, std::string_view form);

struct HeldOutAccuracy {
    std::size_t total = 0;
    std::size_t correct = 0;

    double accuracy() const {
        return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
    }
};

/// Share of entries whose lemma and tag inflect to the listed form.
HeldOutAccuracy inflection_accuracy(const SuffixRuleTable& inflector, std::span<const UniMorphEntry> entries);

/// Share of entries whose form analyzes to a (lemma, tag) that the entries
/// list for that form; syncretic forms accept any of their analyses.
HeldOutAccuracy analysis_accuracy(const SuffixRuleTable& analyzer, std::span<const UniMorphEntry> entries);

/// Pluggable transducer interfaces used by the joint pipeline.
class Inflector {
public:
    virtual ~Inflector() = default;
    virtual Inflection inflect(std::string_view lemma, const MorphTag& tag) const = 0;
};

class Analyzer {
public:
    virtual ~Analyzer() = default;
    virtual Analysis analyze(std::string_view form) const = 0;
};

class SuffixInflector final : public Inflector {
public:
    explicit SuffixInflector(SuffixRuleTable table);
    Inflection inflect(std::string_view lemma, const MorphTag& tag) const override;
    const SuffixRuleTable& table() const { return table_; }

private:
    SuffixRuleTable table_;
};

class SuffixAnalyzer final : public Analyzer {
public:
    explicit SuffixAnalyzer(SuffixRuleTable table);
    Analysis analyze(std::string_view form) const override;
    const SuffixRuleTable& table() const { return table_; }

private:
    SuffixRuleTable table_;
};

}  // namespace morphlex
