#include "commands.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "morphlex/baseline.hpp"
#include "morphlex/embeddings.hpp"
#include "morphlex/error.hpp"
#include "morphlex/eval.hpp"
#include "morphlex/io.hpp"
#include "morphlex/morph.hpp"
#include "morphlex/pipeline.hpp"
#include "morphlex/synthetic.hpp"
#include "morphlex/translator.hpp"

namespace morphlex::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kVersion = "1.0.0";
constexpr const char* kNone = "<NONE>";

bool g_quiet = false;

void log(const std::string& msg) {
    if (!g_quiet) std::cerr << msg << '\n';
}

void log_warnings(const Warnings& warnings) {
    for (const auto& w : warnings) log("warning: " + w);
}

std::uint64_t fnv1a(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

std::string hex(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex;
    s.width(16);
    s.fill('0');
    s << v;
    return s.str();
}

std::string option_value(const CLI::Option* opt) {
    std::string out;
    for (const auto& r : opt->results()) out += (out.empty() ? "" : ",") + r;
    return out;
}

// Logs every flag whose value departs from its default.
void echo_overrides(const CLI::App& sub) {
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->count() == 0 || opt->get_default_str().empty()) continue;
        const std::string value = option_value(opt);
        if (value != opt->get_default_str()) {
            log("override: " + opt->get_name() + " = " + value + " (default " + opt->get_default_str() + ")");
        }
    }
}

struct Manifest {
    std::vector<fs::path> inputs;
    std::vector<fs::path> outputs;
    std::optional<std::uint64_t> seed;
};

// Records inputs (with size and content hash), flags, seed and versions.
void write_manifest(const CLI::App& sub, const Manifest& m, const fs::path& path) {
    nlohmann::ordered_json j;
    j["command"] = sub.get_name();
    j["version"] = kVersion;
    j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    nlohmann::ordered_json flags = nlohmann::ordered_json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_name() == "--help") continue;
        if (opt->count() > 0) {
            flags[opt->get_name()] = option_value(opt);
        } else if (!opt->get_default_str().empty()) {
            flags[opt->get_name()] = opt->get_default_str();
        }
    }
    j["flags"] = flags;
    if (m.seed) j["random_seed"] = *m.seed;
    j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& p : m.inputs) {
        std::error_code ec;
        const auto size = fs::file_size(p, ec);
        j["inputs"].push_back({{"path", p.string()}, {"bytes", ec ? 0 : size}, {"fnv1a64", hex(fnv1a(p))}});
    }
    j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& p : m.outputs) j["outputs"].push_back(p.string());
    auto out = io::open_output(path);
    out << j.dump(2) << '\n';
}

fs::path manifest_path(const fs::path& output) { return fs::path(output.string() + ".manifest.json"); }

PreprocessedSpace load_space(const fs::path& path, std::size_t vocab, const std::string& label) {
    Warnings w;
    EmbeddingSpace raw = load_augmented_space(path, vocab, &w);
    log_warnings(w);
    PreprocessedSpace p = preprocess(raw);
    log_warnings(p.warnings);
    log(label + ": " + std::to_string(p.space.size()) + " words, dim " + std::to_string(p.space.dim()));
    return p;
}

void print_kv(const std::string& key, const std::string& value) { std::cout << key << '\t' << value << '\n'; }

// ---------------------------------------------------------------- training

struct TrainTranslatorOpts {
    std::string src, tgt, seed, out, history;
    std::size_t vocab = kDefaultMaxWords;
    std::size_t normalizer = 0;
    TrainConfig config;
};

Command add_train_translator(CLI::App& app) {
    auto o = std::make_shared<TrainTranslatorOpts>();
    CLI::App* sub = app.add_subcommand("train-translator", "Train the log-bilinear lexeme translator");
    sub->add_option("--src", o->src, "Source word vectors")->required()->check(CLI::ExistingFile);
    sub->add_option("--tgt", o->tgt, "Target word vectors")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o->seed, "Seed dictionary (source<TAB>target)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o->out, "Model file to write")->required();
    sub->add_option("--alpha", o->config.alpha, "Orthogonal regularization weight");
    sub->add_option("--lr", o->config.learning_rate, "Initial Adam learning rate");
    sub->add_option("--min-lr", o->config.min_learning_rate, "Stop once the learning rate falls below this");
    sub->add_option("--batch-size", o->config.batch_size, "Mini-batch size");
    sub->add_option("--max-epochs", o->config.max_epochs, "Epoch cap (0 writes the initial model)");
    sub->add_option("--dev-fraction", o->config.dev_fraction, "Share of seed pairs held out for the schedule");
    sub->add_option("--random-seed", o->config.seed, "Seed for shuffling and initialization");
    sub->add_option("--vocab", o->vocab, "Keep the first N words of each vector file");
    sub->add_option("--normalizer-vocab", o->normalizer, "Softmax support size (0 = whole target space)");
    sub->add_option("--history", o->history, "Write per-epoch losses as TSV");
    return {sub, [o, sub] {
                echo_overrides(*sub);
                try {
                    o->config.validate();
                } catch (const Error& e) {
                    throw UsageError(e.what());
                }
                const auto source = load_space(o->src, o->vocab, "source");
                const auto target = load_space(o->tgt, o->vocab, "target");
                const auto seed = load_seed_dictionary(o->seed);
                const TrainResult r = train(seed, source.space, target.space, o->config, o->normalizer);
                save_model(r.model, o->out);
                save_metadata({source.mean, target.mean, source.space.size(), target.space.size()},
                              metadata_path(o->out));
                Manifest m{{o->src, o->tgt, o->seed}, {o->out, metadata_path(o->out)}, o->config.seed};
                if (!o->history.empty()) {
                    auto h = io::open_output(o->history);
                    h << "epoch\ttrain_loss\tdev_loss\tlearning_rate\n";
                    for (const auto& e : r.history) {
                        h << e.epoch << '\t' << io::format_double(e.train_loss) << '\t'
                          << io::format_double(e.dev_loss) << '\t' << io::format_double(e.learning_rate) << '\n';
                    }
                    m.outputs.emplace_back(o->history);
                }
                write_manifest(*sub, m, manifest_path(o->out));
                print_kv("pairs_used", std::to_string(r.pairs_used));
                print_kv("pairs_dropped", std::to_string(r.pairs_dropped));
                print_kv("epochs_run", std::to_string(r.epochs_run));
                print_kv("best_epoch", std::to_string(r.best_epoch));
                print_kv("dev_loss", io::format_double(r.best_dev_loss));
            }};
}

struct ProcrustesOpts {
    std::string src, tgt, seed, out;
    std::size_t vocab = kDefaultMaxWords;
};

Command add_fit_procrustes(CLI::App& app) {
    auto o = std::make_shared<ProcrustesOpts>();
    CLI::App* sub = app.add_subcommand("fit-procrustes", "Fit the orthogonal Procrustes baseline");
    sub->add_option("--src", o->src, "Source word vectors")->required()->check(CLI::ExistingFile);
    sub->add_option("--tgt", o->tgt, "Target word vectors")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o->seed, "Seed dictionary (source<TAB>target)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o->out, "Model file to write")->required();
    sub->add_option("--vocab", o->vocab, "Keep the first N words of each vector file");
    return {sub, [o, sub] {
                echo_overrides(*sub);
                const auto source = load_space(o->src, o->vocab, "source");
                const auto target = load_space(o->tgt, o->vocab, "target");
                const auto seed = load_seed_dictionary(o->seed);
                const ProcrustesResult r = procrustes_fit(seed, source.space, target.space);
                log_warnings(r.warnings);
                save_model(r.model, o->out);
                save_metadata({source.mean, target.mean, source.space.size(), target.space.size()},
                              metadata_path(o->out));
                write_manifest(*sub, {{o->src, o->tgt, o->seed}, {o->out, metadata_path(o->out)}, std::nullopt},
                               manifest_path(o->out));
                print_kv("pairs_used", std::to_string(r.pairs_used));
                print_kv("pairs_dropped", std::to_string(r.pairs_dropped));
            }};
}

struct TrainMorphOpts {
    std::string unimorph, exclude, exclude_side = "source", analyzer_out, inflector_out, dev;
};

Command add_train_morph(CLI::App& app) {
    auto o = std::make_shared<TrainMorphOpts>();
    CLI::App* sub = app.add_subcommand("train-morph", "Learn suffix-rule analyzer and inflector tables");
    sub->add_option("--unimorph", o->unimorph, "Training paradigms (lemma<TAB>form<TAB>tag)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--exclude", o->exclude, "Evaluation dictionary whose forms are left out")
        ->check(CLI::ExistingFile);
    sub->add_option("--exclude-side", o->exclude_side, "Dictionary column to exclude: source or target")
        ->check(CLI::IsMember({"source", "target"}));
    sub->add_option("--analyzer-out", o->analyzer_out, "Analyzer rule file to write");
    sub->add_option("--inflector-out", o->inflector_out, "Inflector rule file to write");
    sub->add_option("--dev", o->dev, "Held-out paradigms for an accuracy report")->check(CLI::ExistingFile);
    return {sub, [o, sub] {
                echo_overrides(*sub);
                if (o->analyzer_out.empty() && o->inflector_out.empty()) {
                    throw UsageError("train-morph needs --analyzer-out and/or --inflector-out");
                }
                auto entries = load_unimorph(o->unimorph);
                Manifest m{{o->unimorph}, {}, std::nullopt};
                if (!o->exclude.empty()) {
                    const auto dict = load_eval_dictionary(o->exclude);
                    std::set<std::string> forms;
                    for (const auto& e : dict.entries) {
                        if (o->exclude_side == "source") {
                            forms.insert(e.source);
                        } else {
                            forms.insert(e.gold.begin(), e.gold.end());
                        }
                    }
                    const std::size_t before = entries.size();
                    entries = exclude_forms(entries, forms);
                    log("excluded " + std::to_string(before - entries.size()) + " entries");
                    m.inputs.emplace_back(o->exclude);
                }
                if (entries.empty()) throw DataError("no training entries left after exclusion");
                std::vector<UniMorphEntry> dev;
                if (!o->dev.empty()) {
                    dev = load_unimorph(o->dev);
                    m.inputs.emplace_back(o->dev);
                }
                print_kv("training_entries", std::to_string(entries.size()));
                if (!o->analyzer_out.empty()) {
                    const auto table = learn_analyzer(entries);
                    save_rules(table, o->analyzer_out);
                    m.outputs.emplace_back(o->analyzer_out);
                    print_kv("analyzer_rules", std::to_string(table.rule_count()));
                    if (!dev.empty()) print_kv("analysis_accuracy", io::format_double(analysis_accuracy(table, dev).accuracy()));
                }
                if (!o->inflector_out.empty()) {
                    const auto table = learn_inflector(entries);
                    save_rules(table, o->inflector_out);
                    m.outputs.emplace_back(o->inflector_out);
                    print_kv("inflector_rules", std::to_string(table.rule_count()));
                    if (!dev.empty()) {
                        print_kv("inflection_accuracy", io::format_double(inflection_accuracy(table, dev).accuracy()));
                    }
                }
                write_manifest(*sub, m, manifest_path(m.outputs.front()));
            }};
}

// ------------------------------------------------------------- translation

struct SystemOpts {
    std::string src, tgt, model, analyzer, inflector, ngrams;
    std::string mode = "base";
    std::size_t vocab = kDefaultMaxWords;
};

void add_system_options(CLI::App* sub, SystemOpts& o) {
    sub->add_option("--src", o.src, "Source word vectors")->required()->check(CLI::ExistingFile);
    sub->add_option("--tgt", o.tgt, "Target word vectors")->required()->check(CLI::ExistingFile);
    sub->add_option("--model", o.model, "Translator or Procrustes model file")->required()->check(CLI::ExistingFile);
    sub->add_option("--analyzer", o.analyzer, "Source analyzer rule file")->check(CLI::ExistingFile);
    sub->add_option("--inflector", o.inflector, "Target inflector rule file")->check(CLI::ExistingFile);
    sub->add_option("--ngrams", o.ngrams, "Source character n-gram vectors for unseen forms")
        ->check(CLI::ExistingFile);
    sub->add_option("--mode", o.mode, "base, hybrid, oracle or direct")
        ->check(CLI::IsMember({"base", "hybrid", "oracle", "direct"}));
    sub->add_option("--vocab", o.vocab, "Keep the first N words of each vector file");
}

// Loaded components; heap-allocated because the joint model points into it.
struct System {
    Mode mode = Mode::base;
    PreprocessedSpace source;
    PreprocessedSpace target;
    TranslationModel model;
    std::optional<SuffixAnalyzer> analyzer;
    std::optional<SuffixInflector> inflector;
    std::optional<NgramTable> ngrams;
    std::optional<SourceLookup> lookup;
    std::optional<JointModel> joint;

    TranslationCandidate translate(std::string_view form, const std::string* lemma, const MorphTag* tag) const {
        switch (mode) {
            case Mode::base: return joint->translate_base(form);
            case Mode::hybrid: return joint->translate_hybrid(form);
            case Mode::direct: return joint->translate_direct(form);
            case Mode::oracle: return joint->translate_oracle(form, *lemma, *tag);
        }
        throw Error("unknown mode");
    }
};

std::unique_ptr<System> build_system(const SystemOpts& o, Manifest& m) {
    auto s = std::make_unique<System>();
    s->mode = parse_mode(o.mode);
    const bool needs_analyzer = s->mode == Mode::base || s->mode == Mode::hybrid;
    const bool needs_inflector = needs_analyzer || s->mode == Mode::oracle;
    if (needs_analyzer && o.analyzer.empty()) throw UsageError("mode " + o.mode + " needs --analyzer");
    if (needs_inflector && o.inflector.empty()) throw UsageError("mode " + o.mode + " needs --inflector");

    s->source = load_space(o.src, o.vocab, "source");
    s->target = load_space(o.tgt, o.vocab, "target");
    s->model = load_model(o.model);
    m.inputs.insert(m.inputs.end(), {o.src, o.tgt, o.model});
    Vector mean = s->source.mean;
    if (fs::exists(metadata_path(o.model))) {
        const ModelMetadata meta = load_metadata(metadata_path(o.model));
        if (meta.source_mean.size() == mean.size()) mean = meta.source_mean;
        if (meta.source_vocab != 0 && meta.source_vocab != s->source.space.size()) {
            log("warning: model was trained on " + std::to_string(meta.source_vocab) + " source words, " +
                std::to_string(s->source.space.size()) + " loaded");
        }
        m.inputs.push_back(metadata_path(o.model));
    }
    if (needs_analyzer) {
        s->analyzer.emplace(load_rules(o.analyzer));
        m.inputs.emplace_back(o.analyzer);
    }
    if (needs_inflector) {
        s->inflector.emplace(load_rules(o.inflector));
        m.inputs.emplace_back(o.inflector);
    }
    if (!o.ngrams.empty()) {
        s->ngrams = load_ngram_table(o.ngrams, s->source.space.dim());
        s->lookup.emplace(s->source.space, *s->ngrams, mean);
        m.inputs.emplace_back(o.ngrams);
    } else {
        s->lookup.emplace(s->source.space);
    }
    s->joint.emplace(JointComponents{s->analyzer ? &*s->analyzer : nullptr, &s->model, &*s->lookup,
                                     &s->target.space, s->inflector ? &*s->inflector : nullptr});
    return s;
}

struct TranslateOpts {
    SystemOpts system;
    std::string input = "-", output = "-";
};

Command add_translate(CLI::App& app) {
    auto o = std::make_shared<TranslateOpts>();
    CLI::App* sub = app.add_subcommand("translate", "Translate source forms, one per line");
    add_system_options(sub, o->system);
    sub->add_option("--input", o->input, "Input file, or - for stdin (oracle mode: form<TAB>lemma<TAB>tag)");
    sub->add_option("--output", o->output, "Output file, or - for stdout");
    return {sub, [o, sub] {
                echo_overrides(*sub);
                Manifest m;
                const auto system = build_system(o->system, m);
                std::ifstream file_in;
                std::ofstream file_out;
                if (o->input != "-") {
                    file_in = io::open_input(o->input);
                    m.inputs.emplace_back(o->input);
                }
                if (o->output != "-") {
                    file_out = io::open_output(o->output);
                    m.outputs.emplace_back(o->output);
                }
                std::istream& in = o->input == "-" ? std::cin : file_in;
                std::ostream& out = o->output == "-" ? std::cout : file_out;

                std::size_t line_no = 0, lemma_routes = 0, direct_routes = 0, failed = 0;
                std::string line;
                while (std::getline(in, line)) {
                    ++line_no;
                    io::chomp(line);
                    if (io::trim(line).empty()) continue;
                    const auto fields = io::split(line, '\t');
                    const std::string form(io::trim(fields[0]));
                    try {
                        TranslationCandidate c;
                        if (system->mode == Mode::oracle) {
                            if (fields.size() != 3) {
                                throw FormatError("line " + std::to_string(line_no) +
                                                  ": oracle mode expects form<TAB>lemma<TAB>tag");
                            }
                            const std::string lemma(io::trim(fields[1]));
                            const MorphTag tag = parse_tag(fields[2]);
                            c = system->translate(form, &lemma, &tag);
                        } else {
                            c = system->translate(form, nullptr, nullptr);
                        }
                        (c.route == Route::lemma ? lemma_routes : direct_routes) += 1;
                        out << form << '\t' << c.form << '\t' << to_string(c.route) << '\t'
                            << io::format_double(JointModel::joint_log_prob(c)) << '\n';
                    } catch (const Error& e) {
                        ++failed;
                        log("warning: " + std::string(e.what()));
                        out << form << '\t' << kNone << '\t' << "none" << '\t' << '-' << '\n';
                    }
                }
                out.flush();
                log("translated " + std::to_string(lemma_routes + direct_routes) + " forms (" +
                    std::to_string(lemma_routes) + " via lemma, " + std::to_string(direct_routes) +
                    " direct), " + std::to_string(failed) + " untranslatable");
                if (o->output != "-") write_manifest(*sub, m, manifest_path(o->output));
            }};
}

struct EvaluateOpts {
    SystemOpts system;
    std::string dict, report;
    BinOptions bins;
    std::size_t min_tag_count = 5;
};

Command add_evaluate(CLI::App& app) {
    auto o = std::make_shared<EvaluateOpts>();
    CLI::App* sub = app.add_subcommand("evaluate", "Precision@1 with frequency and tag breakdowns");
    add_system_options(sub, o->system);
    sub->add_option("--dict", o->dict, "Evaluation dictionary (source<TAB>target[<TAB>tag[<TAB>lemma]])")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--report", o->report, "Report prefix; writes .summary.tsv, .bins.tsv, .tags.tsv, ...")
        ->required();
    sub->add_option("--bin-width", o->bins.bin_width, "Frequency bin width in ranks")->check(CLI::PositiveNumber);
    sub->add_option("--num-bins", o->bins.num_bins, "Number of frequency bins before the overflow bin");
    sub->add_option("--min-tag-count", o->min_tag_count, "Tags with fewer entries are flagged low-support");
    return {sub, [o, sub] {
                echo_overrides(*sub);
                Manifest m;
                const auto system = build_system(o->system, m);
                const auto dict = load_eval_dictionary(o->dict);
                m.inputs.emplace_back(o->dict);
                if (system->mode == Mode::oracle) {
                    for (const auto& e : dict.entries) {
                        if (!e.lemma || !e.tag) {
                            throw DataError("oracle evaluation needs a tag and lemma for '" + e.source + "'");
                        }
                    }
                }
                const TranslationSystem run = [&](const EvalEntry& e) -> std::optional<std::string> {
                    try {
                        const std::string* lemma = e.lemma ? &*e.lemma : nullptr;
                        const MorphTag* tag = e.tag ? &*e.tag : nullptr;
                        return system->translate(e.source, lemma, tag).form;
                    } catch (const Error&) {
                        return std::nullopt;
                    }
                };
                const EvalReport report = precision_at_1(run, dict, system->source.space, o->bins, o->min_tag_count);
                write_report(report, o->report);
                for (const char* ext : {".summary.tsv", ".bins.tsv", ".predictions.tsv", ".json"}) {
                    m.outputs.emplace_back(o->report + ext);
                }
                if (!report.tags.empty()) m.outputs.emplace_back(o->report + ".tags.tsv");
                write_manifest(*sub, m, o->report + ".manifest.json");
                std::cout << summary_tsv(report);
            }};
}

// -------------------------------------------------------------- utilities

struct ExtractSeedOpts {
    std::string src, tgt, out;
    std::size_t vocab = kDefaultMaxWords;
};

Command add_extract_seed(CLI::App& app) {
    auto o = std::make_shared<ExtractSeedOpts>();
    CLI::App* sub = app.add_subcommand("extract-seed", "Seed dictionary of identically spelled words");
    sub->add_option("--src", o->src, "Source word vectors")->required()->check(CLI::ExistingFile);
    sub->add_option("--tgt", o->tgt, "Target word vectors")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o->out, "Seed dictionary to write")->required();
    sub->add_option("--vocab", o->vocab, "Keep the first N words of each vector file");
    return {sub, [o, sub] {
                echo_overrides(*sub);
                Warnings w;
                const auto source = load_augmented_space(o->src, o->vocab, &w);
                const auto target = load_augmented_space(o->tgt, o->vocab, &w);
                log_warnings(w);
                const auto seed = extract_identical_seed(source, target);
                save_seed_dictionary(seed, o->out);
                write_manifest(*sub, {{o->src, o->tgt}, {o->out}, std::nullopt}, manifest_path(o->out));
                print_kv("pairs", std::to_string(seed.size()));
            }};
}

struct ComposeOpts {
    std::string vec, ngrams, words, out;
    std::size_t vocab = kDefaultMaxWords;
    std::size_t min_n = 3, max_n = 6;
};

Command add_compose_oov(CLI::App& app) {
    auto o = std::make_shared<ComposeOpts>();
    CLI::App* sub = app.add_subcommand("compose-oov", "Append n-gram vectors for unseen words to a copy of a space");
    sub->add_option("--vec", o->vec, "Word vectors")->required()->check(CLI::ExistingFile);
    sub->add_option("--ngrams", o->ngrams, "Character n-gram vectors")->required()->check(CLI::ExistingFile);
    sub->add_option("--words", o->words, "Words to compose, one per line")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o->out, "Augmented vector file (composed rows are listed in a sidecar)")->required();
    sub->add_option("--vocab", o->vocab, "Keep the first N words of the vector file");
    sub->add_option("--min-n", o->min_n, "Shortest n-gram");
    sub->add_option("--max-n", o->max_n, "Longest n-gram");
    return {sub, [o, sub] {
                echo_overrides(*sub);
                if (o->min_n == 0 || o->min_n > o->max_n) throw UsageError("need 0 < --min-n <= --max-n");
                Warnings w;
                const auto space = load_augmented_space(o->vec, o->vocab, &w);
                log_warnings(w);
                const auto table = load_ngram_table(o->ngrams, space.dim());
                auto in = io::open_input(o->words);
                std::vector<std::pair<std::string, Vector>> extra;
                std::set<std::string> seen;
                std::size_t failed = 0;
                std::string line;
                while (std::getline(in, line)) {
                    io::chomp(line);
                    const std::string word(io::trim(line));
                    if (word.empty() || space.contains(word) || !seen.insert(word).second) continue;
                    try {
                        extra.emplace_back(word, compose_oov(word, table, {o->min_n, o->max_n}));
                    } catch (const CompositionError& e) {
                        ++failed;
                        log("warning: " + std::string(e.what()));
                    }
                }
                save_augmented_space(space.with_composed(extra), o->out);
                Manifest m{{o->vec, o->ngrams, o->words}, {o->out}, std::nullopt};
                if (!extra.empty()) m.outputs.push_back(composed_sidecar_path(o->out));
                write_manifest(*sub, m, manifest_path(o->out));
                print_kv("composed", std::to_string(extra.size()));
                print_kv("failed", std::to_string(failed));
            }};
}

struct SynthOpts {
    std::string out_dir;
    synthetic::Config config;
    synthetic::SplitConfig split;
};

Command add_synth(CLI::App& app) {
    auto o = std::make_shared<SynthOpts>();
    CLI::App* sub = app.add_subcommand("synth", "Generate a synthetic bilingual benchmark");
    sub->add_option("--out-dir", o->out_dir, "Directory for the generated files")->required();
    sub->add_option("--lexemes", o->config.lexemes, "Number of lexemes")->check(CLI::PositiveNumber);
    sub->add_option("--dim", o->config.dim, "Embedding dimension")->check(CLI::PositiveNumber);
    sub->add_option("--zipf", o->config.zipf_exponent, "Zipf exponent of lexeme frequencies");
    sub->add_option("--noise-min", o->config.noise_min, "Vector noise of the most frequent form");
    sub->add_option("--noise-max", o->config.noise_max, "Vector noise of the rarest form");
    sub->add_option("--irregular-fraction", o->config.irregular_fraction, "Share of lexemes with a suppletive form")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--test-fraction", o->split.test_lexeme_fraction, "Share of lexemes held out for testing")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--top-forms", o->split.top_forms, "Seed pairs also cover forms ranked below this");
    sub->add_option("--random-seed", o->config.seed, "Generator seed");
    return {sub, [o, sub] {
                echo_overrides(*sub);
                const fs::path dir = o->out_dir;
                fs::create_directories(dir);
                o->split.seed = o->config.seed + 1;
                const auto lex = synthetic::generate(o->config);
                const auto bench = synthetic::split(lex, o->split);
                save_vec_file(lex.source.space, dir / "src.vec");
                save_vec_file(lex.target.space, dir / "tgt.vec");
                save_seed_dictionary(bench.seed, dir / "seed.tsv");
                save_eval_dictionary(bench.test, dir / "test.tsv");
                save_unimorph(lex.source.entries, dir / "src.unimorph.tsv");
                save_unimorph(lex.target.entries, dir / "tgt.unimorph.tsv");
                Manifest m{{}, {}, o->config.seed};
                for (const char* f : {"src.vec", "tgt.vec", "seed.tsv", "test.tsv", "src.unimorph.tsv", "tgt.unimorph.tsv"}) {
                    m.outputs.push_back(dir / f);
                }
                write_manifest(*sub, m, dir / "synth.manifest.json");
                print_kv("source_words", std::to_string(lex.source.space.size()));
                print_kv("target_words", std::to_string(lex.target.space.size()));
                print_kv("seed_pairs", std::to_string(bench.seed.size()));
                print_kv("test_entries", std::to_string(bench.test.entries.size()));
            }};
}

}  // namespace

std::vector<Command> register_commands(CLI::App& app) {
    app.add_flag("-q,--quiet", g_quiet, "Only print results and errors");
    app.set_config("--config", "", "Read flags from an INI or TOML file");
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    return {add_train_translator(app), add_train_morph(app), add_translate(app), add_evaluate(app),
            add_extract_seed(app),     add_compose_oov(app), add_fit_procrustes(app), add_synth(app)};
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const UsageError*>(&e)) return kUsage;
    if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const UntranslatableError*>(&e) ||
        dynamic_cast<const CompositionError*>(&e)) {
        return kUnusable;
    }
    return kFormat;
}

}  // namespace morphlex::cli
