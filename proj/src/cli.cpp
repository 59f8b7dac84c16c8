#include "topicaudit/cli.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "topicaudit/coherence.hpp"
#include "topicaudit/corpus.hpp"
#include "topicaudit/curate.hpp"
#include "topicaudit/error.hpp"
#include "topicaudit/eval.hpp"
#include "topicaudit/experiments.hpp"
#include "topicaudit/lda.hpp"
#include "topicaudit/metrics.hpp"
#include "topicaudit/parallel.hpp"
#include "topicaudit/sha256.hpp"
#include "topicaudit/synth.hpp"
#include "topicaudit/textprep.hpp"
#include "topicaudit/triage.hpp"

namespace topicaudit {
namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << content;
    if (!out.good()) throw DataError("short write to " + path);
}

// Shared flags every subcommand can take (before or after its name).
struct GlobalOpts {
    std::size_t threads = 0;  // 0 -> TOPICAUDIT_THREADS -> 1
    std::uint64_t seed = 42;
    bool stamp = false;  // timestamps are opt-in so reruns stay byte-identical
};

std::string iso_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// Sidecar recording what produced <out_path>: command, seed, input hashes
// and the command-specific knobs.
void write_provenance(const std::string& out_path, const std::string& command,
                      const GlobalOpts& g, const json& inputs, const json& spec) {
    json j{{"command", command}, {"seed", g.seed}, {"inputs", inputs}, {"spec", spec}};
    if (g.stamp) j["generated_at"] = iso_now();
    spit(out_path + ".provenance.json", j.dump(2) + "\n");
}

void save_assignments(const std::vector<TopicAssignment>& assignments,
                      const std::string& path) {
    std::ostringstream out;
    for (const TopicAssignment& a : assignments) {
        json j{{"doc_id", a.doc_id}, {"dominant", a.dominant}, {"theta", a.theta}};
        out << j.dump() << "\n";
    }
    spit(path, out.str());
}

std::vector<TopicAssignment> load_assignments(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::vector<TopicAssignment> assignments;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.contains("doc_id") || !j.contains("dominant") || !j.contains("theta"))
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": assignment needs doc_id, dominant and theta");
        TopicAssignment a;
        a.doc_id = j["doc_id"].get<std::string>();
        a.dominant = j["dominant"].get<std::size_t>();
        a.theta = j["theta"].get<std::vector<double>>();
        assignments.push_back(std::move(a));
    }
    return assignments;
}

// "2,3,4", "2:10" or "10:30:5" (inclusive ends)
std::vector<std::size_t> parse_grid(const std::string& text) {
    std::vector<std::size_t> grid;
    if (text.find(':') != std::string::npos) {
        std::size_t lo = 0, hi = 0, step = 1;
        int n = std::sscanf(text.c_str(), "%zu:%zu:%zu", &lo, &hi, &step);
        if (n < 2 || lo == 0 || hi < lo || step == 0)
            throw UsageError("bad grid '" + text + "' (want lo:hi or lo:hi:step)");
        for (std::size_t k = lo; k <= hi; k += step) grid.push_back(k);
        return grid;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        unsigned long v = std::stoul(item, &pos);
        if (pos != item.size() || v == 0) throw UsageError("bad grid entry '" + item + "'");
        grid.push_back(v);
    }
    if (grid.empty()) throw UsageError("empty grid");
    return grid;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        double v = std::stod(item, &pos);
        if (pos != item.size() || v <= 0) throw UsageError("bad list entry '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
}

std::set<int> parse_category_set(const std::string& text) {
    std::set<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        int v = std::stoi(item, &pos);
        if (pos != item.size() || v < 1 || v > 3)
            throw UsageError("bad category '" + item + "' (want 1, 2 or 3)");
        out.insert(v);
    }
    if (out.empty()) throw UsageError("no categories given");
    return out;
}

// tokenizer knobs shared by every command that reads raw text
struct TokOpts {
    std::string stopwords_path;
    bool no_stem = false;

    TokenizerConfig make() const {
        TokenizerConfig cfg;
        if (!stopwords_path.empty())
            cfg.stopwords = std::make_shared<StopwordSet>(load_stopwords(stopwords_path));
        cfg.stem = !no_stem;
        return cfg;
    }
};

void add_tok_opts(CLI::App* cmd, TokOpts& t) {
    cmd->add_option("--stopwords", t.stopwords_path, "stopword file, one word per line");
    cmd->add_flag("--no-stem", t.no_stem, "skip the stemmer");
}

struct LdaOpts {
    LdaConfig cfg;

    LdaConfig make(std::uint64_t seed) const {
        LdaConfig c = cfg;
        c.seed = seed;
        c.validate();
        return c;
    }
};

void add_lda_opts(CLI::App* cmd, LdaOpts& l, bool with_k) {
    if (with_k) cmd->add_option("--k", l.cfg.k, "number of topics")->required();
    cmd->add_option("--alpha", l.cfg.alpha, "doc-topic prior; <=0 means 1/K");
    cmd->add_option("--eta", l.cfg.eta, "topic-word prior; <=0 means 1/K");
    cmd->add_option("--chunk-size", l.cfg.chunk_size, "docs per online update");
    cmd->add_option("--kappa", l.cfg.kappa, "learning-rate decay, in [0.5, 1]");
    cmd->add_option("--tau0", l.cfg.tau0, "learning-rate offset");
    cmd->add_option("--passes", l.cfg.passes, "passes over the corpus");
    cmd->add_option("--e-iters", l.cfg.e_step_max_iters, "max E-step iterations");
    cmd->add_flag("--shuffle", l.cfg.shuffle, "shuffle document order before chunking");
}

struct HarnessOpts {
    FeatConfig features;
    TrainMeta trainer;
    std::string ngrams = "1,2";

    HarnessConfig make(const TokOpts& tok, const GlobalOpts& g) const {
        HarnessConfig hc;
        hc.tokenizer = tok.make();
        hc.features = features;
        hc.features.ngram_orders.clear();
        for (double v : parse_double_list(ngrams))
            hc.features.ngram_orders.insert(static_cast<int>(v));
        hc.features.validate();
        hc.trainer = trainer;
        hc.threads = resolve_threads(g.threads);
        return hc;
    }
};

void add_harness_opts(CLI::App* cmd, HarnessOpts& h) {
    cmd->add_option("--dims", h.features.n_hash_dims, "hashed feature dimensions (power of 2)");
    cmd->add_option("--ngrams", h.ngrams, "n-gram orders, e.g. 1,2");
    cmd->add_flag("--no-tfidf", [&h](std::int64_t) { h.features.tfidf = false; },
                  "use raw signed counts");
    cmd->add_option("--epochs", h.trainer.epochs, "SGD epochs");
    cmd->add_option("--l2", h.trainer.l2, "L2 strength");
    cmd->add_option("--lr", h.trainer.base_lr, "base learning rate");
}

// corpus -> tokens -> bows against a saved vocabulary
struct PreparedCorpus {
    Corpus corpus;
    std::vector<std::vector<std::string>> tokens;
    std::vector<BowDoc> bows;
};

PreparedCorpus prepare(const std::string& corpus_path, const Vocabulary& vocab,
                       const TokOpts& tok, const GlobalOpts& g) {
    PreparedCorpus p;
    p.corpus = load_canonical(corpus_path);
    p.tokens = tokenize_corpus(p.corpus, tok.make(), resolve_threads(g.threads));
    p.bows = to_bow_corpus(p.tokens, vocab, resolve_threads(g.threads));
    return p;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        spit(out_path, text);
}

// ---------------------------------------------------------------- ingest

struct IngestOpts {
    std::string input, format = "csv", out, name, source, mapping;
    IngestSchema schema;
};

void run_ingest(const IngestOpts& o, const GlobalOpts& g) {
    std::string name = o.name;
    if (name.empty()) {
        // default to the file stem
        std::size_t slash = o.input.find_last_of('/');
        std::string base = slash == std::string::npos ? o.input : o.input.substr(slash + 1);
        std::size_t dot = base.find_last_of('.');
        name = dot == std::string::npos ? base : base.substr(0, dot);
    }
    Corpus corpus =
        load_corpus(o.input, format_from_string(o.format), o.schema, name, o.source);
    std::cout << name << ": " << corpus.size() << " documents\n";
    for (const auto& [label, count] : corpus.label_counts())
        std::cout << "  " << label << "  " << count << "\n";
    json spec{{"format", o.format},
              {"name", name},
              {"text_field", o.schema.text},
              {"label_field", o.schema.label}};
    json inputs{{"input", sha256_file_hex(o.input)}};
    if (!o.mapping.empty()) {
        LabelMapping mapping = LabelMapping::load(o.mapping);
        corpus = binarize_labels(corpus, mapping);
        inputs["mapping"] = sha256_file_hex(o.mapping);
        std::cout << "after mapping: " << corpus.size() << " documents";
        auto binary = corpus.binary_counts();
        std::cout << " (toxic " << binary[Label::Toxic] << ", normal "
                  << binary[Label::Normal] << ")\n";
    }
    save_canonical(corpus, o.out);
    write_provenance(o.out, "ingest", g, inputs, spec);
}

// ------------------------------------------------------------------ prep

struct PrepOpts {
    std::string corpus, out;
    TokOpts tok;
    VocabFilter filter;
};

void run_prep(const PrepOpts& o, const GlobalOpts& g) {
    Corpus corpus = load_canonical(o.corpus);
    auto tokens = tokenize_corpus(corpus, o.tok.make(), resolve_threads(g.threads));
    Vocabulary vocab = build_vocabulary(tokens, o.filter);
    vocab.save(o.out);
    std::cout << "vocabulary: " << vocab.size() << " terms, hash "
              << vocab.content_hash().substr(0, 12) << "\n";
    write_provenance(o.out, "prep", g, json{{"corpus", sha256_file_hex(o.corpus)}},
                     json{{"min_doc_freq", o.filter.min_doc_freq},
                          {"max_doc_fraction", o.filter.max_doc_fraction},
                          {"max_terms", o.filter.max_terms},
                          {"stem", !o.tok.no_stem}});
}

// ---------------------------------------------------------------- scan-k

struct ScanOpts {
    std::string corpus, vocab, grid = "2:10", out_csv, out_json;
    std::size_t seeds = 3;
    TokOpts tok;
    LdaOpts lda;
    CoherenceConfig coherence;
};

void run_scan(const ScanOpts& o, const GlobalOpts& g) {
    Vocabulary vocab = Vocabulary::load(o.vocab);
    PreparedCorpus p = prepare(o.corpus, vocab, o.tok, g);
    std::vector<std::size_t> grid = parse_grid(o.grid);
    if (o.seeds == 0) throw UsageError("need at least one seed");
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < o.seeds; ++i) seeds.push_back(g.seed + i);
    ScanResult result = scan_topic_counts(p.bows, vocab, p.tokens, grid, o.lda.make(g.seed),
                                          o.coherence, seeds, resolve_threads(g.threads));
    std::cout << scan_csv(result) << "best K: " << result.best_k << "\n";
    json inputs{{"corpus", sha256_file_hex(o.corpus)}, {"vocab", sha256_file_hex(o.vocab)}};
    json spec{{"grid", grid}, {"seeds", o.seeds}};
    if (!o.out_csv.empty()) {
        spit(o.out_csv, scan_csv(result));
        write_provenance(o.out_csv, "scan-k", g, inputs, spec);
    }
    if (!o.out_json.empty()) {
        spit(o.out_json, scan_json(result));
        write_provenance(o.out_json, "scan-k", g, inputs, spec);
    }
}

// ------------------------------------------------------------- lda-train

struct TrainOpts {
    std::string corpus, vocab, out;
    TokOpts tok;
    LdaOpts lda;
    bool elbo = false;
};

void run_lda_train(const TrainOpts& o, const GlobalOpts& g) {
    Vocabulary vocab = Vocabulary::load(o.vocab);
    PreparedCorpus p = prepare(o.corpus, vocab, o.tok, g);
    LdaConfig cfg = o.lda.make(g.seed);
    TopicModel model = train(p.bows, vocab, cfg, resolve_threads(g.threads));
    save_model(model, o.out);
    std::cout << "trained K=" << model.k() << " on " << p.bows.size() << " documents, "
              << model.updates_seen() << " updates\n";
    if (o.elbo) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.6f", elbo_per_word(model, p.bows));
        std::cout << "elbo/word: " << buf << "\n";
    }
    write_provenance(o.out, "lda-train", g,
                     json{{"corpus", sha256_file_hex(o.corpus)},
                          {"vocab", sha256_file_hex(o.vocab)}},
                     json{{"k", cfg.k},
                          {"alpha", cfg.resolved_alpha()},
                          {"eta", cfg.resolved_eta()},
                          {"chunk_size", cfg.chunk_size},
                          {"kappa", cfg.kappa},
                          {"tau0", cfg.tau0},
                          {"passes", cfg.passes},
                          {"shuffle", cfg.shuffle}});
}

// ---------------------------------------------------------------- assign

struct AssignOpts {
    std::string corpus, vocab, model, out;
    TokOpts tok;
};

void run_assign(const AssignOpts& o, const GlobalOpts& g) {
    Vocabulary vocab = Vocabulary::load(o.vocab);
    TopicModel model = load_model(o.model);
    require_vocab(model, vocab);
    PreparedCorpus p = prepare(o.corpus, vocab, o.tok, g);
    auto assignments = assign_corpus(model, p.corpus, p.bows, resolve_threads(g.threads));
    save_assignments(assignments, o.out);
    std::cout << "assigned " << assignments.size() << " documents to " << model.k()
              << " topics\n";
    write_provenance(o.out, "assign", g,
                     json{{"corpus", sha256_file_hex(o.corpus)},
                          {"vocab", sha256_file_hex(o.vocab)},
                          {"model", sha256_file_hex(o.model)}},
                     json{{"k", model.k()}});
}

// ---------------------------------------------------- report-topics

struct ReportOpts {
    std::string corpus, vocab, model, assignments, out, out_json;
    std::size_t top_n = 10;
};

std::vector<TopicStats> build_report(const ReportOpts& o, TopicModel* model_out = nullptr) {
    Vocabulary vocab = Vocabulary::load(o.vocab);
    TopicModel model = load_model(o.model);
    require_vocab(model, vocab);
    Corpus corpus = load_canonical(o.corpus);
    auto assignments = load_assignments(o.assignments);
    auto report = topic_report(model, vocab, assignments, corpus, o.top_n);
    if (model_out) *model_out = std::move(model);
    return report;
}

void run_report_topics(const ReportOpts& o, const GlobalOpts&) {
    auto report = build_report(o);
    emit(render_topic_report(report), o.out);
    if (!o.out_json.empty()) spit(o.out_json, topic_report_json(report));
}

// ---------------------------------------------------------------- triage

struct TriageOpts {
    ReportOpts report;
    std::string map;
    bool resume = false;
};

void run_triage(const TriageOpts& o, const GlobalOpts&) {
    auto report = build_report(o.report);
    std::string model_hash = sha256_file_hex(o.report.model);
    CategoryMap existing;
    bool have_existing = false;
    if (o.resume) {
        existing = load_category_map(o.map);
        if (existing.model_hash != model_hash)
            throw DataError("category map " + o.map + " was made for a different model");
        have_existing = true;
    }
    CategoryMap result =
        interactive_triage(report, have_existing ? &existing : nullptr, std::cin, std::cout);
    result.model_hash = model_hash;
    save_category_map(result, o.map);
    PruneImpact impact = prune_impact(result, report);
    std::cout << "saved " << o.map << (result.complete ? "" : " (incomplete)") << "\n"
              << "current actions would drop " << impact.docs_removed << " of "
              << impact.total_docs << " documents (" << impact.toxic_removed << " of "
              << impact.total_toxic << " toxic)\n";
}

// ---------------------------------------------------------- distribution

struct DistOpts {
    std::string corpus, assignments, map, out;
};

void run_distribution(const DistOpts& o, const GlobalOpts&) {
    Corpus corpus = load_canonical(o.corpus);
    auto assignments = load_assignments(o.assignments);
    CategoryMap map = load_category_map(o.map);
    emit(render_category_distribution(category_distribution(assignments, map, corpus)), o.out);
}

// ----------------------------------------------------------------- prune

struct PruneOpts {
    std::string corpus, assignments, map, out, scope = "normal-only", categories = "3";
    bool use_actions = false;
};

void run_prune(const PruneOpts& o, const GlobalOpts& g) {
    Corpus corpus = load_canonical(o.corpus);
    auto assignments = load_assignments(o.assignments);
    CategoryMap map = load_category_map(o.map);
    // an untriaged topic has no category, so pruning around it would keep
    // documents nobody decided about
    if (!map.complete)
        throw DataError("category map " + o.map + " is flagged incomplete; finish triage first");
    for (const auto& a : assignments)
        if (!map.entries.count(a.dominant))
            throw DataError("incomplete map: no entry for topic " +
                            std::to_string(a.dominant) + " (document \"" + a.doc_id + "\")");
    Corpus pruned;
    json spec;
    if (o.use_actions) {
        pruned = prune_by_actions(corpus, assignments, map);
        spec = json{{"mode", "actions"}};
    } else {
        PruneScope scope;
        if (o.scope == "all")
            scope = PruneScope::All;
        else if (o.scope == "normal-only")
            scope = PruneScope::NormalOnly;
        else
            throw UsageError("bad --scope '" + o.scope + "' (want all or normal-only)");
        std::set<int> categories = parse_category_set(o.categories);
        pruned = prune(corpus, assignments, prune_spec_from_categories(map, categories, scope));
        spec = json{{"mode", "categories"}, {"categories", categories}, {"scope", o.scope}};
    }
    save_canonical(pruned, o.out);
    std::cout << "kept " << pruned.size() << " of " << corpus.size() << " documents\n";
    write_provenance(o.out, "prune", g,
                     json{{"corpus", sha256_file_hex(o.corpus)},
                          {"assignments", sha256_file_hex(o.assignments)},
                          {"map", sha256_file_hex(o.map)}},
                     spec);
}

// ---------------------------------------------------------------- sample

struct SampleOpts {
    std::string corpus, out;
    double ratio = 0.0;
    std::size_t n_toxic = 0, n_normal = 0;
};

void run_sample(const SampleOpts& o, const GlobalOpts& g) {
    Corpus corpus = load_canonical(o.corpus);
    SampleSpec spec;
    spec.seed = g.seed;
    json spec_json;
    if (o.ratio > 0) {
        spec.mode = SampleMode::Ratio;
        spec.normal_per_toxic = o.ratio;
        spec_json = json{{"mode", "ratio"}, {"normal_per_toxic", o.ratio}};
    } else if (o.n_toxic > 0 || o.n_normal > 0) {
        spec.mode = SampleMode::Fixed;
        spec.n_toxic = o.n_toxic;
        spec.n_normal = o.n_normal;
        spec_json = json{{"mode", "fixed"}, {"toxic", o.n_toxic}, {"normal", o.n_normal}};
    } else {
        throw UsageError("give --ratio or --toxic/--normal");
    }
    Corpus sampled = sample(corpus, spec);
    save_canonical(sampled, o.out);
    auto counts = sampled.binary_counts();
    std::cout << "sampled " << sampled.size() << " documents (toxic " << counts[Label::Toxic]
              << ", normal " << counts[Label::Normal] << ")\n";
    write_provenance(o.out, "sample", g, json{{"corpus", sha256_file_hex(o.corpus)}},
                     spec_json);
}

// ------------------------------------------------------------ train-eval

struct TrainEvalOpts {
    std::string train, eval, eval_assignments, map, lexicon, import_predictions;
    std::string out_json, out_text, predictions;
    double ratio = 0.0;
    std::size_t repeats = 1;
    TokOpts tok;
    HarnessOpts harness;
};

// optional scoring context (category breakdown, explicit rates)
struct LoadedContext {
    std::vector<TopicAssignment> assignments;
    CategoryMap map;
    std::set<std::string> lexicon;
    EvalContext ctx;
};

LoadedContext load_context(const std::string& assignments_path, const std::string& map_path,
                           const std::string& lexicon_path) {
    LoadedContext lc;
    if (!assignments_path.empty() != !map_path.empty())
        throw UsageError("--eval-assignments and --map go together");
    if (!assignments_path.empty()) {
        lc.assignments = load_assignments(assignments_path);
        lc.map = load_category_map(map_path);
        lc.ctx.gold_assignments = &lc.assignments;
        lc.ctx.categories = &lc.map;
    }
    if (!lexicon_path.empty()) {
        lc.lexicon = load_lexicon(lexicon_path);
        lc.ctx.lexicon = &lc.lexicon;
    }
    return lc;
}

void run_train_eval(const TrainEvalOpts& o, const GlobalOpts& g) {
    Corpus gold = load_canonical(o.eval);
    LoadedContext lc = load_context(o.eval_assignments, o.map, o.lexicon);
    PolarityMap polarity = polarity_from_gold(gold);

    if (!o.import_predictions.empty()) {
        // score an external classifier's output instead of training one
        std::vector<Prediction> preds = predict_import(o.import_predictions, gold);
        EvalReport report = evaluate(preds, gold, polarity, lc.ctx.gold_assignments,
                                     lc.ctx.categories, lc.ctx.lexicon);
        emit(render_report(report), o.out_text);
        if (!o.out_json.empty()) spit(o.out_json, report_json(report));
        return;
    }
    if (o.train.empty()) throw UsageError("need --train (or --import-predictions)");

    HarnessConfig hc = o.harness.make(o.tok, g);
    Corpus pool = load_canonical(o.train);
    TokenCache pool_cache(pool, hc.tokenizer, hc.threads);
    TokenCache gold_cache(gold, hc.tokenizer, hc.threads);

    json inputs{{"train", sha256_file_hex(o.train)}, {"eval", sha256_file_hex(o.eval)}};
    json spec{{"ratio", o.ratio}, {"repeats", o.repeats}, {"epochs", hc.trainer.epochs},
              {"dims", hc.features.n_hash_dims}};

    if (o.repeats > 1) {
        if (!o.predictions.empty())
            throw UsageError("--predictions needs --repeats 1");
        RepeatedReport repeated = run_repeated(
            [&](std::uint64_t s) {
                Corpus train_set = o.ratio > 0 ? sample_ratio(pool, o.ratio, s) : pool;
                return train_and_eval(train_set, gold, pool_cache, gold_cache, hc, s, lc.ctx);
            },
            g.seed, o.repeats);
        emit(render_repeated(repeated), o.out_text);
        if (!o.out_json.empty()) {
            spit(o.out_json, repeated_json(repeated));
            write_provenance(o.out_json, "train-eval", g, inputs, spec);
        }
        return;
    }

    Corpus train_set = o.ratio > 0 ? sample_ratio(pool, o.ratio, g.seed) : pool;
    std::vector<std::vector<std::string>> train_docs = pool_cache.tokens_of(train_set);
    std::vector<Label> labels;
    for (const Document& doc : train_set.documents) labels.push_back(doc.label);
    TrainMeta meta = hc.trainer;
    meta.seed = g.seed;
    LinearModel model = train_classifier(train_docs, labels, hc.features, meta);
    std::vector<Prediction> preds =
        predict_corpus(model, gold, gold_cache.tokens_of(gold), hc.threads);
    if (!o.predictions.empty()) {
        write_predictions_csv(preds, o.predictions);
        write_provenance(o.predictions, "train-eval", g, inputs, spec);
    }
    EvalReport report = evaluate(preds, gold, polarity, lc.ctx.gold_assignments,
                                 lc.ctx.categories, lc.ctx.lexicon);
    emit(render_report(report), o.out_text);
    if (!o.out_json.empty()) {
        spit(o.out_json, report_json(report));
        write_provenance(o.out_json, "train-eval", g, inputs, spec);
    }
}

// ------------------------------------------------------------ experiment

struct ExperimentOpts {
    std::string train, eval, eval_assignments, map, lexicon;
    std::string train_assignments;  // prune variant selection
    std::string ratios = "1,2,3,5,10", sizes = "500,1000,2000", categories = "3";
    double ratio = 0.0;
    std::size_t repeats = 5;
    std::string out_csv, out_json;
    TokOpts tok;
    HarnessOpts harness;
};

void run_experiment_ratio(const ExperimentOpts& o, const GlobalOpts& g) {
    HarnessConfig hc = o.harness.make(o.tok, g);
    Corpus pool = load_canonical(o.train);
    Corpus gold = load_canonical(o.eval);
    LoadedContext lc = load_context(o.eval_assignments, o.map, o.lexicon);
    auto points =
        ratio_sweep(pool, gold, parse_double_list(o.ratios), o.repeats, g.seed, hc, lc.ctx);
    std::cout << sweep_csv(points, "ratio");
    if (!o.out_csv.empty()) spit(o.out_csv, sweep_csv(points, "ratio"));
    if (!o.out_json.empty()) spit(o.out_json, sweep_json(points, "ratio"));
}

void run_experiment_size(const ExperimentOpts& o, const GlobalOpts& g) {
    HarnessConfig hc = o.harness.make(o.tok, g);
    Corpus pool = load_canonical(o.train);
    Corpus gold = load_canonical(o.eval);
    std::vector<std::size_t> sizes;
    for (double v : parse_double_list(o.sizes)) sizes.push_back(static_cast<std::size_t>(v));
    auto points = size_sweep(pool, gold, sizes, o.repeats, g.seed, hc);
    std::cout << sweep_csv(points, "size");
    if (!o.out_csv.empty()) spit(o.out_csv, sweep_csv(points, "size"));
    if (!o.out_json.empty()) spit(o.out_json, sweep_json(points, "size"));
}

void run_experiment_category(const ExperimentOpts& o, const GlobalOpts& g) {
    if (o.eval_assignments.empty() || o.map.empty())
        throw UsageError("category experiment needs --eval-assignments and --map");
    HarnessConfig hc = o.harness.make(o.tok, g);
    Corpus pool = load_canonical(o.train);
    Corpus gold = load_canonical(o.eval);
    LoadedContext lc = load_context(o.eval_assignments, o.map, o.lexicon);
    TokenCache pool_cache(pool, hc.tokenizer, hc.threads);
    TokenCache gold_cache(gold, hc.tokenizer, hc.threads);
    RepeatedReport repeated = run_repeated(
        [&](std::uint64_t s) {
            Corpus train_set = o.ratio > 0 ? sample_ratio(pool, o.ratio, s) : pool;
            return train_and_eval(train_set, gold, pool_cache, gold_cache, hc, s, lc.ctx);
        },
        g.seed, o.repeats);
    std::cout << render_repeated(repeated);
    if (!o.out_json.empty()) spit(o.out_json, repeated_json(repeated));
    if (!o.out_csv.empty()) {
        // same long format as the sweeps, single row group
        std::ostringstream csv;
        csv << "variant,metric,mean,std,n\n";
        char buf[64];
        for (const auto& [name, stats] : repeated.metrics) {
            std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%zu", stats.mean, stats.stddev,
                          stats.n);
            csv << "category," << name << ',' << buf << "\n";
        }
        spit(o.out_csv, csv.str());
    }
}

void run_experiment_prune(const ExperimentOpts& o, const GlobalOpts& g) {
    if (o.train_assignments.empty() || o.map.empty())
        throw UsageError("prune experiment needs --train-assignments and --map");
    HarnessConfig hc = o.harness.make(o.tok, g);
    Corpus pool = load_canonical(o.train);
    Corpus gold = load_canonical(o.eval);
    LoadedContext lc = load_context(o.eval_assignments, o.map.empty() ? "" : o.map, o.lexicon);
    auto assignments = load_assignments(o.train_assignments);
    CategoryMap map = load_category_map(o.map);
    auto results = prune_comparison(pool, assignments, map, parse_category_set(o.categories),
                                    gold, o.ratio, o.repeats, g.seed, hc, lc.ctx);
    std::cout << prune_comparison_csv(results);
    if (!o.out_csv.empty()) spit(o.out_csv, prune_comparison_csv(results));
    if (!o.out_json.empty()) spit(o.out_json, prune_comparison_json(results));
}

// ------------------------------------------------------------- reproduce

struct ReproduceOpts {
    bool paper = false;
    std::string out_dir, source, target, lexicon_path, map_path;
};

// The full audit-curate-retrain sequence over either supplied corpora or
// the bundled synthetic pair. Writes every intermediate artifact into
// out_dir so each step can be rerun by hand with the other subcommands.
void run_reproduce(const ReproduceOpts& o, const GlobalOpts& g) {
    if (!o.paper) throw UsageError("reproduce currently only knows --paper");
    std::size_t threads = resolve_threads(g.threads);
    std::string dir = o.out_dir;
    if (dir.empty()) throw UsageError("need --out-dir");
    if (dir.back() == '/') dir.pop_back();

    bool synthetic = o.source.empty();
    if (synthetic != o.target.empty())
        throw UsageError("give both --source and --target, or neither");
    if (!synthetic && o.map_path.empty())
        throw UsageError("real-data reproduce needs a curated --map (run triage first)");

    Corpus source, target;
    std::set<std::string> lexicon;
    if (synthetic) {
        TwoDomainConfig syn;
        syn.seed = g.seed;
        TwoDomainData data = make_two_domain(syn);
        source = std::move(data.source);
        target = std::move(data.target);
        for (const std::string& w : toxic_words()) lexicon.insert(w);
        save_canonical(source, dir + "/source.jsonl");
        save_canonical(target, dir + "/target.jsonl");
    } else {
        source = load_canonical(o.source);
        target = load_canonical(o.target);
        if (!o.lexicon_path.empty()) lexicon = load_lexicon(o.lexicon_path);
    }

    TokenizerConfig tok;
    auto source_tokens = tokenize_corpus(source, tok, threads);
    Vocabulary vocab = build_vocabulary(source_tokens, VocabFilter{});
    vocab.save(dir + "/vocab.json");
    auto source_bows = to_bow_corpus(source_tokens, vocab, threads);

    // model selection on a small grid, then the working topic model
    LdaConfig base;
    base.passes = 2;
    base.seed = g.seed;
    std::vector<std::size_t> grid;
    for (std::size_t k = 2; k <= 8; ++k) grid.push_back(k);
    ScanResult scan = scan_topic_counts(source_bows, vocab, source_tokens, grid, base,
                                        CoherenceConfig{}, {g.seed, g.seed + 1}, threads);
    spit(dir + "/scan.csv", scan_csv(scan));
    std::cout << "scan-k best K: " << scan.best_k << "\n";

    LdaConfig cfg = base;
    cfg.k = scan.best_k;
    TopicModel model = train(source_bows, vocab, cfg, threads);
    save_model(model, dir + "/model.tlda");
    auto assignments = assign_corpus(model, source, source_bows, threads);
    save_assignments(assignments, dir + "/assignments.jsonl");

    CategoryMap map;
    if (!o.map_path.empty()) {
        map = load_category_map(o.map_path);
    } else {
        std::vector<std::string> plat = platform_words();
        map = auto_categorize(model, vocab, lexicon, {plat.begin(), plat.end()});
        map.model_hash = sha256_file_hex(dir + "/model.tlda");
        save_category_map(map, dir + "/categories.json");
    }

    auto stats = topic_report(model, vocab, assignments, source);
    spit(dir + "/topics.txt", render_topic_report(stats));
    spit(dir + "/distribution.txt",
         render_category_distribution(category_distribution(assignments, map, source)));

    HarnessConfig hc;
    hc.tokenizer = tok;
    hc.threads = threads;
    EvalContext ctx;
    if (!lexicon.empty()) ctx.lexicon = &lexicon;

    // pruning comparison at a sampling ratio both variants can honor (the
    // normal-only prune leaves only the non-platform normals), then sweeps
    auto comparison = prune_comparison(source, assignments, map, {3}, target, 0.5, 5, g.seed,
                                       hc, ctx);
    spit(dir + "/prune.csv", prune_comparison_csv(comparison));
    spit(dir + "/prune.json", prune_comparison_json(comparison));

    Corpus ratio_pool = sample_fixed(source, 300, source.binary_counts()[Label::Normal],
                                     g.seed);
    auto ratio_points = ratio_sweep(ratio_pool, target, {1, 2, 3, 5, 10}, 5, g.seed, hc, ctx);
    spit(dir + "/ratio.csv", sweep_csv(ratio_points, "ratio"));

    auto size_points = size_sweep(source, target, {400, 1200}, 5, g.seed, hc, ctx);
    spit(dir + "/size.csv", sweep_csv(size_points, "size"));

    std::ostringstream summary;
    summary << "data: " << (synthetic ? "synthetic" : source.name + " -> " + target.name)
            << "\nseed: " << g.seed << "\nbest K: " << scan.best_k << "\n\n";
    for (const auto& r : comparison) {
        summary << r.name << ":\n";
        for (const char* key : {"acc/normal", "acc/toxic", "macro_f1"}) {
            auto it = r.report.metrics.find(key);
            if (it == r.report.metrics.end()) continue;
            char buf[64];
            std::snprintf(buf, sizeof(buf), "  %-12s %.4f +/- %.4f\n", key, it->second.mean,
                          it->second.stddev);
            summary << buf;
        }
    }
    spit(dir + "/summary.txt", summary.str());
    std::cout << slurp(dir + "/summary.txt");
    write_provenance(dir + "/summary.txt", "reproduce", g,
                     synthetic ? json::object()
                               : json{{"source", sha256_file_hex(o.source)},
                                      {"target", sha256_file_hex(o.target)}},
                     json{{"synthetic", synthetic}});
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv) {
    CLI::App app{"topic-bias audit and curation for labeled text corpora"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML-like config file; flags override it");

    auto g = std::make_shared<GlobalOpts>();
    app.add_option("--threads", g->threads,
                   "worker threads (default: TOPICAUDIT_THREADS or 1)");
    app.add_option("--seed", g->seed, "global random seed");
    app.add_flag("--stamp", g->stamp, "include timestamps in provenance records");

    auto sub = [&](const char* name, const char* help) {
        CLI::App* cmd = app.add_subcommand(name, help);
        cmd->fallthrough();
        return cmd;
    };

    {
        auto o = std::make_shared<IngestOpts>();
        CLI::App* cmd = sub("ingest", "convert a raw dataset to the canonical JSONL form");
        cmd->add_option("--input", o->input, "raw dataset file")->required();
        cmd->add_option("--format", o->format, "csv, tsv or jsonl");
        cmd->add_option("--id-field", o->schema.id, "id column; empty synthesizes ids");
        cmd->add_option("--text-field", o->schema.text, "text column");
        cmd->add_option("--label-field", o->schema.label, "class column");
        cmd->add_option("--split-field", o->schema.split, "train/dev/test column");
        cmd->add_option("--name", o->name, "corpus name (default: file stem)");
        cmd->add_option("--source", o->source, "source tag stored on every document");
        cmd->add_option("--mapping", o->mapping, "label mapping JSON to binarize now");
        cmd->add_option("--out", o->out, "canonical JSONL output")->required();
        cmd->callback([o, g] { run_ingest(*o, *g); });
    }
    {
        auto o = std::make_shared<PrepOpts>();
        CLI::App* cmd = sub("prep", "tokenize a corpus and build its vocabulary");
        cmd->add_option("--corpus", o->corpus, "canonical JSONL corpus")->required();
        cmd->add_option("--out", o->out, "vocabulary JSON output")->required();
        cmd->add_option("--min-df", o->filter.min_doc_freq, "min document frequency");
        cmd->add_option("--max-df", o->filter.max_doc_fraction,
                        "max document fraction before a term is dropped");
        cmd->add_option("--max-terms", o->filter.max_terms, "vocabulary size cap");
        add_tok_opts(cmd, o->tok);
        cmd->callback([o, g] { run_prep(*o, *g); });
    }
    {
        auto o = std::make_shared<ScanOpts>();
        CLI::App* cmd = sub("scan-k", "score a grid of topic counts by C_V coherence");
        cmd->add_option("--corpus", o->corpus, "canonical JSONL corpus")->required();
        cmd->add_option("--vocab", o->vocab, "vocabulary JSON")->required();
        cmd->add_option("--grid", o->grid, "K values: lo:hi[:step] or a comma list");
        cmd->add_option("--seeds", o->seeds, "models per K (seed, seed+1, ...)");
        cmd->add_option("--window", o->coherence.window_size, "sliding window size");
        cmd->add_option("--top-n", o->coherence.top_n, "top words per topic");
        cmd->add_option("--out-csv", o->out_csv, "grid CSV output");
        cmd->add_option("--out-json", o->out_json, "grid + best K JSON output");
        add_tok_opts(cmd, o->tok);
        add_lda_opts(cmd, o->lda, false);
        cmd->callback([o, g] { run_scan(*o, *g); });
    }
    {
        auto o = std::make_shared<TrainOpts>();
        CLI::App* cmd = sub("lda-train", "train the online-VB topic model");
        cmd->add_option("--corpus", o->corpus, "canonical JSONL corpus")->required();
        cmd->add_option("--vocab", o->vocab, "vocabulary JSON")->required();
        cmd->add_option("--out", o->out, "model file output")->required();
        cmd->add_flag("--elbo", o->elbo, "print the final ELBO per word");
        add_tok_opts(cmd, o->tok);
        add_lda_opts(cmd, o->lda, true);
        cmd->callback([o, g] { run_lda_train(*o, *g); });
    }
    {
        auto o = std::make_shared<AssignOpts>();
        CLI::App* cmd = sub("assign", "infer each document's topic mixture");
        cmd->add_option("--corpus", o->corpus, "canonical JSONL corpus")->required();
        cmd->add_option("--vocab", o->vocab, "vocabulary JSON")->required();
        cmd->add_option("--model", o->model, "trained model file")->required();
        cmd->add_option("--out", o->out, "assignments JSONL output")->required();
        add_tok_opts(cmd, o->tok);
        cmd->callback([o, g] { run_assign(*o, *g); });
    }
    auto add_report_opts = [](CLI::App* cmd, ReportOpts& r) {
        cmd->add_option("--corpus", r.corpus, "canonical JSONL corpus")->required();
        cmd->add_option("--vocab", r.vocab, "vocabulary JSON")->required();
        cmd->add_option("--model", r.model, "trained model file")->required();
        cmd->add_option("--assignments", r.assignments, "assignments JSONL")->required();
        cmd->add_option("--top-n", r.top_n, "top words per topic");
    };
    {
        auto o = std::make_shared<ReportOpts>();
        CLI::App* cmd = sub("report-topics", "per-topic top words, sizes and class stats");
        add_report_opts(cmd, *o);
        cmd->add_option("--out", o->out, "text output (default: stdout)");
        cmd->add_option("--out-json", o->out_json, "JSON output");
        cmd->callback([o, g] { run_report_topics(*o, *g); });
    }
    {
        auto o = std::make_shared<TriageOpts>();
        CLI::App* cmd = sub("triage", "walk the topics and record category decisions");
        add_report_opts(cmd, o->report);
        cmd->add_option("--map", o->map, "category map JSON to write")->required();
        cmd->add_flag("--resume", o->resume, "continue an earlier session from --map");
        cmd->callback([o, g] { run_triage(*o, *g); });
    }
    {
        auto o = std::make_shared<DistOpts>();
        CLI::App* cmd = sub("distribution", "class share per topic category");
        cmd->add_option("--corpus", o->corpus, "canonical JSONL corpus")->required();
        cmd->add_option("--assignments", o->assignments, "assignments JSONL")->required();
        cmd->add_option("--map", o->map, "category map JSON")->required();
        cmd->add_option("--out", o->out, "text output (default: stdout)");
        cmd->callback([o, g] { run_distribution(*o, *g); });
    }
    {
        auto o = std::make_shared<PruneOpts>();
        CLI::App* cmd = sub("prune", "drop documents of the selected topic categories");
        cmd->add_option("--corpus", o->corpus, "canonical JSONL corpus")->required();
        cmd->add_option("--assignments", o->assignments, "assignments JSONL")->required();
        cmd->add_option("--map", o->map, "category map JSON")->required();
        cmd->add_option("--categories", o->categories, "categories to prune, e.g. 3 or 2,3");
        cmd->add_option("--scope", o->scope, "all or normal-only");
        cmd->add_flag("--use-actions", o->use_actions,
                      "apply each topic's recorded action instead");
        cmd->add_option("--out", o->out, "pruned corpus output")->required();
        cmd->callback([o, g] { run_prune(*o, *g); });
    }
    {
        auto o = std::make_shared<SampleOpts>();
        CLI::App* cmd = sub("sample", "undersample a binarized corpus");
        cmd->add_option("--corpus", o->corpus, "canonical JSONL corpus")->required();
        cmd->add_option("--ratio", o->ratio, "keep all toxic plus ratio*toxic normal docs");
        cmd->add_option("--toxic", o->n_toxic, "fixed toxic count");
        cmd->add_option("--normal", o->n_normal, "fixed normal count");
        cmd->add_option("--out", o->out, "sampled corpus output")->required();
        cmd->callback([o, g] { run_sample(*o, *g); });
    }
    {
        auto o = std::make_shared<TrainEvalOpts>();
        CLI::App* cmd = sub("train-eval", "train the linear classifier and score a corpus");
        cmd->add_option("--train", o->train, "training corpus (canonical JSONL)");
        cmd->add_option("--eval", o->eval, "evaluation corpus")->required();
        cmd->add_option("--eval-assignments", o->eval_assignments,
                        "assignments of the eval corpus, for the category breakdown");
        cmd->add_option("--map", o->map, "category map JSON");
        cmd->add_option("--lexicon", o->lexicon, "explicit-language lexicon");
        cmd->add_option("--import-predictions", o->import_predictions,
                        "score this doc_id,score CSV instead of training");
        cmd->add_option("--ratio", o->ratio, "undersample the training corpus first");
        cmd->add_option("--repeats", o->repeats, "repeat with seeds seed..seed+n-1");
        cmd->add_option("--out-json", o->out_json, "report JSON output");
        cmd->add_option("--out-text", o->out_text, "report text output (default: stdout)");
        cmd->add_option("--predictions", o->predictions, "write the doc_id,score CSV");
        add_tok_opts(cmd, o->tok);
        add_harness_opts(cmd, o->harness);
        cmd->callback([o, g] { run_train_eval(*o, *g); });
    }
    {
        CLI::App* exp = sub("experiment", "the bias-audit experiment recipes");
        exp->require_subcommand(1);
        auto add_common = [&](CLI::App* cmd, std::shared_ptr<ExperimentOpts>& o) {
            cmd->fallthrough();
            cmd->add_option("--train", o->train, "training pool (canonical JSONL)")
                ->required();
            cmd->add_option("--eval", o->eval, "evaluation corpus")->required();
            cmd->add_option("--repeats", o->repeats, "repeats per configuration");
            cmd->add_option("--out-csv", o->out_csv, "long-format CSV output");
            cmd->add_option("--out-json", o->out_json, "JSON output");
            cmd->add_option("--lexicon", o->lexicon, "explicit-language lexicon");
            add_tok_opts(cmd, o->tok);
            add_harness_opts(cmd, o->harness);
        };
        {
            auto o = std::make_shared<ExperimentOpts>();
            CLI::App* cmd = exp->add_subcommand("ratio", "normal:toxic undersampling sweep");
            add_common(cmd, o);
            cmd->add_option("--ratios", o->ratios, "normal-per-toxic grid, e.g. 1,2,3,5,10");
            cmd->add_option("--eval-assignments", o->eval_assignments, "assignments JSONL");
            cmd->add_option("--map", o->map, "category map JSON");
            cmd->callback([o, g] { run_experiment_ratio(*o, *g); });
        }
        {
            auto o = std::make_shared<ExperimentOpts>();
            CLI::App* cmd = exp->add_subcommand("size", "balanced training-size sweep");
            add_common(cmd, o);
            cmd->add_option("--sizes", o->sizes, "total training sizes, e.g. 500,1000");
            cmd->callback([o, g] { run_experiment_size(*o, *g); });
        }
        {
            auto o = std::make_shared<ExperimentOpts>();
            CLI::App* cmd =
                exp->add_subcommand("category", "accuracy broken down by topic category");
            add_common(cmd, o);
            cmd->add_option("--eval-assignments", o->eval_assignments, "assignments JSONL");
            cmd->add_option("--map", o->map, "category map JSON");
            cmd->add_option("--ratio", o->ratio, "undersample the pool per repeat");
            cmd->callback([o, g] { run_experiment_category(*o, *g); });
        }
        {
            auto o = std::make_shared<ExperimentOpts>();
            CLI::App* cmd =
                exp->add_subcommand("prune", "baseline vs pruned-training comparison");
            add_common(cmd, o);
            cmd->add_option("--train-assignments", o->train_assignments,
                            "assignments of the training pool");
            cmd->add_option("--map", o->map, "category map JSON");
            cmd->add_option("--categories", o->categories, "categories to prune");
            cmd->add_option("--ratio", o->ratio, "undersample each variant per repeat");
            cmd->add_option("--eval-assignments", o->eval_assignments, "assignments JSONL");
            cmd->callback([o, g] { run_experiment_prune(*o, *g); });
        }
    }
    {
        auto o = std::make_shared<ReproduceOpts>();
        CLI::App* cmd = sub("reproduce", "run the whole audit-curate-retrain sequence");
        cmd->add_flag("--paper", o->paper, "the published experiment sequence");
        cmd->add_option("--out-dir", o->out_dir, "directory for every artifact")->required();
        cmd->add_option("--source", o->source, "real source corpus (canonical JSONL)");
        cmd->add_option("--target", o->target, "real target corpus (canonical JSONL)");
        cmd->add_option("--lexicon", o->lexicon_path, "explicit-language lexicon");
        cmd->add_option("--map", o->map_path, "curated category map (required for real data)");
        cmd->callback([o, g] { run_reproduce(*o, *g); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace topicaudit
