#include "topicaudit/experiments.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "topicaudit/error.hpp"
#include "topicaudit/metrics.hpp"

namespace topicaudit {

using nlohmann::json;

TokenCache::TokenCache(const Corpus& corpus, const TokenizerConfig& cfg, std::size_t threads) {
    tokens_ = tokenize_corpus(corpus, cfg, threads);
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        auto [it, inserted] = index_.emplace(corpus.documents[i].id, i);
        if (!inserted) throw DataError("duplicate document id '" + it->first + "'");
    }
}

const std::vector<std::string>& TokenCache::tokens_for(const std::string& doc_id) const {
    auto it = index_.find(doc_id);
    if (it == index_.end()) throw DataError("document '" + doc_id + "' not in token cache");
    return tokens_[it->second];
}

std::vector<std::vector<std::string>> TokenCache::tokens_of(const Corpus& corpus) const {
    std::vector<std::vector<std::string>> out;
    out.reserve(corpus.documents.size());
    for (const Document& doc : corpus.documents) out.push_back(tokens_for(doc.id));
    return out;
}

EvalReport train_and_eval(const Corpus& train, const Corpus& gold,
                          const TokenCache& train_cache, const TokenCache& gold_cache,
                          const HarnessConfig& hc, std::uint64_t seed, const EvalContext& ctx) {
    std::vector<std::vector<std::string>> train_docs = train_cache.tokens_of(train);
    std::vector<Label> labels;
    labels.reserve(train.documents.size());
    for (const Document& doc : train.documents) labels.push_back(doc.label);

    TrainMeta meta = hc.trainer;
    meta.seed = seed;
    LinearModel model = train_classifier(train_docs, labels, hc.features, meta);

    std::vector<std::vector<std::string>> gold_docs = gold_cache.tokens_of(gold);
    std::vector<Prediction> preds = predict_corpus(model, gold, gold_docs, hc.threads);

    PolarityMap polarity = polarity_from_gold(gold);
    return evaluate(preds, gold, polarity, ctx.gold_assignments, ctx.categories, ctx.lexicon);
}

std::vector<SweepPoint> ratio_sweep(const Corpus& pool, const Corpus& gold,
                                    const std::vector<double>& ratios, std::size_t repeats,
                                    std::uint64_t seed, const HarnessConfig& hc,
                                    const EvalContext& ctx) {
    TokenCache pool_cache(pool, hc.tokenizer, hc.threads);
    TokenCache gold_cache(gold, hc.tokenizer, hc.threads);
    std::vector<SweepPoint> points;
    for (double r : ratios) {
        SweepPoint point;
        point.x = r;
        point.report = run_repeated(
            [&](std::uint64_t s) {
                Corpus sampled = sample_ratio(pool, r, s);
                return train_and_eval(sampled, gold, pool_cache, gold_cache, hc, s, ctx);
            },
            seed, repeats);
        points.push_back(std::move(point));
    }
    return points;
}

std::vector<SweepPoint> size_sweep(const Corpus& pool, const Corpus& gold,
                                   const std::vector<std::size_t>& sizes, std::size_t repeats,
                                   std::uint64_t seed, const HarnessConfig& hc,
                                   const EvalContext& ctx) {
    TokenCache pool_cache(pool, hc.tokenizer, hc.threads);
    TokenCache gold_cache(gold, hc.tokenizer, hc.threads);
    std::vector<SweepPoint> points;
    for (std::size_t n : sizes) {
        SweepPoint point;
        point.x = static_cast<double>(n);
        point.report = run_repeated(
            [&](std::uint64_t s) {
                Corpus sampled = sample_fixed(pool, n / 2, n - n / 2, s);
                return train_and_eval(sampled, gold, pool_cache, gold_cache, hc, s, ctx);
            },
            seed, repeats);
        points.push_back(std::move(point));
    }
    return points;
}

std::vector<PruneVariantResult> prune_comparison(const Corpus& pool,
                                                 const std::vector<TopicAssignment>& assignments,
                                                 const CategoryMap& map,
                                                 const std::set<int>& categories,
                                                 const Corpus& gold, double ratio,
                                                 std::size_t repeats, std::uint64_t seed,
                                                 const HarnessConfig& hc,
                                                 const EvalContext& ctx) {
    TokenCache pool_cache(pool, hc.tokenizer, hc.threads);
    TokenCache gold_cache(gold, hc.tokenizer, hc.threads);

    auto run_variant = [&](const std::string& name, const Corpus& variant_pool) {
        PruneVariantResult result;
        result.name = name;
        result.report = run_repeated(
            [&](std::uint64_t s) {
                Corpus train =
                    ratio > 0 ? sample_ratio(variant_pool, ratio, s) : variant_pool;
                return train_and_eval(train, gold, pool_cache, gold_cache, hc, s, ctx);
            },
            seed, repeats);
        return result;
    };

    std::vector<PruneVariantResult> results;
    results.push_back(run_variant("baseline", pool));
    results.push_back(run_variant(
        "prune-all",
        prune(pool, assignments, prune_spec_from_categories(map, categories, PruneScope::All))));
    results.push_back(run_variant(
        "prune-normal-only",
        prune(pool, assignments,
              prune_spec_from_categories(map, categories, PruneScope::NormalOnly))));
    return results;
}

namespace {

void append_metric_rows(std::ostringstream& out, const std::string& prefix,
                        const RepeatedReport& report) {
    char buf[64];
    for (const auto& [name, stats] : report.metrics) {
        out << prefix << ',' << name << ',';
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%zu\n", stats.mean, stats.stddev, stats.n);
        out << buf;
    }
}

json metrics_to_json(const RepeatedReport& report) {
    json metrics = json::object();
    for (const auto& [name, stats] : report.metrics)
        metrics[name] = {{"mean", stats.mean}, {"std", stats.stddev}, {"n", stats.n}};
    return metrics;
}

std::string format_x(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

}  // namespace

std::string sweep_csv(const std::vector<SweepPoint>& points, const std::string& x_name) {
    std::ostringstream out;
    out << x_name << ",metric,mean,std,n\n";
    for (const SweepPoint& point : points) append_metric_rows(out, format_x(point.x), point.report);
    return out.str();
}

std::string sweep_json(const std::vector<SweepPoint>& points, const std::string& x_name) {
    json grid = json::array();
    for (const SweepPoint& point : points)
        grid.push_back({{x_name, point.x},
                        {"repeats", point.report.runs.size()},
                        {"metrics", metrics_to_json(point.report)}});
    return json{{"sweep", x_name}, {"grid", grid}}.dump(2) + "\n";
}

std::string prune_comparison_csv(const std::vector<PruneVariantResult>& results) {
    std::ostringstream out;
    out << "variant,metric,mean,std,n\n";
    for (const PruneVariantResult& r : results) append_metric_rows(out, r.name, r.report);
    return out.str();
}

std::string prune_comparison_json(const std::vector<PruneVariantResult>& results) {
    json variants = json::array();
    for (const PruneVariantResult& r : results)
        variants.push_back({{"variant", r.name},
                            {"repeats", r.report.runs.size()},
                            {"metrics", metrics_to_json(r.report)}});
    return json{{"variants", variants}}.dump(2) + "\n";
}

CategoryMap auto_categorize(const TopicModel& model, const Vocabulary& vocab,
                            const std::set<std::string>& offensive,
                            const std::set<std::string>& platform, std::size_t top_n) {
    CategoryMap map;
    for (std::size_t topic = 0; topic < model.k(); ++topic) {
        std::size_t off_hits = 0, plat_hits = 0;
        for (const auto& [word, weight] : top_words(model, vocab, topic, top_n)) {
            if (offensive.count(word)) ++off_hits;
            if (platform.count(word)) ++plat_hits;
        }
        TopicDecision decision;
        if (off_hits * 2 > top_n) {
            decision.category = 2;
            decision.note = "auto: offensive vocabulary";
        } else if (plat_hits * 2 > top_n) {
            decision.category = 3;
            decision.action = TriageAction::PruneNormalOnly;
            decision.note = "auto: platform vocabulary";
        } else {
            decision.category = 1;
            decision.note = "auto: mixed or general";
        }
        map.entries[topic] = decision;
    }
    return map;
}

}  // namespace topicaudit
