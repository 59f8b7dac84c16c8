#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "topicaudit/classifier.hpp"
#include "topicaudit/corpus.hpp"
#include "topicaudit/curate.hpp"
#include "topicaudit/eval.hpp"
#include "topicaudit/features.hpp"
#include "topicaudit/lda.hpp"
#include "topicaudit/textprep.hpp"
#include "topicaudit/triage.hpp"

namespace topicaudit {

// Everything the train/predict/score loop needs besides the data. The
// trainer seed is overridden per repeat by the sweep drivers.
struct HarnessConfig {
    TokenizerConfig tokenizer;
    FeatConfig features;
    TrainMeta trainer;
    std::size_t threads = 0;
};

// Tokenization of one corpus, looked up by document id, so repeated runs
// over subsets of the same pool tokenize once.
class TokenCache {
public:
    TokenCache(const Corpus& corpus, const TokenizerConfig& cfg, std::size_t threads = 0);

    const std::vector<std::string>& tokens_for(const std::string& doc_id) const;

    // aligned with corpus.documents order
    std::vector<std::vector<std::string>> tokens_of(const Corpus& corpus) const;

private:
    std::map<std::string, std::size_t> index_;
    std::vector<std::vector<std::string>> tokens_;
};

// Extra scoring context, all optional.
struct EvalContext {
    const std::vector<TopicAssignment>* gold_assignments = nullptr;
    const CategoryMap* categories = nullptr;
    const std::set<std::string>* lexicon = nullptr;
};

// One pass: train a classifier on `train`, score `gold`. Both corpora
// must be covered by their caches.
EvalReport train_and_eval(const Corpus& train, const Corpus& gold,
                          const TokenCache& train_cache, const TokenCache& gold_cache,
                          const HarnessConfig& hc, std::uint64_t seed,
                          const EvalContext& ctx = {});

struct SweepPoint {
    double x = 0.0;  // ratio or subset size
    RepeatedReport report;
};

// Normal:Toxic undersampling sweep. Per repeat i the pool is resampled
// with seed+i, then trained with the same seed.
std::vector<SweepPoint> ratio_sweep(const Corpus& pool, const Corpus& gold,
                                    const std::vector<double>& ratios, std::size_t repeats,
                                    std::uint64_t seed, const HarnessConfig& hc,
                                    const EvalContext& ctx = {});

// Balanced subsets of the given total sizes (half per class).
std::vector<SweepPoint> size_sweep(const Corpus& pool, const Corpus& gold,
                                   const std::vector<std::size_t>& sizes, std::size_t repeats,
                                   std::uint64_t seed, const HarnessConfig& hc,
                                   const EvalContext& ctx = {});

struct PruneVariantResult {
    std::string name;  // "baseline", "prune-all", "prune-normal-only"
    RepeatedReport report;
};

// Trains on the pool as-is and on the two pruned variants of the selected
// categories. ratio > 0 additionally undersamples each variant per repeat.
std::vector<PruneVariantResult> prune_comparison(const Corpus& pool,
                                                 const std::vector<TopicAssignment>& assignments,
                                                 const CategoryMap& map,
                                                 const std::set<int>& categories,
                                                 const Corpus& gold, double ratio,
                                                 std::size_t repeats, std::uint64_t seed,
                                                 const HarnessConfig& hc,
                                                 const EvalContext& ctx = {});

// Long-format CSV: x,metric,mean,std,n
std::string sweep_csv(const std::vector<SweepPoint>& points, const std::string& x_name);
std::string sweep_json(const std::vector<SweepPoint>& points, const std::string& x_name);

std::string prune_comparison_csv(const std::vector<PruneVariantResult>& results);
std::string prune_comparison_json(const std::vector<PruneVariantResult>& results);

// Rule-of-thumb triage for the bundled demo: topics whose top words sit
// mostly in the offensive lexicon get category 2, mostly in the platform
// list category 3 with a normal-only prune, everything else category 1.
// A curator map built interactively always takes precedence.
CategoryMap auto_categorize(const TopicModel& model, const Vocabulary& vocab,
                            const std::set<std::string>& offensive,
                            const std::set<std::string>& platform, std::size_t top_n = 10);

}  // namespace topicaudit
