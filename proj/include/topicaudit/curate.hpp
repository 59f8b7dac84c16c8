#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "topicaudit/corpus.hpp"
#include "topicaudit/lda.hpp"
#include "topicaudit/triage.hpp"

namespace topicaudit {

enum class PruneScope { All, NormalOnly };

struct PruneSpec {
    std::set<std::size_t> topic_ids;
    PruneScope scope = PruneScope::All;
};

// topics whose curator category is one of `categories`
PruneSpec prune_spec_from_categories(const CategoryMap& map, const std::set<int>& categories,
                                     PruneScope scope);

// Drops documents whose dominant topic is in the spec. scope=All removes
// them outright; scope=NormalOnly removes only the Normal-labeled ones and
// requires binary labels. Survivor order is input order.
Corpus prune(const Corpus& corpus, const std::vector<TopicAssignment>& assignments,
             const PruneSpec& spec);

// Applies each topic's own action (keep / prune_all / prune_normal_only).
Corpus prune_by_actions(const Corpus& corpus, const std::vector<TopicAssignment>& assignments,
                        const CategoryMap& map);

enum class SampleMode { Ratio, Fixed };

struct SampleSpec {
    SampleMode mode = SampleMode::Ratio;
    double normal_per_toxic = 1.0;          // ratio mode: 1 toxic : r normal
    std::size_t n_toxic = 0, n_normal = 0;  // fixed mode
    std::uint64_t seed = 42;
};

// Keeps every Toxic doc and draws round(r * |Toxic|) Normal docs without
// replacement (round half up). Output keeps the original order.
Corpus sample_ratio(const Corpus& corpus, double normal_per_toxic, std::uint64_t seed);

// Uniform without-replacement draws of each class, original order.
Corpus sample_fixed(const Corpus& corpus, std::size_t n_toxic, std::size_t n_normal,
                    std::uint64_t seed);

Corpus sample(const Corpus& corpus, const SampleSpec& spec);

}  // namespace topicaudit
