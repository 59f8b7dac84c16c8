#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "topicaudit/corpus.hpp"
#include "topicaudit/lda.hpp"

namespace topicaudit {

struct TopicStats {
    std::size_t topic_id = 0;
    std::vector<std::pair<std::string, double>> top_words;
    std::size_t doc_count = 0;
    std::size_t toxic_count = 0;   // docs labeled Toxic
    std::size_t normal_count = 0;  // docs labeled Normal
    double dataset_fraction = 0.0;
    double toxic_fraction = 0.0;  // toxic_count / doc_count
    double toxic_share = 0.0;     // toxic_count / all Toxic docs
};

enum class TriageAction { Keep, PruneAll, PruneNormalOnly };

const char* to_string(TriageAction action);
// throws DataError naming the valid actions
TriageAction triage_action_from_string(const std::string& s);

struct TopicDecision {
    int category = 3;  // 1, 2 or 3
    TriageAction action = TriageAction::Keep;
    std::string note;
};

// The curator's verdict per topic. Categories are free-form labels chosen
// by a human; nothing here is computed from the data.
struct CategoryMap {
    std::map<std::size_t, TopicDecision> entries;
    std::string model_hash;  // hex digest of the model file this map annotates
    bool complete = true;    // false when a triage session ended early

    // every topic id in [0, k) must be present
    void require_total(std::size_t k) const;
};

std::vector<TopicStats> topic_report(const TopicModel& model, const Vocabulary& vocab,
                                     const std::vector<TopicAssignment>& assignments,
                                     const Corpus& corpus, std::size_t top_n = 10);

// text block per topic: header, weighted top-word products, doc counts,
// toxic stats
std::string render_topic_report(const std::vector<TopicStats>& report);
std::string topic_report_json(const std::vector<TopicStats>& report);

struct CategoryDistribution {
    // class name -> fraction of its docs per category (index 0 = category 1)
    std::map<std::string, std::array<double, 3>> rows;
    std::map<std::string, std::size_t> class_counts;
};

// Per original_label class, the share of documents whose dominant topic
// falls in each category. Docs without a recorded original label fall into
// the "(unlabeled)" row.
CategoryDistribution category_distribution(const std::vector<TopicAssignment>& assignments,
                                           const CategoryMap& map, const Corpus& corpus);

std::string render_category_distribution(const CategoryDistribution& dist);

struct PruneImpact {
    std::size_t docs_removed = 0;
    std::size_t toxic_removed = 0;
    std::size_t total_docs = 0;
    std::size_t total_toxic = 0;
};

// What the current actions would delete, computed from report counts.
PruneImpact prune_impact(const CategoryMap& map, const std::vector<TopicStats>& report);

// Walk the topics one by one on the given streams: show stats, ask for a
// category and an action. Supports s(kip), b(ack), w(hat-if), q(uit); EOF
// or quit returns a partial map flagged incomplete. `existing` pre-fills
// defaults for a resumed session.
CategoryMap interactive_triage(const std::vector<TopicStats>& report,
                               const CategoryMap* existing, std::istream& in,
                               std::ostream& out);

void save_category_map(const CategoryMap& map, const std::string& path);
CategoryMap load_category_map(const std::string& path);

}  // namespace topicaudit
