#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "topicaudit/corpus.hpp"

namespace topicaudit {

// Synthetic corpora for the self-checks and the bundled demo. All words
// are short consonant strings, which the tokenizer keeps and the stemmer
// leaves alone, so generated tokens survive preprocessing unchanged.

// Unlabeled corpus with planted topics: disjoint word sets, each document
// drawn almost entirely from one of them, word ranks weighted 1/(rank+1).
struct PlantedConfig {
    std::size_t n_docs = 2000;
    std::size_t n_topics = 5;      // at most 10
    std::size_t words_per_topic = 20;  // at most 100
    std::size_t min_len = 60;
    std::size_t max_len = 120;
    double noise = 0.02;  // chance a token comes from some other topic
    std::uint64_t seed = 7;
};

Corpus make_planted_corpus(const PlantedConfig& cfg);

// Word list of one planted topic, heaviest first.
std::vector<std::string> planted_topic_words(const PlantedConfig& cfg, std::size_t topic);

// Labeled two-domain pair sharing a toxic vocabulary. Most source Normal
// docs lean on a platform word set the target never uses, the rest are
// plain general text like the target's Normal docs; Toxic docs mix toxic
// and general words the same way in both domains. A classifier trained on
// the source can ride the platform words, which stops working on the
// target; that is the failure mode the pruning workflow is meant to fix.
struct TwoDomainConfig {
    std::size_t source_toxic = 800;
    std::size_t source_normal = 3000;
    std::size_t target_toxic = 400;
    std::size_t target_normal = 1200;
    double platform_doc_fraction = 0.8;  // source Normal docs that are platform-flavored
    double platform_share = 0.8;         // platform tokens per platform-flavored doc
    double toxic_share = 0.5;            // toxic tokens per Toxic doc
    std::size_t min_len = 12;
    std::size_t max_len = 30;
    std::uint64_t seed = 11;
};

struct TwoDomainData {
    Corpus source;  // name "source", binary labels set
    Corpus target;  // name "target", binary labels set
};

TwoDomainData make_two_domain(const TwoDomainConfig& cfg);

// The word groups behind make_two_domain. toxic_words doubles as an
// explicit-language lexicon for the synthetic data.
std::vector<std::string> toxic_words();
std::vector<std::string> platform_words();
std::vector<std::string> general_words();

}  // namespace topicaudit
