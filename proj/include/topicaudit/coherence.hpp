#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "topicaudit/lda.hpp"

namespace topicaudit {

struct CoherenceConfig {
    std::size_t window_size = 110;
    double epsilon = 1e-12;
    double npmi_exponent = 1.0;  // gamma_c
    std::size_t top_n = 10;
};

// Boolean sliding-window statistics for a fixed set of words. A document
// of length L yields max(1, L - window_size + 1) windows; a window counts
// a word at most once and a pair when both members are present.
struct WindowCounts {
    std::size_t total_windows = 0;
    std::map<std::string, std::size_t> word_windows;
    std::map<std::pair<std::string, std::string>, std::size_t> pair_windows;

    std::size_t word(const std::string& w) const {
        auto it = word_windows.find(w);
        return it == word_windows.end() ? 0 : it->second;
    }

    // unordered pair; (w, w) is defined as word(w)
    std::size_t pair(const std::string& a, const std::string& b) const {
        if (a == b) return word(a);
        auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        auto it = pair_windows.find(key);
        return it == pair_windows.end() ? 0 : it->second;
    }
};

WindowCounts window_counts(const std::vector<std::vector<std::string>>& docs,
                           const std::set<std::string>& words, const CoherenceConfig& cfg,
                           std::size_t threads = 0);

// Normalized PMI from window probabilities; 0 when either marginal is 0.
double npmi(const WindowCounts& counts, const std::string& wi, const std::string& wj,
            const CoherenceConfig& cfg);

// One-set segmentation: cosine between each word's NPMI context vector and
// the summed vector of the whole word set, averaged.
double cv_topic(const std::vector<std::string>& top_words, const WindowCounts& counts,
                const CoherenceConfig& cfg);

// Mean cv_topic over all topics, each represented by its top_n words.
double cv_model(const TopicModel& model, const Vocabulary& vocab,
                const std::vector<std::vector<std::string>>& docs,
                const CoherenceConfig& cfg, std::size_t threads = 0);

struct ScanRow {
    std::size_t k = 0;
    double mean_coherence = 0.0;
    double std_coherence = 0.0;  // population std over seeds
};

struct ScanResult {
    std::vector<ScanRow> rows;  // grid order
    std::size_t best_k = 0;     // argmax mean, ties -> smaller K
};

// Trains one model per (K, seed) and scores each with cv_model.
ScanResult scan_topic_counts(const std::vector<BowDoc>& bows, const Vocabulary& vocab,
                             const std::vector<std::vector<std::string>>& docs,
                             const std::vector<std::size_t>& grid, const LdaConfig& base,
                             const CoherenceConfig& ccfg,
                             const std::vector<std::uint64_t>& seeds,
                             std::size_t threads = 0);

std::string scan_csv(const ScanResult& result);
std::string scan_json(const ScanResult& result);

}  // namespace topicaudit
