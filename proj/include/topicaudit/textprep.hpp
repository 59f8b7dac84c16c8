#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "topicaudit/corpus.hpp"

namespace topicaudit {

// Classic Porter stemmer (the reference implementation's behavior,
// including its two documented departures). Expects a lowercase word.
std::string porter_stem(const std::string& word);

using StopwordSet = std::set<std::string>;

// Bundled default English stop list (~300 words).
const StopwordSet& builtin_stopwords();

// One word per line, '#' starts a comment, blank lines ignored.
StopwordSet load_stopwords(const std::string& path);

struct TokenizerConfig {
    bool lowercase = true;
    std::size_t min_token_len = 2;
    std::size_t max_token_len = 15;
    std::shared_ptr<const StopwordSet> stopwords;  // null -> builtin list
    bool stem = true;

    const StopwordSet& stoplist() const {
        return stopwords ? *stopwords : builtin_stopwords();
    }
};

// Split on any non-alphabetic byte, lowercase, drop tokens outside
// [min_token_len, max_token_len], drop stopwords, then Porter-stem.
// Length and stopword filters see the unstemmed token.
std::vector<std::string> tokenize(const std::string& text, const TokenizerConfig& cfg);

// tokenize() for every document; parallel over documents.
std::vector<std::vector<std::string>> tokenize_corpus(const Corpus& corpus,
                                                      const TokenizerConfig& cfg,
                                                      std::size_t threads = 0);

struct VocabFilter {
    std::size_t min_doc_freq = 5;
    double max_doc_fraction = 0.5;
    std::size_t max_terms = 100000;
};

class Vocabulary {
public:
    Vocabulary() = default;
    Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq,
               VocabFilter filter);

    std::size_t size() const { return terms_.size(); }
    const std::vector<std::string>& terms() const { return terms_; }
    const std::vector<std::size_t>& doc_freq() const { return doc_freq_; }
    const VocabFilter& filter() const { return filter_; }

    const std::string& term(std::size_t id) const { return terms_.at(id); }
    // -1 when out of vocabulary.
    std::int64_t id_of(const std::string& term) const;

    // SHA-256 over the term list; binds topic models to their vocabulary.
    std::string content_hash() const;

    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);

private:
    std::vector<std::string> terms_;
    std::vector<std::size_t> doc_freq_;
    std::unordered_map<std::string, std::size_t> term_to_id_;
    VocabFilter filter_;
};

// Terms with doc_freq < min_doc_freq or doc_freq/N > max_doc_fraction are
// removed; survivors are capped at max_terms by descending doc_freq (ties
// lexicographic) and ids assigned in that order.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& tokenized,
                            const VocabFilter& filter);

struct BowDoc {
    // (term_id, count), term_ids strictly increasing, counts >= 1
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;

    std::size_t token_count() const {
        std::size_t n = 0;
        for (const auto& [_, c] : entries) n += c;
        return n;
    }
};

// Out-of-vocabulary tokens are dropped; counts aggregated; sorted by id.
BowDoc to_bow(const std::vector<std::string>& tokens, const Vocabulary& vocab);

std::vector<BowDoc> to_bow_corpus(const std::vector<std::vector<std::string>>& tokenized,
                                  const Vocabulary& vocab, std::size_t threads = 0);

}  // namespace topicaudit
