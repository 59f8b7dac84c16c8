#include "topicaudit/textprep.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "topicaudit/error.hpp"
#include "topicaudit/parallel.hpp"
#include "topicaudit/sha256.hpp"

namespace topicaudit {

using nlohmann::json;

std::vector<std::string> tokenize(const std::string& text, const TokenizerConfig& cfg) {
    std::vector<std::string> out;
    const StopwordSet& stops = cfg.stoplist();
    std::string tok;
    auto flush = [&] {
        if (tok.empty()) return;
        std::string word;
        word.swap(tok);
        if (word.size() < cfg.min_token_len || word.size() > cfg.max_token_len) return;
        if (stops.count(word)) return;
        out.push_back(cfg.stem ? porter_stem(word) : word);
    };
    for (char c : text) {
        // byte-level split keeps this independent of locale; multi-byte
        // UTF-8 sequences act as separators, which is what we want
        if (c >= 'a' && c <= 'z') {
            tok.push_back(c);
        } else if (c >= 'A' && c <= 'Z') {
            tok.push_back(cfg.lowercase ? static_cast<char>(c - 'A' + 'a') : c);
        } else {
            flush();
        }
    }
    flush();
    return out;
}

std::vector<std::vector<std::string>> tokenize_corpus(const Corpus& corpus,
                                                      const TokenizerConfig& cfg,
                                                      std::size_t threads) {
    std::vector<std::vector<std::string>> out(corpus.documents.size());
    parallel_slices(corpus.documents.size(), resolve_threads(threads),
                    [&](std::size_t begin, std::size_t end, std::size_t) {
                        for (std::size_t i = begin; i < end; ++i)
                            out[i] = tokenize(corpus.documents[i].text, cfg);
                    });
    return out;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq,
                       VocabFilter filter)
    : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)), filter_(filter) {
    if (terms_.size() != doc_freq_.size())
        throw DataError("vocabulary terms and doc_freq lengths differ");
    term_to_id_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) term_to_id_[terms_[i]] = i;
    if (term_to_id_.size() != terms_.size())
        throw DataError("vocabulary contains a duplicate term");
}

std::int64_t Vocabulary::id_of(const std::string& term) const {
    auto it = term_to_id_.find(term);
    return it == term_to_id_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::string Vocabulary::content_hash() const {
    Sha256 h;
    for (const auto& t : terms_) {
        h.update(t);
        h.update("\n", 1);
    }
    return to_hex(h.digest());
}

void Vocabulary::save(const std::string& path) const {
    json j;
    j["version"] = 1;
    j["filter"] = {{"min_doc_freq", filter_.min_doc_freq},
                   {"max_doc_fraction", filter_.max_doc_fraction},
                   {"max_terms", filter_.max_terms}};
    j["terms"] = terms_;
    j["doc_freq"] = doc_freq_;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write vocabulary file: " + path);
    out << j.dump(2) << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open vocabulary file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw DataError("vocabulary file " + path + ": " + e.what());
    }
    if (!j.contains("version") || !j["version"].is_number_integer())
        throw DataError("vocabulary file " + path + ": missing version");
    if (j["version"].get<int>() != 1)
        throw DataError("vocabulary file " + path + ": unsupported version " +
                        j["version"].dump());
    VocabFilter filter;
    if (j.contains("filter")) {
        const auto& f = j["filter"];
        filter.min_doc_freq = f.value("min_doc_freq", filter.min_doc_freq);
        filter.max_doc_fraction = f.value("max_doc_fraction", filter.max_doc_fraction);
        filter.max_terms = f.value("max_terms", filter.max_terms);
    }
    auto terms = j.at("terms").get<std::vector<std::string>>();
    auto doc_freq = j.at("doc_freq").get<std::vector<std::size_t>>();
    return Vocabulary(std::move(terms), std::move(doc_freq), filter);
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& tokenized,
                            const VocabFilter& filter) {
    std::unordered_map<std::string, std::size_t> df;
    for (const auto& tokens : tokenized) {
        std::set<std::string> seen(tokens.begin(), tokens.end());
        for (const auto& t : seen) ++df[t];
    }
    const double n_docs = static_cast<double>(tokenized.size());
    std::vector<std::pair<std::string, std::size_t>> kept;
    kept.reserve(df.size());
    for (auto& [term, freq] : df) {
        if (freq < filter.min_doc_freq) continue;
        if (static_cast<double>(freq) / n_docs > filter.max_doc_fraction) continue;
        kept.emplace_back(term, freq);
    }
    if (kept.empty()) throw DataError("empty vocabulary");
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (kept.size() > filter.max_terms) kept.resize(filter.max_terms);
    std::vector<std::string> terms;
    std::vector<std::size_t> doc_freq;
    terms.reserve(kept.size());
    doc_freq.reserve(kept.size());
    for (auto& [term, freq] : kept) {
        terms.push_back(std::move(term));
        doc_freq.push_back(freq);
    }
    return Vocabulary(std::move(terms), std::move(doc_freq), filter);
}

BowDoc to_bow(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    std::map<std::uint32_t, std::uint32_t> counts;
    for (const auto& t : tokens) {
        auto id = vocab.id_of(t);
        if (id >= 0) ++counts[static_cast<std::uint32_t>(id)];
    }
    BowDoc doc;
    doc.entries.assign(counts.begin(), counts.end());
    return doc;
}

std::vector<BowDoc> to_bow_corpus(const std::vector<std::vector<std::string>>& tokenized,
                                  const Vocabulary& vocab, std::size_t threads) {
    std::vector<BowDoc> out(tokenized.size());
    parallel_slices(tokenized.size(), resolve_threads(threads),
                    [&](std::size_t begin, std::size_t end, std::size_t) {
                        for (std::size_t i = begin; i < end; ++i)
                            out[i] = to_bow(tokenized[i], vocab);
                    });
    return out;
}

}  // namespace topicaudit
