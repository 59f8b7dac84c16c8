#include "topicaudit/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include <json.hpp>

#include "topicaudit/error.hpp"
#include "topicaudit/parallel.hpp"

namespace topicaudit {

using nlohmann::json;

namespace {

// Per-slice accumulator over a fixed word list: presence counts per word
// and per unordered pair (upper triangle of a dense W x W matrix).
struct CountAccum {
    std::size_t total = 0;
    std::vector<std::size_t> word;
    std::vector<std::size_t> pair;  // row-major, only i < j used
    std::size_t w = 0;

    explicit CountAccum(std::size_t n) : word(n, 0), pair(n * n, 0), w(n) {}

    void add_run(const std::vector<std::uint32_t>& present, std::size_t run_len) {
        for (std::size_t i = 0; i < present.size(); ++i) {
            word[present[i]] += run_len;
            for (std::size_t j = i + 1; j < present.size(); ++j)
                pair[present[i] * w + present[j]] += run_len;
        }
    }

    void merge(const CountAccum& other) {
        total += other.total;
        for (std::size_t i = 0; i < word.size(); ++i) word[i] += other.word[i];
        for (std::size_t i = 0; i < pair.size(); ++i) pair[i] += other.pair[i];
    }
};

void count_doc(const std::vector<std::string>& tokens,
               const std::unordered_map<std::string, std::uint32_t>& id_of,
               std::size_t window_size, CountAccum& acc) {
    const std::size_t len = tokens.size();
    const std::size_t n_windows = len > window_size ? len - window_size + 1 : 1;
    acc.total += n_windows;

    // positions of interest words only
    std::vector<std::int64_t> wid(len, -1);
    std::vector<std::uint32_t> doc_words;
    for (std::size_t p = 0; p < len; ++p) {
        auto it = id_of.find(tokens[p]);
        if (it != id_of.end()) {
            wid[p] = it->second;
            doc_words.push_back(it->second);
        }
    }
    if (doc_words.empty()) return;
    std::sort(doc_words.begin(), doc_words.end());
    doc_words.erase(std::unique(doc_words.begin(), doc_words.end()), doc_words.end());

    std::vector<std::size_t> cnt(acc.w, 0);
    const std::size_t first_len = std::min(window_size, len);
    for (std::size_t p = 0; p < first_len; ++p)
        if (wid[p] >= 0) ++cnt[static_cast<std::size_t>(wid[p])];

    auto collect = [&](std::vector<std::uint32_t>& present) {
        present.clear();
        for (std::uint32_t id : doc_words)
            if (cnt[id] > 0) present.push_back(id);
    };

    std::vector<std::uint32_t> present;
    collect(present);
    std::size_t run_len = 1;
    for (std::size_t s = 1; s < n_windows; ++s) {
        bool changed = false;
        if (wid[s - 1] >= 0 && --cnt[static_cast<std::size_t>(wid[s - 1])] == 0) changed = true;
        const std::size_t incoming = s + window_size - 1;
        if (wid[incoming] >= 0 && ++cnt[static_cast<std::size_t>(wid[incoming])] == 1)
            changed = true;
        if (changed) {
            acc.add_run(present, run_len);
            collect(present);
            run_len = 1;
        } else {
            ++run_len;
        }
    }
    acc.add_run(present, run_len);
}

}  // namespace

WindowCounts window_counts(const std::vector<std::vector<std::string>>& docs,
                           const std::set<std::string>& words, const CoherenceConfig& cfg,
                           std::size_t threads) {
    std::vector<std::string> word_list(words.begin(), words.end());
    std::unordered_map<std::string, std::uint32_t> id_of;
    id_of.reserve(word_list.size());
    for (std::size_t i = 0; i < word_list.size(); ++i)
        id_of[word_list[i]] = static_cast<std::uint32_t>(i);

    const std::size_t workers = resolve_threads(threads);
    const std::size_t slices = slice_count(docs.size(), workers);
    std::vector<CountAccum> partial(std::max<std::size_t>(slices, 1),
                                    CountAccum(word_list.size()));
    parallel_slices(docs.size(), workers, [&](std::size_t b, std::size_t e, std::size_t s_idx) {
        for (std::size_t i = b; i < e; ++i)
            count_doc(docs[i], id_of, cfg.window_size, partial[s_idx]);
    });
    for (std::size_t s = 1; s < slices; ++s) partial[0].merge(partial[s]);
    const CountAccum& acc = partial[0];

    WindowCounts out;
    out.total_windows = acc.total;
    for (std::size_t i = 0; i < word_list.size(); ++i)
        if (acc.word[i] > 0) out.word_windows[word_list[i]] = acc.word[i];
    for (std::size_t i = 0; i < word_list.size(); ++i)
        for (std::size_t j = i + 1; j < word_list.size(); ++j) {
            const std::size_t c = acc.pair[i * acc.w + j];
            if (c == 0) continue;
            auto key = word_list[i] < word_list[j]
                           ? std::make_pair(word_list[i], word_list[j])
                           : std::make_pair(word_list[j], word_list[i]);
            out.pair_windows[key] = c;
        }
    return out;
}

double npmi(const WindowCounts& counts, const std::string& wi, const std::string& wj,
            const CoherenceConfig& cfg) {
    const std::size_t ci = counts.word(wi);
    const std::size_t cj = counts.word(wj);
    if (ci == 0 || cj == 0 || counts.total_windows == 0) return 0.0;
    const double total = static_cast<double>(counts.total_windows);
    const double joint = static_cast<double>(counts.pair(wi, wj)) / total + cfg.epsilon;
    const double pi = static_cast<double>(ci) / total;
    const double pj = static_cast<double>(cj) / total;
    const double den = -std::log(joint);
    if (den == 0.0) return 0.0;
    return std::log(joint / (pi * pj)) / den;
}

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double cv_topic(const std::vector<std::string>& top_words, const WindowCounts& counts,
                const CoherenceConfig& cfg) {
    const std::size_t n = top_words.size();
    if (n < 2) throw UsageError("topic coherence needs at least 2 words");
    std::vector<std::vector<double>> ctx(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            ctx[i][j] = std::pow(npmi(counts, top_words[i], top_words[j], cfg),
                                 cfg.npmi_exponent);
    std::vector<double> whole(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) whole[j] += ctx[i][j];
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += cosine(ctx[i], whole);
    return sum / static_cast<double>(n);
}

double cv_model(const TopicModel& model, const Vocabulary& vocab,
                const std::vector<std::vector<std::string>>& docs,
                const CoherenceConfig& cfg, std::size_t threads) {
    require_vocab(model, vocab);
    std::vector<std::vector<std::string>> topics(model.k());
    std::set<std::string> interest;
    for (std::size_t k = 0; k < model.k(); ++k) {
        for (const auto& [term, weight] : top_words(model, vocab, k, cfg.top_n)) {
            topics[k].push_back(term);
            interest.insert(term);
        }
    }
    const WindowCounts counts = window_counts(docs, interest, cfg, threads);
    double sum = 0.0;
    for (std::size_t k = 0; k < model.k(); ++k) sum += cv_topic(topics[k], counts, cfg);
    return sum / static_cast<double>(model.k());
}

ScanResult scan_topic_counts(const std::vector<BowDoc>& bows, const Vocabulary& vocab,
                             const std::vector<std::vector<std::string>>& docs,
                             const std::vector<std::size_t>& grid, const LdaConfig& base,
                             const CoherenceConfig& ccfg,
                             const std::vector<std::uint64_t>& seeds, std::size_t threads) {
    if (grid.empty()) throw UsageError("topic-count grid is empty");
    if (seeds.empty()) throw UsageError("topic-count scan needs at least one seed");
    ScanResult result;
    for (std::size_t k : grid) {
        std::vector<double> scores;
        scores.reserve(seeds.size());
        for (std::uint64_t seed : seeds) {
            LdaConfig cfg = base;
            cfg.k = k;
            cfg.seed = seed;
            try {
                const TopicModel model = train(bows, vocab, cfg, threads);
                scores.push_back(cv_model(model, vocab, docs, ccfg, threads));
            } catch (const Error& e) {
                throw DataError("scan failed at K=" + std::to_string(k) + ", seed=" +
                                std::to_string(seed) + ": " + e.what());
            }
        }
        double mean = 0.0;
        for (double s : scores) mean += s;
        mean /= static_cast<double>(scores.size());
        double var = 0.0;
        for (double s : scores) var += (s - mean) * (s - mean);
        var /= static_cast<double>(scores.size());
        result.rows.push_back({k, mean, std::sqrt(var)});
    }
    result.best_k = result.rows.front().k;
    double best_mean = result.rows.front().mean_coherence;
    for (const ScanRow& row : result.rows) {
        if (row.mean_coherence > best_mean ||
            (row.mean_coherence == best_mean && row.k < result.best_k)) {
            best_mean = row.mean_coherence;
            result.best_k = row.k;
        }
    }
    return result;
}

std::string scan_csv(const ScanResult& result) {
    std::string out = "k,mean_coherence,std_coherence\n";
    char buf[96];
    for (const ScanRow& row : result.rows) {
        std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g\n", row.k, row.mean_coherence,
                      row.std_coherence);
        out += buf;
    }
    return out;
}

std::string scan_json(const ScanResult& result) {
    json j;
    j["best_k"] = result.best_k;
    json rows = json::array();
    for (const ScanRow& row : result.rows)
        rows.push_back({{"k", row.k},
                        {"mean_coherence", row.mean_coherence},
                        {"std_coherence", row.std_coherence}});
    j["grid"] = rows;
    return j.dump(2) + "\n";
}

}  // namespace topicaudit
