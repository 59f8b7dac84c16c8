#include "topicaudit/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "topicaudit/error.hpp"
#include "topicaudit/rng.hpp"

namespace topicaudit {

namespace {

// Letters that cannot form a stopword or trip a stemmer rule: no vowels,
// no 's' (plural handling), no 'y' (treated as a vowel after a consonant).
constexpr char kPrefixes[] = "bcdfghjklm";
constexpr char kBody[] = "hjklmpqrtv";

std::string synth_word(char prefix, std::size_t i) {
    std::string w;
    w.push_back(prefix);
    w.push_back(kBody[(i / 10) % 10]);
    w.push_back(kBody[i % 10]);
    return w;
}

std::vector<std::string> word_group(char prefix, std::size_t n) {
    std::vector<std::string> words;
    words.reserve(n);
    for (std::size_t i = 0; i < n; ++i) words.push_back(synth_word(prefix, i));
    return words;
}

// Draws words by index; zipf weighs rank r as 1/(r+1), otherwise uniform.
class WordPicker {
public:
    WordPicker(std::size_t n, bool zipf) : cum_(n) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += zipf ? 1.0 / static_cast<double>(i + 1) : 1.0;
            cum_[i] = total;
        }
        for (double& c : cum_) c /= total;
    }

    std::size_t pick(Rng& rng) const {
        double u = rng.next_double();
        auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
        if (it == cum_.end()) --it;
        return static_cast<std::size_t>(it - cum_.begin());
    }

private:
    std::vector<double> cum_;
};

std::string doc_number(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%05zu", i);
    return buf;
}

}  // namespace

std::vector<std::string> planted_topic_words(const PlantedConfig& cfg, std::size_t topic) {
    if (cfg.n_topics > 10 || cfg.words_per_topic > 100)
        throw UsageError("planted corpus supports at most 10 topics of 100 words");
    if (topic >= cfg.n_topics) throw UsageError("planted topic index out of range");
    return word_group(kPrefixes[topic], cfg.words_per_topic);
}

Corpus make_planted_corpus(const PlantedConfig& cfg) {
    if (cfg.n_topics < 2) throw UsageError("need at least 2 planted topics");
    if (cfg.min_len < 1 || cfg.max_len < cfg.min_len)
        throw UsageError("bad planted document length range");
    std::vector<std::vector<std::string>> topics;
    for (std::size_t k = 0; k < cfg.n_topics; ++k)
        topics.push_back(planted_topic_words(cfg, k));
    WordPicker picker(cfg.words_per_topic, true);

    Corpus corpus;
    corpus.name = "planted";
    Rng root(cfg.seed);
    for (std::size_t i = 0; i < cfg.n_docs; ++i) {
        Rng rng(root.fork(i + 1));
        std::size_t dominant = i % cfg.n_topics;  // round robin keeps topics balanced
        std::size_t len = cfg.min_len + rng.below(cfg.max_len - cfg.min_len + 1);
        std::string text;
        for (std::size_t t = 0; t < len; ++t) {
            std::size_t topic = dominant;
            if (rng.next_double() < cfg.noise) {
                std::size_t other = rng.below(cfg.n_topics - 1);
                topic = other < dominant ? other : other + 1;
            }
            if (!text.empty()) text.push_back(' ');
            text += topics[topic][picker.pick(rng)];
        }
        Document doc;
        doc.id = "planted-" + doc_number(i);
        doc.text = std::move(text);
        doc.source = "planted";
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

std::vector<std::string> toxic_words() { return word_group('v', 40); }
std::vector<std::string> platform_words() { return word_group('w', 40); }
std::vector<std::string> general_words() { return word_group('x', 40); }

namespace {

struct DocRecipe {
    // per-token probability of the special group; the rest is general
    const std::vector<std::string>* special = nullptr;
    double special_share = 0.0;
};

std::string make_text(Rng& rng, const TwoDomainConfig& cfg, const DocRecipe& recipe,
                      const std::vector<std::string>& general, const WordPicker& picker) {
    std::size_t len = cfg.min_len + rng.below(cfg.max_len - cfg.min_len + 1);
    std::string text;
    for (std::size_t t = 0; t < len; ++t) {
        const std::vector<std::string>& group =
            (recipe.special && rng.next_double() < recipe.special_share) ? *recipe.special
                                                                         : general;
        if (!text.empty()) text.push_back(' ');
        text += group[picker.pick(rng)];
    }
    return text;
}

}  // namespace

TwoDomainData make_two_domain(const TwoDomainConfig& cfg) {
    if (cfg.min_len < 1 || cfg.max_len < cfg.min_len)
        throw UsageError("bad two-domain document length range");
    const std::vector<std::string> toxic = toxic_words();
    const std::vector<std::string> platform = platform_words();
    const std::vector<std::string> general = general_words();
    WordPicker picker(general.size(), false);

    Rng root(cfg.seed);
    std::uint64_t stream = 0;
    auto emit = [&](Corpus& out, const std::string& prefix, std::size_t first, std::size_t n,
                    Label label, const std::string& original, const std::string& source,
                    const DocRecipe& recipe) {
        for (std::size_t i = 0; i < n; ++i) {
            Rng rng(root.fork(++stream));
            Document doc;
            doc.id = prefix + doc_number(first + i);
            doc.text = make_text(rng, cfg, recipe, general, picker);
            doc.label = label;
            doc.original_label = original;
            doc.source = source;
            out.documents.push_back(std::move(doc));
        }
    };

    DocRecipe toxic_recipe{&toxic, cfg.toxic_share};
    DocRecipe platform_recipe{&platform, cfg.platform_share};
    DocRecipe plain{};

    if (cfg.platform_doc_fraction < 0 || cfg.platform_doc_fraction > 1)
        throw UsageError("platform_doc_fraction must be in [0, 1]");
    std::size_t platform_normals = static_cast<std::size_t>(
        cfg.platform_doc_fraction * static_cast<double>(cfg.source_normal) + 0.5);

    TwoDomainData data;
    data.source.name = "source";
    data.target.name = "target";
    emit(data.source, "src-tox-", 0, cfg.source_toxic, Label::Toxic, "toxic", "src",
         toxic_recipe);
    emit(data.source, "src-nrm-", 0, platform_normals, Label::Normal, "normal", "src",
         platform_recipe);
    emit(data.source, "src-nrm-", platform_normals, cfg.source_normal - platform_normals,
         Label::Normal, "normal", "src", plain);
    emit(data.target, "tgt-tox-", 0, cfg.target_toxic, Label::Toxic, "toxic", "tgt",
         toxic_recipe);
    emit(data.target, "tgt-nrm-", 0, cfg.target_normal, Label::Normal, "normal", "tgt", plain);
    return data;
}

}  // namespace topicaudit
