#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "topicaudit/coherence.hpp"
#include "topicaudit/error.hpp"
#include "topicaudit/textprep.hpp"

using namespace topicaudit;

namespace {

WindowCounts count(const std::vector<std::vector<std::string>>& docs,
                   const std::set<std::string>& words, std::size_t window_size) {
    CoherenceConfig cfg;
    cfg.window_size = window_size;
    return window_counts(docs, words, cfg);
}

}  // namespace

TEST_CASE("a document shorter than the window yields one window") {
    auto c = count({{"a", "b"}}, {"a", "b"}, 110);
    CHECK(c.total_windows == 1);
    CHECK(c.word("a") == 1);
    CHECK(c.word("b") == 1);
    CHECK(c.pair("a", "b") == 1);
}

TEST_CASE("words outside the window never pair") {
    // doc [a x x b], window 2 -> windows (a,x) (x,x) (x,b)
    auto c = count({{"a", "x", "x", "b"}}, {"a", "b"}, 2);
    CHECK(c.total_windows == 3);
    CHECK(c.word("a") == 1);
    CHECK(c.word("b") == 1);
    CHECK(c.pair("a", "b") == 0);
}

TEST_CASE("window counts equal brute-force enumeration") {
    // deterministic pseudo-random docs over a 6-word alphabet
    const std::vector<std::string> alphabet = {"a", "b", "c", "d", "e", "f"};
    std::vector<std::vector<std::string>> docs;
    std::uint64_t state = 12345;
    auto next = [&state]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return state >> 33;
    };
    for (int d = 0; d < 100; ++d) {
        std::vector<std::string> doc;
        std::size_t len = 1 + next() % 12;
        for (std::size_t i = 0; i < len; ++i) doc.push_back(alphabet[next() % 6]);
        docs.push_back(std::move(doc));
    }
    const std::size_t ws = 4;
    std::set<std::string> words(alphabet.begin(), alphabet.end());
    auto fast = count(docs, words, ws);

    // brute force: slide every window, count membership per window
    std::size_t total = 0;
    std::map<std::string, std::size_t> word_hits;
    std::map<std::pair<std::string, std::string>, std::size_t> pair_hits;
    for (const auto& doc : docs) {
        std::size_t n_windows = doc.size() > ws ? doc.size() - ws + 1 : 1;
        for (std::size_t s = 0; s < n_windows; ++s) {
            ++total;
            std::set<std::string> present;
            for (std::size_t i = s; i < std::min(doc.size(), s + ws); ++i)
                present.insert(doc[i]);
            for (const auto& w : present) ++word_hits[w];
            for (auto it = present.begin(); it != present.end(); ++it)
                for (auto jt = std::next(it); jt != present.end(); ++jt)
                    ++pair_hits[{*it, *jt}];
        }
    }
    CHECK(fast.total_windows == total);
    for (const auto& w : alphabet) CHECK(fast.word(w) == word_hits[w]);
    for (std::size_t i = 0; i < alphabet.size(); ++i)
        for (std::size_t j = i + 1; j < alphabet.size(); ++j)
            CHECK(fast.pair(alphabet[i], alphabet[j]) ==
                  pair_hits[{alphabet[i], alphabet[j]}]);
}

TEST_CASE("npmi hits its limit cases") {
    CoherenceConfig cfg;

    // always co-occurring words approach +1
    std::vector<std::vector<std::string>> together(10, {"a", "b"});
    together.resize(20, {"c"});  // pad with unrelated windows
    auto c1 = count(together, {"a", "b", "c"}, 110);
    CHECK(npmi(c1, "a", "b", cfg) == doctest::Approx(1.0).epsilon(1e-6));

    // independent words stay near 0: a and b each in half the windows,
    // together in a quarter
    std::vector<std::vector<std::string>> indep;
    indep.push_back({"a", "b"});
    indep.push_back({"a"});
    indep.push_back({"b"});
    indep.push_back({"x"});
    auto c2 = count(indep, {"a", "b"}, 110);
    CHECK(npmi(c2, "a", "b", cfg) == doctest::Approx(0.0).epsilon(1e-6));

    // frequent words that never co-occur are negative
    std::vector<std::vector<std::string>> apart;
    for (int i = 0; i < 5; ++i) apart.push_back({"a"});
    for (int i = 0; i < 5; ++i) apart.push_back({"b"});
    auto c3 = count(apart, {"a", "b"}, 110);
    CHECK(npmi(c3, "a", "b", cfg) < 0.0);

    // a word absent from the corpus defines npmi as 0
    CHECK(npmi(c3, "a", "zz", cfg) == 0.0);
}

TEST_CASE("npmi stays within [-1, 1]") {
    CoherenceConfig cfg;
    std::vector<std::vector<std::string>> docs = {
        {"a", "b", "c"}, {"a", "b"}, {"a"}, {"b", "c"}, {"c"}, {"d"}};
    auto c = count(docs, {"a", "b", "c", "d"}, 110);
    for (const auto& wi : {"a", "b", "c", "d"})
        for (const auto& wj : {"a", "b", "c", "d"}) {
            double v = npmi(c, wi, wj, cfg);
            CHECK(v <= 1.0 + 1e-9);
            CHECK(v >= -1.0 - 1e-9);
        }
}

TEST_CASE("perfectly co-occurring pair scores coherence 1") {
    std::vector<std::vector<std::string>> docs(8, {"a", "b"});
    auto c = count(docs, {"a", "b"}, 110);
    CoherenceConfig cfg;
    CHECK(cv_topic({"a", "b"}, c, cfg) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("identity npmi matrix gives the hand-computed cosine") {
    // independent words (p_ab = p_a * p_b) zero the off-diagonal while the
    // diagonal convention pair(w,w)=word(w) puts ~1 on it, so the context
    // vectors are (1,0) and (0,1). Against their sum (1,1) each cosine is
    // 1/sqrt(2) and the topic scores ~0.7071.
    std::vector<std::vector<std::string>> docs = {{"a", "b"}, {"a"}, {"b"}, {"x"}};
    auto c = count(docs, {"a", "b"}, 110);
    CoherenceConfig cfg;
    CHECK(cv_topic({"a", "b"}, c, cfg) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("cv_topic refuses a single-word topic") {
    auto c = count({{"a", "b"}}, {"a", "b"}, 110);
    CHECK_THROWS_AS(cv_topic({"a"}, c, CoherenceConfig{}), UsageError);
}

TEST_CASE("cv_topic is invariant under word order") {
    std::vector<std::vector<std::string>> docs = {
        {"a", "b", "c"}, {"b", "c"}, {"a", "c"}, {"a"}, {"b"}, {"d", "a"}};
    auto c = count(docs, {"a", "b", "c"}, 110);
    CoherenceConfig cfg;
    CHECK(cv_topic({"a", "b", "c"}, c, cfg) ==
          doctest::Approx(cv_topic({"c", "a", "b"}, c, cfg)).epsilon(1e-12));
}

TEST_CASE("cv_topic lies in [-1, 1]") {
    std::vector<std::vector<std::string>> docs = {
        {"a", "b"}, {"a"}, {"b"}, {"c", "d"}, {"c"}, {"d", "a"}};
    auto c = count(docs, {"a", "b", "c", "d"}, 110);
    CoherenceConfig cfg;
    double v = cv_topic({"a", "b", "c", "d"}, c, cfg);
    CHECK(v <= 1.0);
    CHECK(v >= -1.0);
}

TEST_CASE("a one-topic model scores exactly its topic's coherence") {
    std::vector<std::vector<std::string>> tokens(20, {"aa", "bb", "cc", "dd"});
    VocabFilter f;
    f.min_doc_freq = 1;
    f.max_doc_fraction = 1.0;
    Vocabulary vocab = build_vocabulary(tokens, f);
    auto bows = to_bow_corpus(tokens, vocab);
    LdaConfig cfg;
    cfg.k = 1;
    cfg.seed = 4;
    TopicModel model = train(bows, vocab, cfg);

    CoherenceConfig ccfg;
    std::vector<std::string> words;
    std::set<std::string> interest;
    for (const auto& [term, weight] : top_words(model, vocab, 0, ccfg.top_n)) {
        words.push_back(term);
        interest.insert(term);
    }
    auto counts = window_counts(tokens, interest, ccfg);
    CHECK(cv_model(model, vocab, tokens, ccfg) ==
          doctest::Approx(cv_topic(words, counts, ccfg)).epsilon(1e-12));
}

TEST_CASE("cv_model is invariant under topic reordering") {
    std::vector<std::vector<std::string>> tokens;
    for (int i = 0; i < 30; ++i) tokens.push_back({"aa", "aa", "bb"});
    for (int i = 0; i < 30; ++i) tokens.push_back({"cc", "cc", "dd"});
    VocabFilter f;
    f.min_doc_freq = 1;
    f.max_doc_fraction = 1.0;
    Vocabulary vocab = build_vocabulary(tokens, f);
    auto bows = to_bow_corpus(tokens, vocab);
    LdaConfig cfg;
    cfg.k = 2;
    cfg.seed = 6;
    cfg.passes = 3;
    cfg.chunk_size = 20;
    TopicModel model = train(bows, vocab, cfg);

    TopicModel swapped = model;
    for (std::size_t j = 0; j < vocab.size(); ++j)
        std::swap(swapped.lambda_flat()[0 * vocab.size() + j],
                  swapped.lambda_flat()[1 * vocab.size() + j]);

    CoherenceConfig ccfg;
    CHECK(cv_model(model, vocab, tokens, ccfg) ==
          doctest::Approx(cv_model(swapped, vocab, tokens, ccfg)).epsilon(1e-12));
}

TEST_CASE("scan takes the argmax and breaks ties toward smaller K") {
    // build a tiny corpus and force a deterministic scan over one seed
    std::vector<std::vector<std::string>> tokens;
    for (int i = 0; i < 30; ++i) tokens.push_back({"aa", "aa", "bb"});
    for (int i = 0; i < 30; ++i) tokens.push_back({"cc", "cc", "dd"});
    VocabFilter f;
    f.min_doc_freq = 1;
    f.max_doc_fraction = 1.0;
    Vocabulary vocab = build_vocabulary(tokens, f);
    auto bows = to_bow_corpus(tokens, vocab);
    LdaConfig base;
    base.passes = 3;
    base.chunk_size = 20;

    SUBCASE("single candidate grid returns it") {
        ScanResult r = scan_topic_counts(bows, vocab, tokens, {7}, base, CoherenceConfig{},
                                         {11});
        CHECK(r.best_k == 7);
        REQUIRE(r.rows.size() == 1);
        CHECK(r.rows[0].k == 7);
    }

    SUBCASE("repeated grid entry ties to the earlier (equal) K") {
        // same K listed twice produces identical means; argmax must keep
        // the first by the smaller-K rule
        ScanResult r = scan_topic_counts(bows, vocab, tokens, {3, 3}, base,
                                         CoherenceConfig{}, {11, 12});
        CHECK(r.rows[0].mean_coherence == doctest::Approx(r.rows[1].mean_coherence));
        CHECK(r.best_k == 3);
    }
}

TEST_CASE("scan rows carry the population std over seeds") {
    std::vector<std::vector<std::string>> tokens;
    for (int i = 0; i < 40; ++i) tokens.push_back({"aa", "bb"});
    for (int i = 0; i < 40; ++i) tokens.push_back({"cc", "dd"});
    VocabFilter f;
    f.min_doc_freq = 1;
    f.max_doc_fraction = 1.0;
    Vocabulary vocab = build_vocabulary(tokens, f);
    auto bows = to_bow_corpus(tokens, vocab);
    LdaConfig base;
    base.passes = 2;
    base.chunk_size = 40;
    ScanResult r =
        scan_topic_counts(bows, vocab, tokens, {2}, base, CoherenceConfig{}, {1, 2, 3});
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].std_coherence >= 0.0);
    // single seed -> zero std
    ScanResult one =
        scan_topic_counts(bows, vocab, tokens, {2}, base, CoherenceConfig{}, {1});
    CHECK(one.rows[0].std_coherence == 0.0);
}

TEST_CASE("scan csv format is stable") {
    std::vector<std::vector<std::string>> tokens(20, {"aa", "bb"});
    VocabFilter f;
    f.min_doc_freq = 1;
    f.max_doc_fraction = 1.0;
    Vocabulary vocab = build_vocabulary(tokens, f);
    auto bows = to_bow_corpus(tokens, vocab);
    LdaConfig base;
    ScanResult r =
        scan_topic_counts(bows, vocab, tokens, {2, 3}, base, CoherenceConfig{}, {5});
    std::string csv = scan_csv(r);
    CHECK(csv.rfind("k,mean_coherence,std_coherence\n", 0) == 0);
    CHECK(csv.find("\n2,") != std::string::npos);
    CHECK(csv.find("\n3,") != std::string::npos);
    std::string js = scan_json(r);
    CHECK(js.find("best_k") != std::string::npos);
}
