#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "topicaudit/curate.hpp"
#include "topicaudit/error.hpp"

#include "test_util.hpp"

using namespace topicaudit;

namespace {

TopicAssignment assign(const std::string& id, std::size_t dominant) {
    TopicAssignment a;
    a.doc_id = id;
    a.dominant = dominant;
    return a;
}

// corpus of n docs with deterministic labels and topics; topic = i % 4,
// label Toxic when i % 3 == 0
struct PrunableCorpus {
    Corpus corpus;
    std::vector<TopicAssignment> assignments;

    explicit PrunableCorpus(std::size_t n) {
        std::vector<Document> docs;
        for (std::size_t i = 0; i < n; ++i) {
            std::string id = "d" + std::to_string(i);
            docs.push_back(testutil::doc(id, "x", i % 3 == 0 ? Label::Toxic : Label::Normal));
            assignments.push_back(assign(id, i % 4));
        }
        corpus = testutil::corpus_of(docs);
    }
};

std::vector<std::string> ids_of(const Corpus& c) {
    std::vector<std::string> out;
    for (const auto& d : c.documents) out.push_back(d.id);
    return out;
}

}  // namespace

TEST_CASE("prune with scope all drops whole topics") {
    // 10 docs, topics 0..3 cycling -> topics {1,3} hold docs 1,3,5,7,9
    PrunableCorpus fx(10);
    PruneSpec spec;
    spec.topic_ids = {1, 3};
    spec.scope = PruneScope::All;
    Corpus pruned = prune(fx.corpus, fx.assignments, spec);
    CHECK(pruned.documents.size() == 5);
    for (const auto& d : pruned.documents) {
        std::size_t i = std::stoul(d.id.substr(1));
        CHECK(i % 4 != 1);
        CHECK(i % 4 != 3);
    }
}

TEST_CASE("normal-only pruning spares the toxic members") {
    // topic 0: docs d0 (Toxic), d1, d2, d3 (Normal); topic 1: d4..d7 kept
    std::vector<Document> docs = {
        testutil::doc("d0", "x", Label::Toxic),  testutil::doc("d1", "x", Label::Normal),
        testutil::doc("d2", "x", Label::Normal), testutil::doc("d3", "x", Label::Normal),
        testutil::doc("d4", "x", Label::Normal), testutil::doc("d5", "x", Label::Toxic),
        testutil::doc("d6", "x", Label::Normal), testutil::doc("d7", "x", Label::Normal),
    };
    Corpus corpus = testutil::corpus_of(docs);
    std::vector<TopicAssignment> assignments;
    for (int i = 0; i < 8; ++i)
        assignments.push_back(assign("d" + std::to_string(i), i < 4 ? 0 : 1));

    PruneSpec spec;
    spec.topic_ids = {0};
    spec.scope = PruneScope::NormalOnly;
    Corpus pruned = prune(corpus, assignments, spec);
    CHECK(pruned.documents.size() == 5);
    CHECK(ids_of(pruned) == std::vector<std::string>{"d0", "d4", "d5", "d6", "d7"});
}

TEST_CASE("prune keeps survivor order and content") {
    PrunableCorpus fx(20);
    PruneSpec spec;
    spec.topic_ids = {2};
    Corpus pruned = prune(fx.corpus, fx.assignments, spec);
    std::size_t last = 0;
    bool first = true;
    for (const auto& d : pruned.documents) {
        std::size_t i = std::stoul(d.id.substr(1));
        if (!first) CHECK(i > last);
        last = i;
        first = false;
        CHECK(d.text == "x");  // untouched payload
    }
}

TEST_CASE("prune demands an assignment for every document") {
    PrunableCorpus fx(3);
    fx.assignments.pop_back();
    PruneSpec spec;
    spec.topic_ids = {0};
    try {
        prune(fx.corpus, fx.assignments, spec);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("d2") != std::string::npos);
    }
}

TEST_CASE("normal-only pruning refuses unlabeled documents") {
    Document d;
    d.id = "d0";
    d.text = "x";
    Corpus corpus = testutil::corpus_of({d});
    PruneSpec spec;
    spec.topic_ids = {5};  // not even the doc's topic
    spec.scope = PruneScope::NormalOnly;
    CHECK_THROWS_AS(prune(corpus, {assign("d0", 0)}, spec), DataError);
}

TEST_CASE("scope all equals normal-only minus the spared toxic docs") {
    PrunableCorpus fx(50);
    PruneSpec all_spec;
    all_spec.topic_ids = {1, 3};
    all_spec.scope = PruneScope::All;
    PruneSpec normal_spec = all_spec;
    normal_spec.scope = PruneScope::NormalOnly;

    auto survivors_all = ids_of(prune(fx.corpus, fx.assignments, all_spec));
    auto survivors_normal = ids_of(prune(fx.corpus, fx.assignments, normal_spec));

    // removing the targeted Toxic docs from the normal-only result must
    // reproduce the scope-all result, order included
    std::vector<std::string> reduced;
    for (const auto& id : survivors_normal) {
        std::size_t i = std::stoul(id.substr(1));
        bool targeted = (i % 4 == 1) || (i % 4 == 3);
        bool toxic = i % 3 == 0;
        if (!(targeted && toxic)) reduced.push_back(id);
    }
    CHECK(reduced == survivors_all);
}

TEST_CASE("prune spec can be drawn from curator categories") {
    CategoryMap map;
    map.entries[0] = {1, TriageAction::Keep, ""};
    map.entries[1] = {3, TriageAction::Keep, ""};
    map.entries[2] = {2, TriageAction::Keep, ""};
    map.entries[3] = {3, TriageAction::Keep, ""};
    PruneSpec spec = prune_spec_from_categories(map, {3}, PruneScope::NormalOnly);
    CHECK(spec.topic_ids == std::set<std::size_t>{1, 3});
    CHECK(spec.scope == PruneScope::NormalOnly);
    CHECK(prune_spec_from_categories(map, {1, 2}, PruneScope::All).topic_ids ==
          std::set<std::size_t>{0, 2});
}

TEST_CASE("prune_by_actions applies each topic's own action") {
    // topic 0 keep, topic 1 prune_all, topic 2 prune_normal_only
    std::vector<Document> docs = {
        testutil::doc("d0", "x", Label::Normal),  // topic 0, stays
        testutil::doc("d1", "x", Label::Toxic),   // topic 1, removed
        testutil::doc("d2", "x", Label::Normal),  // topic 1, removed
        testutil::doc("d3", "x", Label::Toxic),   // topic 2, stays
        testutil::doc("d4", "x", Label::Normal),  // topic 2, removed
    };
    Corpus corpus = testutil::corpus_of(docs);
    std::vector<TopicAssignment> assignments = {assign("d0", 0), assign("d1", 1),
                                                assign("d2", 1), assign("d3", 2),
                                                assign("d4", 2)};
    CategoryMap map;
    map.entries[0] = {1, TriageAction::Keep, ""};
    map.entries[1] = {3, TriageAction::PruneAll, ""};
    map.entries[2] = {3, TriageAction::PruneNormalOnly, ""};

    Corpus pruned = prune_by_actions(corpus, assignments, map);
    CHECK(ids_of(pruned) == std::vector<std::string>{"d0", "d3"});

    SUBCASE("a topic without a map entry is an error") {
        map.entries.erase(1);
        CHECK_THROWS_AS(prune_by_actions(corpus, assignments, map), DataError);
    }
}

namespace {

Corpus two_class_corpus(std::size_t n_toxic, std::size_t n_normal) {
    std::vector<Document> docs;
    for (std::size_t i = 0; i < n_toxic + n_normal; ++i)
        docs.push_back(testutil::doc("d" + std::to_string(i), "x",
                                     i < n_toxic ? Label::Toxic : Label::Normal));
    return testutil::corpus_of(docs);
}

}  // namespace

TEST_CASE("ratio sampling keeps all toxic and the rounded normal count") {
    Corpus corpus = two_class_corpus(100, 350);
    Corpus sampled = sample_ratio(corpus, 3.0, 42);
    auto counts = sampled.binary_counts();
    CHECK(counts[Label::Toxic] == 100);
    CHECK(counts[Label::Normal] == 300);
    CHECK(sampled.documents.size() == 400);
}

TEST_CASE("ratio sampling rounds half up") {
    // 1 toxic, ratio 0.5 -> round(0.5) = 1 normal
    Corpus corpus = two_class_corpus(1, 5);
    CHECK(sample_ratio(corpus, 0.5, 1).documents.size() == 2);
    // 3 toxic, ratio 0.5 -> round(1.5) = 2 normals
    Corpus corpus3 = two_class_corpus(3, 5);
    CHECK(sample_ratio(corpus3, 0.5, 1).documents.size() == 5);
}

TEST_CASE("ratio sampling reports needed vs available") {
    Corpus corpus = two_class_corpus(100, 150);
    try {
        sample_ratio(corpus, 2.0, 7);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string msg = e.what();
        CHECK(msg.find("200") != std::string::npos);
        CHECK(msg.find("150") != std::string::npos);
    }
}

TEST_CASE("ratio sampling validates its inputs") {
    Corpus corpus = two_class_corpus(2, 2);
    CHECK_THROWS_AS(sample_ratio(corpus, 0.0, 1), UsageError);
    CHECK_THROWS_AS(sample_ratio(corpus, -1.0, 1), UsageError);

    Document d;
    d.id = "u0";
    d.text = "x";
    corpus.documents.push_back(d);
    CHECK_THROWS_AS(sample_ratio(corpus, 1.0, 1), DataError);
}

TEST_CASE("sampling is deterministic in the seed and keeps input order") {
    Corpus corpus = two_class_corpus(20, 200);
    Corpus a = sample_ratio(corpus, 2.0, 99);
    Corpus b = sample_ratio(corpus, 2.0, 99);
    CHECK(ids_of(a) == ids_of(b));
    Corpus c = sample_ratio(corpus, 2.0, 100);
    CHECK(ids_of(a) != ids_of(c));

    // survivors keep their original relative order
    std::size_t last = 0;
    bool first = true;
    for (const auto& id : ids_of(a)) {
        std::size_t i = std::stoul(id.substr(1));
        if (!first) CHECK(i > last);
        last = i;
        first = false;
    }
}

TEST_CASE("fixed sampling draws exact class counts") {
    Corpus corpus = two_class_corpus(50, 80);
    Corpus sampled = sample_fixed(corpus, 10, 30, 5);
    auto counts = sampled.binary_counts();
    CHECK(counts[Label::Toxic] == 10);
    CHECK(counts[Label::Normal] == 30);

    CHECK(sample_fixed(corpus, 0, 0, 5).documents.empty());
    CHECK(ids_of(sample_fixed(corpus, 10, 30, 5)) == ids_of(sampled));
}

TEST_CASE("fixed sampling rejects requests beyond the corpus") {
    Corpus corpus = two_class_corpus(5, 5);
    try {
        sample_fixed(corpus, 6, 0, 1);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string msg = e.what();
        CHECK(msg.find("6") != std::string::npos);
        CHECK(msg.find("5") != std::string::npos);
    }
    CHECK_THROWS_AS(sample_fixed(corpus, 0, 6, 1), DataError);
}

TEST_CASE("the spec dispatcher matches the direct calls") {
    Corpus corpus = two_class_corpus(10, 40);

    SampleSpec ratio;
    ratio.mode = SampleMode::Ratio;
    ratio.normal_per_toxic = 2.0;
    ratio.seed = 3;
    CHECK(ids_of(sample(corpus, ratio)) == ids_of(sample_ratio(corpus, 2.0, 3)));

    SampleSpec fixed;
    fixed.mode = SampleMode::Fixed;
    fixed.n_toxic = 4;
    fixed.n_normal = 8;
    fixed.seed = 3;
    CHECK(ids_of(sample(corpus, fixed)) == ids_of(sample_fixed(corpus, 4, 8, 3)));
}
