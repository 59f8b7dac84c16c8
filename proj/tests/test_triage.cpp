#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "topicaudit/error.hpp"
#include "topicaudit/triage.hpp"

#include "test_util.hpp"

using namespace topicaudit;

namespace {

// tiny trained model so topic_report has real top_words to pull; the
// report arithmetic itself runs on hand-built assignments
TopicModel tiny_model(std::size_t k, Vocabulary& vocab_out) {
    std::vector<std::vector<std::string>> tokens;
    for (int i = 0; i < 20; ++i) tokens.push_back({"aa", "aa", "bb"});
    for (int i = 0; i < 20; ++i) tokens.push_back({"cc", "cc", "dd"});
    VocabFilter f;
    f.min_doc_freq = 1;
    f.max_doc_fraction = 1.0;
    vocab_out = build_vocabulary(tokens, f);
    auto bows = to_bow_corpus(tokens, vocab_out);
    LdaConfig cfg;
    cfg.k = k;
    cfg.seed = 11;
    cfg.passes = 2;
    cfg.chunk_size = 20;
    return train(bows, vocab_out, cfg);
}

TopicAssignment assign(const std::string& id, std::size_t dominant) {
    TopicAssignment a;
    a.doc_id = id;
    a.dominant = dominant;
    return a;
}

}  // namespace

TEST_CASE("single-topic report arithmetic") {
    Vocabulary vocab;
    TopicModel model = tiny_model(2, vocab);
    Corpus corpus = testutil::corpus_of({
        testutil::doc("d0", "x", Label::Toxic),
        testutil::doc("d1", "x", Label::Normal),
        testutil::doc("d2", "x", Label::Normal),
        testutil::doc("d3", "x", Label::Normal),
    });
    std::vector<TopicAssignment> assignments = {assign("d0", 0), assign("d1", 0),
                                                assign("d2", 0), assign("d3", 0)};
    auto report = topic_report(model, vocab, assignments, corpus);
    REQUIRE(report.size() == 2);
    CHECK(report[0].doc_count == 4);
    CHECK(report[0].dataset_fraction == doctest::Approx(1.0));
    CHECK(report[0].toxic_fraction == doctest::Approx(0.25));
    CHECK(report[0].toxic_share == doctest::Approx(1.0));
    CHECK(report[0].normal_count == 3);
    CHECK(report[1].doc_count == 0);
    CHECK(report[1].dataset_fraction == 0.0);
    CHECK(report[1].toxic_fraction == 0.0);
    CHECK(report[1].toxic_share == 0.0);
    CHECK(report[0].top_words.size() == vocab.size());  // top_n clips to V
}

TEST_CASE("zero-toxic corpus reports zero toxic stats") {
    Vocabulary vocab;
    TopicModel model = tiny_model(2, vocab);
    Corpus corpus = testutil::corpus_of({
        testutil::doc("d0", "x", Label::Normal),
        testutil::doc("d1", "x", Label::Normal),
    });
    std::vector<TopicAssignment> assignments = {assign("d0", 0), assign("d1", 1)};
    auto report = topic_report(model, vocab, assignments, corpus);
    for (const auto& s : report) {
        CHECK(s.toxic_fraction == 0.0);
        CHECK(s.toxic_share == 0.0);
    }
}

TEST_CASE("report sums reproduce the corpus") {
    Vocabulary vocab;
    TopicModel model = tiny_model(2, vocab);
    std::vector<Document> docs;
    std::vector<TopicAssignment> assignments;
    for (int i = 0; i < 10; ++i) {
        std::string id = "d" + std::to_string(i);
        docs.push_back(testutil::doc(id, "x", i % 3 == 0 ? Label::Toxic : Label::Normal));
        assignments.push_back(assign(id, i % 2));
    }
    Corpus corpus = testutil::corpus_of(docs);
    auto report = topic_report(model, vocab, assignments, corpus);
    std::size_t total = 0;
    double frac = 0.0, share = 0.0;
    for (const auto& s : report) {
        total += s.doc_count;
        frac += s.dataset_fraction;
        share += s.toxic_share;
    }
    CHECK(total == corpus.documents.size());
    CHECK(frac == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(share == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("report rejects mismatched assignments") {
    Vocabulary vocab;
    TopicModel model = tiny_model(2, vocab);
    Corpus corpus = testutil::corpus_of({testutil::doc("d0", "x", Label::Toxic)});

    SUBCASE("count mismatch") {
        CHECK_THROWS_AS(topic_report(model, vocab, {}, corpus), DataError);
    }
    SUBCASE("id mismatch names both ids") {
        try {
            topic_report(model, vocab, {assign("other", 0)}, corpus);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            std::string msg = e.what();
            CHECK(msg.find("other") != std::string::npos);
            CHECK(msg.find("d0") != std::string::npos);
        }
    }
    SUBCASE("topic out of range") {
        CHECK_THROWS_AS(topic_report(model, vocab, {assign("d0", 2)}, corpus), DataError);
    }
}

TEST_CASE("rendered report follows the fixed layout") {
    Vocabulary vocab;
    TopicModel model = tiny_model(2, vocab);
    Corpus corpus = testutil::corpus_of({
        testutil::doc("d0", "x", Label::Toxic),
        testutil::doc("d1", "x", Label::Normal),
        testutil::doc("d2", "x", Label::Normal),
        testutil::doc("d3", "x", Label::Normal),
    });
    std::vector<TopicAssignment> assignments = {assign("d0", 0), assign("d1", 0),
                                                assign("d2", 0), assign("d3", 0)};
    auto report = topic_report(model, vocab, assignments, corpus);
    std::string text = render_topic_report(report);
    CHECK(text.find("Topic #0:") != std::string::npos);
    CHECK(text.find("Topic #1:") != std::string::npos);
    CHECK(text.find("4 documents  - 1.000 of dataset") != std::string::npos);
    CHECK(text.find("0.25 labeled as Toxic and 1.00 of all Toxic") != std::string::npos);
    CHECK(text.find("*\"") != std::string::npos);  // weighted top-word products

    std::string js = topic_report_json(report);
    CHECK(js.find("\"doc_count\": 4") != std::string::npos);
    CHECK(js.find("\"toxic_fraction\": 0.25") != std::string::npos);
}

TEST_CASE("all-category-1 distribution puts every class fully in C1") {
    CategoryMap map;
    map.entries[0] = {1, TriageAction::Keep, ""};
    map.entries[1] = {1, TriageAction::Keep, ""};
    Corpus corpus = testutil::corpus_of({
        testutil::doc("d0", "x", Label::Toxic, "racism"),
        testutil::doc("d1", "x", Label::Normal, "none"),
        testutil::doc("d2", "x", Label::Normal, "none"),
    });
    std::vector<TopicAssignment> assignments = {assign("d0", 0), assign("d1", 1),
                                                assign("d2", 0)};
    auto dist = category_distribution(assignments, map, corpus);
    REQUIRE(dist.rows.count("racism") == 1);
    REQUIRE(dist.rows.count("none") == 1);
    for (const auto& [cls, row] : dist.rows) {
        CHECK(row[0] == doctest::Approx(1.0));
        CHECK(row[1] == 0.0);
        CHECK(row[2] == 0.0);
    }
    CHECK(dist.class_counts.at("none") == 2);
}

TEST_CASE("distribution rows sum to one and split by category") {
    CategoryMap map;
    map.entries[0] = {1, TriageAction::Keep, ""};
    map.entries[1] = {3, TriageAction::Keep, ""};
    Corpus corpus = testutil::corpus_of({
        testutil::doc("d0", "x", Label::Normal, "none"),
        testutil::doc("d1", "x", Label::Normal, "none"),
        testutil::doc("d2", "x", Label::Normal, "none"),
        testutil::doc("d3", "x", Label::Normal, "none"),
    });
    std::vector<TopicAssignment> assignments = {assign("d0", 0), assign("d1", 1),
                                                assign("d2", 1), assign("d3", 1)};
    auto dist = category_distribution(assignments, map, corpus);
    const auto& row = dist.rows.at("none");
    CHECK(row[0] == doctest::Approx(0.25));
    CHECK(row[1] == 0.0);
    CHECK(row[2] == doctest::Approx(0.75));
    CHECK(row[0] + row[1] + row[2] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("documents without an original label get their own row") {
    CategoryMap map;
    map.entries[0] = {2, TriageAction::Keep, ""};
    Document d;
    d.id = "d0";
    d.text = "x";
    Corpus corpus = testutil::corpus_of({d});
    auto dist = category_distribution({assign("d0", 0)}, map, corpus);
    REQUIRE(dist.rows.count("(unlabeled)") == 1);
    CHECK(dist.rows.at("(unlabeled)")[1] == doctest::Approx(1.0));
    CHECK(render_category_distribution(dist).find("(unlabeled)") != std::string::npos);
}

TEST_CASE("distribution demands an entry for every assigned topic") {
    CategoryMap map;
    map.entries[0] = {1, TriageAction::Keep, ""};
    Corpus corpus = testutil::corpus_of({testutil::doc("d0", "x", Label::Normal)});
    CHECK_THROWS_AS(category_distribution({assign("d0", 1)}, map, corpus), DataError);
}

TEST_CASE("require_total flags gaps and strays") {
    CategoryMap map;
    map.entries[0] = {1, TriageAction::Keep, ""};
    map.entries[1] = {2, TriageAction::Keep, ""};
    CHECK_NOTHROW(map.require_total(2));

    SUBCASE("missing topic") {
        try {
            map.require_total(3);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("incomplete map") != std::string::npos);
        }
    }
    SUBCASE("unknown topic id") {
        map.entries[7] = {1, TriageAction::Keep, ""};
        CHECK_THROWS_AS(map.require_total(2), DataError);
    }
}

TEST_CASE("prune impact counts by action") {
    std::vector<TopicStats> report(3);
    for (std::size_t t = 0; t < 3; ++t) report[t].topic_id = t;
    report[0].doc_count = 40;
    report[0].toxic_count = 10;
    report[0].normal_count = 30;
    report[1].doc_count = 50;
    report[1].toxic_count = 5;
    report[1].normal_count = 45;
    report[2].doc_count = 10;
    report[2].toxic_count = 2;
    report[2].normal_count = 8;

    CategoryMap map;
    map.entries[0] = {3, TriageAction::PruneAll, ""};
    map.entries[1] = {3, TriageAction::PruneNormalOnly, ""};
    map.entries[2] = {1, TriageAction::Keep, ""};

    PruneImpact impact = prune_impact(map, report);
    CHECK(impact.total_docs == 100);
    CHECK(impact.total_toxic == 17);
    CHECK(impact.docs_removed == 40 + 45);
    CHECK(impact.toxic_removed == 10);
}

TEST_CASE("action names round-trip and bad ones name the options") {
    CHECK(triage_action_from_string("keep") == TriageAction::Keep);
    CHECK(triage_action_from_string("prune_all") == TriageAction::PruneAll);
    CHECK(triage_action_from_string("prune_normal_only") == TriageAction::PruneNormalOnly);
    for (TriageAction a :
         {TriageAction::Keep, TriageAction::PruneAll, TriageAction::PruneNormalOnly})
        CHECK(triage_action_from_string(to_string(a)) == a);
    try {
        triage_action_from_string("delete");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string msg = e.what();
        CHECK(msg.find("delete") != std::string::npos);
        CHECK(msg.find("keep") != std::string::npos);
        CHECK(msg.find("prune_all") != std::string::npos);
        CHECK(msg.find("prune_normal_only") != std::string::npos);
    }
}

namespace {

// two-topic report used by the interactive session tests
std::vector<TopicStats> session_report() {
    std::vector<TopicStats> report(2);
    report[0].topic_id = 0;
    report[0].top_words = {{"aa", 0.6}, {"bb", 0.4}};
    report[0].doc_count = 40;
    report[0].toxic_count = 10;
    report[0].normal_count = 30;
    report[1].topic_id = 1;
    report[1].top_words = {{"cc", 0.7}, {"dd", 0.3}};
    report[1].doc_count = 60;
    report[1].toxic_count = 6;
    report[1].normal_count = 54;
    return report;
}

}  // namespace

TEST_CASE("scripted session assigns every topic") {
    auto report = session_report();
    // per topic: category line, empty action line (keep default), empty note
    std::istringstream in("1\n\n\n1\n\n\n");
    std::ostringstream out;
    CategoryMap map = interactive_triage(report, nullptr, in, out);
    CHECK(map.complete);
    REQUIRE(map.entries.size() == 2);
    CHECK(map.entries.at(0).category == 1);
    CHECK(map.entries.at(0).action == TriageAction::Keep);
    CHECK(map.entries.at(1).category == 1);
    CHECK(out.str().find("Topic #0") != std::string::npos);
    CHECK(out.str().find("Topic #1") != std::string::npos);
}

TEST_CASE("skip defaults to category 3 keep") {
    auto report = session_report();
    std::istringstream in("s\ns\n");
    std::ostringstream out;
    CategoryMap map = interactive_triage(report, nullptr, in, out);
    CHECK(map.complete);
    CHECK(map.entries.at(0).category == 3);
    CHECK(map.entries.at(0).action == TriageAction::Keep);
    CHECK(map.entries.at(1).category == 3);
}

TEST_CASE("back revisits and overwrites a decision") {
    auto report = session_report();
    std::istringstream in(
        "1\nk\n\n"   // topic 0: category 1 keep
        "b\n"        // back to topic 0
        "2\na\n\n"   // topic 0 again: category 2 prune_all
        "3\nn\n\n"); // topic 1: category 3 prune_normal_only
    std::ostringstream out;
    CategoryMap map = interactive_triage(report, nullptr, in, out);
    CHECK(map.complete);
    CHECK(map.entries.at(0).category == 2);
    CHECK(map.entries.at(0).action == TriageAction::PruneAll);
    CHECK(map.entries.at(1).category == 3);
    CHECK(map.entries.at(1).action == TriageAction::PruneNormalOnly);
    // the prompt for an already-decided topic shows the prior answer
    CHECK(out.str().find("current: category 1, keep") != std::string::npos);
}

TEST_CASE("what-if reports the removal counts mid-session") {
    auto report = session_report();
    std::istringstream in(
        "3\na\n\n"  // topic 0: prune_all (40 docs, 10 toxic)
        "w\n"       // summary before deciding topic 1
        "q\n");
    std::ostringstream out;
    CategoryMap map = interactive_triage(report, nullptr, in, out);
    CHECK_FALSE(map.complete);
    CHECK(map.entries.size() == 1);
    CHECK(out.str().find("removes 40 of 100 documents") != std::string::npos);
    CHECK(out.str().find("10 of 16 Toxic") != std::string::npos);
}

TEST_CASE("quit and EOF leave a partial map flagged incomplete") {
    auto report = session_report();

    SUBCASE("immediate quit") {
        std::istringstream in("q\n");
        std::ostringstream out;
        CategoryMap map = interactive_triage(report, nullptr, in, out);
        CHECK_FALSE(map.complete);
        CHECK(map.entries.empty());
        CHECK(out.str().find("incomplete") != std::string::npos);
    }
    SUBCASE("EOF mid-stream") {
        std::istringstream in("1\nk\n\n");  // decides topic 0, then stream ends
        std::ostringstream out;
        CategoryMap map = interactive_triage(report, nullptr, in, out);
        CHECK_FALSE(map.complete);
        CHECK(map.entries.size() == 1);
    }
}

TEST_CASE("invalid keys re-prompt without advancing") {
    auto report = session_report();
    std::istringstream in("z\n1\nk\n\ns\n");
    std::ostringstream out;
    CategoryMap map = interactive_triage(report, nullptr, in, out);
    CHECK(map.complete);
    CHECK(out.str().find("unrecognized input \"z\"") != std::string::npos);
    CHECK(map.entries.at(0).category == 1);
}

TEST_CASE("resuming from an existing map pre-fills prior answers") {
    auto report = session_report();
    CategoryMap existing;
    existing.entries[0] = {2, TriageAction::PruneAll, "graffiti"};
    existing.model_hash = "cafe01";
    existing.complete = false;
    std::istringstream in("s\ns\n");  // accept both as-is
    std::ostringstream out;
    CategoryMap map = interactive_triage(report, &existing, in, out);
    CHECK(map.complete);
    CHECK(map.model_hash == "cafe01");
    CHECK(map.entries.at(0).category == 2);
    CHECK(map.entries.at(0).action == TriageAction::PruneAll);
    CHECK(map.entries.at(0).note == "graffiti");
    CHECK(map.entries.at(1).category == 3);  // fresh skip default
    CHECK(out.str().find("current: category 2, prune_all") != std::string::npos);
}

TEST_CASE("category map files round-trip") {
    testutil::TempDir dir("catmap");
    CategoryMap map;
    map.entries[0] = {1, TriageAction::Keep, ""};
    map.entries[1] = {3, TriageAction::PruneNormalOnly, "looks fine"};
    map.model_hash = "abc123";
    map.complete = false;
    const std::string path = dir.file("map.json");
    save_category_map(map, path);
    CategoryMap loaded = load_category_map(path);
    CHECK(loaded.model_hash == "abc123");
    CHECK_FALSE(loaded.complete);
    REQUIRE(loaded.entries.size() == 2);
    CHECK(loaded.entries.at(0).category == 1);
    CHECK(loaded.entries.at(1).category == 3);
    CHECK(loaded.entries.at(1).action == TriageAction::PruneNormalOnly);
    CHECK(loaded.entries.at(1).note == "looks fine");
}

TEST_CASE("category map loader rejects malformed files") {
    testutil::TempDir dir("catmap-bad");

    SUBCASE("unknown action names the valid ones") {
        const std::string path = dir.file("bad-action.json");
        testutil::spit(path,
                       "{\"version\":1,\"topics\":{\"0\":{\"category\":1,"
                       "\"action\":\"delete\"}}}\n");
        try {
            load_category_map(path);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("prune_normal_only") != std::string::npos);
        }
    }
    SUBCASE("duplicate topic id") {
        const std::string path = dir.file("dup.json");
        testutil::spit(path,
                       "{\"version\":1,\"topics\":{\"07\":{\"category\":1},"
                       "\"7\":{\"category\":2}}}\n");
        try {
            load_category_map(path);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("duplicate topic id 7") != std::string::npos);
        }
    }
    SUBCASE("category out of range") {
        const std::string path = dir.file("range.json");
        testutil::spit(path, "{\"version\":1,\"topics\":{\"0\":{\"category\":4}}}\n");
        CHECK_THROWS_AS(load_category_map(path), DataError);
    }
    SUBCASE("non-numeric topic id") {
        const std::string path = dir.file("id.json");
        testutil::spit(path, "{\"version\":1,\"topics\":{\"x\":{\"category\":1}}}\n");
        CHECK_THROWS_AS(load_category_map(path), DataError);
    }
    SUBCASE("wrong version") {
        const std::string path = dir.file("ver.json");
        testutil::spit(path, "{\"version\":9,\"topics\":{}}\n");
        CHECK_THROWS_AS(load_category_map(path), DataError);
    }
    SUBCASE("broken json") {
        const std::string path = dir.file("broken.json");
        testutil::spit(path, "{\"version\":1,\n");
        CHECK_THROWS_AS(load_category_map(path), DataError);
    }
}
