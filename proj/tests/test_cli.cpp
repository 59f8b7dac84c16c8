#include <doctest.h>

#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "topicaudit/cli.hpp"
#include "topicaudit/corpus.hpp"

#include "test_util.hpp"

using namespace topicaudit;

namespace {

int run(std::initializer_list<std::string> args) {
    std::vector<std::string> owned = {"topicaudit"};
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(owned.size());
    for (const auto& s : owned) argv.push_back(s.c_str());
    return cli_dispatch(static_cast<int>(argv.size()), argv.data());
}

// raw CSV with two disjoint word groups: "abuse" docs speak vv-words,
// "none" docs speak ww-words, 30 each
std::string raw_csv() {
    const char* a[4] = {"vvk", "vvm", "vvp", "vvs"};
    const char* b[4] = {"wwk", "wwm", "wwp", "wws"};
    std::string csv = "id,text,label\n";
    for (int i = 0; i < 30; ++i) {
        std::string text;
        for (int j = 0; j < 8; ++j) text += std::string(a[(i + j) % 4]) + " ";
        csv += "a" + std::to_string(i) + "," + text + ",abuse\n";
    }
    for (int i = 0; i < 30; ++i) {
        std::string text;
        for (int j = 0; j < 8; ++j) text += std::string(b[(i + j) % 4]) + " ";
        csv += "b" + std::to_string(i) + ",\"" + text + "\",none\n";
    }
    return csv;
}

}  // namespace

TEST_CASE("the subcommand pipeline runs end to end") {
    testutil::TempDir dir("cli");
    const std::string raw = dir.file("raw.csv");
    const std::string mapping = dir.file("mapping.json");
    const std::string corpus = dir.file("corpus.jsonl");
    const std::string vocab = dir.file("vocab.json");
    const std::string model = dir.file("model.json");
    const std::string assignments = dir.file("assignments.jsonl");
    testutil::spit(raw, raw_csv());
    testutil::spit(mapping, "{\"abuse\": \"toxic\", \"none\": \"normal\"}\n");

    REQUIRE(run({"ingest", "--input", raw, "--format", "csv", "--id-field", "id",
                 "--label-field", "label", "--name", "demo", "--mapping", mapping, "--out",
                 corpus}) == 0);
    Corpus loaded = load_canonical(corpus);
    CHECK(loaded.documents.size() == 60);
    CHECK(loaded.binary_counts()[Label::Toxic] == 30);

    // provenance sidecar: present, and timestamp-free unless --stamp asks
    std::string prov = testutil::slurp(corpus + ".provenance.json");
    CHECK(prov.find("\"ingest\"") != std::string::npos);
    CHECK(prov.find("generated_at") == std::string::npos);

    REQUIRE(run({"prep", "--corpus", corpus, "--out", vocab, "--min-df", "1", "--max-df",
                 "0.9"}) == 0);
    REQUIRE(run({"lda-train", "--corpus", corpus, "--vocab", vocab, "--k", "2", "--passes",
                 "4", "--chunk-size", "16", "--alpha", "1", "--eta", "1", "--out",
                 model}) == 0);
    REQUIRE(run({"assign", "--corpus", corpus, "--vocab", vocab, "--model", model, "--out",
                 assignments}) == 0);

    const std::string report = dir.file("report.txt");
    REQUIRE(run({"report-topics", "--corpus", corpus, "--vocab", vocab, "--model", model,
                 "--assignments", assignments, "--out", report}) == 0);
    std::string report_text = testutil::slurp(report);
    CHECK(report_text.find("Topic #0:") != std::string::npos);
    CHECK(report_text.find("Topic #1:") != std::string::npos);
    CHECK(report_text.find("of dataset") != std::string::npos);

    // curator decisions, written directly as the non-interactive path
    const std::string map = dir.file("map.json");
    testutil::spit(map,
                   "{\"version\":1,\"complete\":true,\"topics\":{"
                   "\"0\":{\"category\":3,\"action\":\"prune_normal_only\"},"
                   "\"1\":{\"category\":3,\"action\":\"prune_normal_only\"}}}\n");

    const std::string dist = dir.file("dist.txt");
    REQUIRE(run({"distribution", "--corpus", corpus, "--assignments", assignments, "--map",
                 map, "--out", dist}) == 0);
    std::string dist_text = testutil::slurp(dist);
    CHECK(dist_text.find("abuse") != std::string::npos);
    CHECK(dist_text.find("none") != std::string::npos);
    CHECK(dist_text.find("100.0%") != std::string::npos);

    // both topics are category 3, so normal-only pruning keeps only toxic
    const std::string pruned = dir.file("pruned.jsonl");
    REQUIRE(run({"prune", "--corpus", corpus, "--assignments", assignments, "--map", map,
                 "--categories", "3", "--scope", "normal-only", "--out", pruned}) == 0);
    Corpus pruned_corpus = load_canonical(pruned);
    CHECK(pruned_corpus.documents.size() == 30);
    CHECK(pruned_corpus.binary_counts()[Label::Normal] == 0);

    const std::string sampled = dir.file("sampled.jsonl");
    REQUIRE(run({"sample", "--corpus", corpus, "--ratio", "1", "--out", sampled}) == 0);
    Corpus sampled_corpus = load_canonical(sampled);
    CHECK(sampled_corpus.documents.size() == 60);
    CHECK(sampled_corpus.binary_counts()[Label::Normal] == 30);

    const std::string report_json_path = dir.file("eval.json");
    const std::string preds = dir.file("preds.csv");
    REQUIRE(run({"train-eval", "--train", sampled, "--eval", corpus, "--out-json",
                 report_json_path, "--predictions", preds, "--out-text",
                 dir.file("eval.txt")}) == 0);
    auto eval_json = nlohmann::json::parse(testutil::slurp(report_json_path));
    CHECK(eval_json["macro_f1"].get<double>() >= 0.9);  // separable by design
    CHECK(testutil::slurp(preds).rfind("doc_id,score\n", 0) == 0);
    CHECK(testutil::slurp(dir.file("eval.txt")).find("macro F1:") != std::string::npos);

    // scoring imported predictions reproduces the same report
    const std::string imported = dir.file("imported.json");
    REQUIRE(run({"train-eval", "--eval", corpus, "--import-predictions", preds, "--out-json",
                 imported}) == 0);
    auto imported_json = nlohmann::json::parse(testutil::slurp(imported));
    CHECK(imported_json["macro_f1"] == eval_json["macro_f1"]);

    SUBCASE("category breakdown and lexicon land in the report") {
        const std::string lexicon = dir.file("lexicon.txt");
        testutil::spit(lexicon, "vvk\n");
        const std::string full = dir.file("full.json");
        REQUIRE(run({"train-eval", "--train", sampled, "--eval", corpus,
                     "--eval-assignments", assignments, "--map", map, "--lexicon", lexicon,
                     "--out-json", full}) == 0);
        auto full_json = nlohmann::json::parse(testutil::slurp(full));
        CHECK(full_json.contains("per_category_accuracy"));
        CHECK(full_json["explicit_rates"].contains("(all)"));
    }

    SUBCASE("an incomplete category map cannot drive pruning") {
        const std::string partial = dir.file("partial.json");
        testutil::spit(partial,
                       "{\"version\":1,\"complete\":true,\"topics\":{"
                       "\"0\":{\"category\":3,\"action\":\"prune_all\"}}}\n");
        CHECK(run({"prune", "--corpus", corpus, "--assignments", assignments, "--map",
                   partial, "--categories", "3", "--out", dir.file("p2.jsonl")}) == 2);

        const std::string flagged = dir.file("flagged.json");
        testutil::spit(flagged,
                       "{\"version\":1,\"complete\":false,\"topics\":{"
                       "\"0\":{\"category\":3,\"action\":\"prune_all\"},"
                       "\"1\":{\"category\":1,\"action\":\"keep\"}}}\n");
        CHECK(run({"prune", "--corpus", corpus, "--assignments", assignments, "--map",
                   flagged, "--categories", "3", "--out", dir.file("p3.jsonl")}) == 2);
    }

    SUBCASE("--stamp switches timestamps on") {
        const std::string restamped = dir.file("stamped.jsonl");
        REQUIRE(run({"--stamp", "sample", "--corpus", corpus, "--ratio", "1", "--out",
                     restamped}) == 0);
        CHECK(testutil::slurp(restamped + ".provenance.json").find("generated_at") !=
              std::string::npos);
    }

    SUBCASE("a config file can supply subcommand flags") {
        const std::string cfg = dir.file("cfg.toml");
        testutil::spit(cfg, "[sample]\nratio = 1.0\n");
        const std::string out2 = dir.file("sampled2.jsonl");
        REQUIRE(run({"--config", cfg, "sample", "--corpus", corpus, "--out", out2}) == 0);
        CHECK(testutil::slurp(out2) == testutil::slurp(sampled));  // same seed, same draw
    }

    SUBCASE("reruns are byte-identical") {
        const std::string again = dir.file("corpus2.jsonl");
        REQUIRE(run({"ingest", "--input", raw, "--format", "csv", "--id-field", "id",
                     "--label-field", "label", "--name", "demo", "--mapping", mapping,
                     "--out", again}) == 0);
        CHECK(testutil::slurp(again) == testutil::slurp(corpus));
    }
}

TEST_CASE("exit codes split usage errors from data errors") {
    testutil::TempDir dir("cli-codes");

    SUBCASE("no subcommand") { CHECK(run({}) == 1); }
    SUBCASE("unknown flag") {
        CHECK(run({"sample", "--corpus", "x.jsonl", "--out", "y.jsonl", "--frobnicate"}) == 1);
    }
    SUBCASE("missing required option") { CHECK(run({"prep", "--corpus", "x.jsonl"}) == 1); }
    SUBCASE("sample without a mode") {
        const std::string corpus = dir.file("c.jsonl");
        testutil::spit(corpus,
                       "{\"id\":\"d0\",\"text\":\"hello there\",\"label\":\"toxic\"}\n");
        CHECK(run({"sample", "--corpus", corpus, "--out", dir.file("s.jsonl")}) == 1);
    }
    SUBCASE("nonexistent input file") {
        CHECK(run({"prep", "--corpus", dir.file("ghost.jsonl"), "--out",
                   dir.file("v.json")}) == 2);
    }
    SUBCASE("malformed corpus") {
        const std::string corpus = dir.file("broken.jsonl");
        testutil::spit(corpus, "{not json\n");
        CHECK(run({"prep", "--corpus", corpus, "--out", dir.file("v.json")}) == 2);
    }
}
