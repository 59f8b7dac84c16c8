#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "topicaudit/classifier.hpp"
#include "topicaudit/coherence.hpp"
#include "topicaudit/corpus.hpp"
#include "topicaudit/error.hpp"
#include "topicaudit/eval.hpp"
#include "topicaudit/experiments.hpp"
#include "topicaudit/lda.hpp"
#include "topicaudit/metrics.hpp"
#include "topicaudit/synth.hpp"
#include "topicaudit/textprep.hpp"

namespace py = pybind11;
using namespace topicaudit;

namespace {

// list-of-texts in, Corpus out; labels are 1 = toxic, 0 = normal
Corpus corpus_from(const std::vector<std::string>& texts, const std::vector<int>* labels,
                   const std::string& name) {
    if (labels && labels->size() != texts.size())
        throw UsageError("texts and labels differ in length");
    Corpus corpus;
    corpus.name = name;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        Document doc;
        doc.id = name + "-" + std::to_string(i);
        doc.text = texts[i];
        if (labels) {
            doc.label = (*labels)[i] ? Label::Toxic : Label::Normal;
            doc.original_label = (*labels)[i] ? "toxic" : "normal";
        }
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

LdaConfig lda_config(std::size_t k, std::uint64_t seed, std::size_t passes,
                     std::size_t chunk_size, double kappa, double tau0, double alpha,
                     double eta) {
    LdaConfig cfg;
    cfg.k = k;
    cfg.seed = seed;
    cfg.passes = passes;
    cfg.chunk_size = chunk_size;
    cfg.kappa = kappa;
    cfg.tau0 = tau0;
    cfg.alpha = alpha;
    cfg.eta = eta;
    cfg.validate();
    return cfg;
}

py::dict report_to_dict(const EvalReport& report) {
    py::dict d;
    d["per_class_accuracy"] = report.per_class_accuracy;
    d["macro_f1"] = report.macro_f1;
    d["confusion"] = py::make_tuple(report.confusion.tp, report.confusion.fp,
                                    report.confusion.fn, report.confusion.tn);
    if (!report.explicit_rates.empty()) d["explicit_rates"] = report.explicit_rates;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "topic-bias audit core: text prep, online LDA, coherence, eval harness";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

    m.def("porter_stem", &porter_stem, py::arg("word"),
          "classic Porter stemmer; expects a lowercase word");

    m.def(
        "tokenize",
        [](const std::string& text, bool stem) {
            TokenizerConfig cfg;
            cfg.stem = stem;
            return tokenize(text, cfg);
        },
        py::arg("text"), py::arg("stem") = true,
        "lowercase, split on non-letters, drop stopwords, stem");

    py::class_<Vocabulary>(m, "Vocabulary")
        .def("__len__", &Vocabulary::size)
        .def_property_readonly("terms", &Vocabulary::terms)
        .def("id_of", &Vocabulary::id_of, py::arg("term"), "-1 when out of vocabulary")
        .def("content_hash", &Vocabulary::content_hash)
        .def("save", &Vocabulary::save, py::arg("path"))
        .def_static("load", &Vocabulary::load, py::arg("path"));

    m.def(
        "build_vocabulary",
        [](const std::vector<std::vector<std::string>>& docs, std::size_t min_df,
           double max_df, std::size_t max_terms) {
            return build_vocabulary(docs, VocabFilter{min_df, max_df, max_terms});
        },
        py::arg("docs"), py::arg("min_df") = 5, py::arg("max_df") = 0.5,
        py::arg("max_terms") = 100000);

    py::class_<TopicModel>(m, "TopicModel")
        .def_property_readonly("k", &TopicModel::k)
        .def_property_readonly("vocab_size", &TopicModel::v)
        .def_property_readonly("updates_seen", &TopicModel::updates_seen)
        .def(
            "top_words",
            [](const TopicModel& model, const Vocabulary& vocab, std::size_t topic,
               std::size_t n) { return top_words(model, vocab, topic, n); },
            py::arg("vocab"), py::arg("topic"), py::arg("n") = 10)
        .def(
            "infer",
            [](const TopicModel& model, const Vocabulary& vocab,
               const std::vector<std::string>& tokens) {
                return infer_theta(model, to_bow(tokens, vocab));
            },
            py::arg("vocab"), py::arg("tokens"), "topic mixture of one tokenized document")
        .def("save", [](const TopicModel& model, const std::string& path) {
            save_model(model, path);
        })
        .def_static("load", &load_model, py::arg("path"));

    m.def(
        "train_lda",
        [](const std::vector<std::vector<std::string>>& docs, const Vocabulary& vocab,
           std::size_t k, std::uint64_t seed, std::size_t passes, std::size_t chunk_size,
           double kappa, double tau0, double alpha, double eta, std::size_t threads) {
            auto bows = to_bow_corpus(docs, vocab, threads);
            return train(bows, vocab,
                         lda_config(k, seed, passes, chunk_size, kappa, tau0, alpha, eta),
                         threads);
        },
        py::arg("docs"), py::arg("vocab"), py::arg("k"), py::arg("seed") = 42,
        py::arg("passes") = 1, py::arg("chunk_size") = 2000, py::arg("kappa") = 0.5,
        py::arg("tau0") = 1.0, py::arg("alpha") = 0.0, py::arg("eta") = 0.0,
        py::arg("threads") = 0);

    m.def(
        "elbo_per_word",
        [](const TopicModel& model, const std::vector<std::vector<std::string>>& docs,
           const Vocabulary& vocab) {
            return elbo_per_word(model, to_bow_corpus(docs, vocab));
        },
        py::arg("model"), py::arg("docs"), py::arg("vocab"));

    m.def(
        "cv_model",
        [](const TopicModel& model, const Vocabulary& vocab,
           const std::vector<std::vector<std::string>>& docs, std::size_t window_size,
           std::size_t top_n, std::size_t threads) {
            CoherenceConfig cfg;
            cfg.window_size = window_size;
            cfg.top_n = top_n;
            return cv_model(model, vocab, docs, cfg, threads);
        },
        py::arg("model"), py::arg("vocab"), py::arg("docs"), py::arg("window_size") = 110,
        py::arg("top_n") = 10, py::arg("threads") = 0);

    m.def(
        "scan_k",
        [](const std::vector<std::vector<std::string>>& docs, const Vocabulary& vocab,
           const std::vector<std::size_t>& grid, const std::vector<std::uint64_t>& seeds,
           std::size_t passes, std::size_t chunk_size, double alpha, double eta,
           std::size_t threads) {
            LdaConfig base = lda_config(2, 42, passes, chunk_size, 0.5, 1.0, alpha, eta);
            auto bows = to_bow_corpus(docs, vocab, threads);
            ScanResult result = scan_topic_counts(bows, vocab, docs, grid, base,
                                                  CoherenceConfig{}, seeds, threads);
            py::list rows;
            for (const ScanRow& row : result.rows)
                rows.append(py::make_tuple(row.k, row.mean_coherence, row.std_coherence));
            py::dict d;
            d["best_k"] = result.best_k;
            d["grid"] = rows;
            return d;
        },
        py::arg("docs"), py::arg("vocab"), py::arg("grid"), py::arg("seeds"),
        py::arg("passes") = 1, py::arg("chunk_size") = 2000, py::arg("alpha") = 0.0,
        py::arg("eta") = 0.0, py::arg("threads") = 0);

    m.def(
        "macro_f1",
        [](const std::vector<double>& scores, const std::vector<int>& gold) {
            Corpus corpus = corpus_from(std::vector<std::string>(gold.size(), ""), &gold, "g");
            std::vector<Prediction> preds;
            for (std::size_t i = 0; i < scores.size(); ++i)
                preds.push_back({corpus.documents[i].id, scores[i]});
            return macro_f1(preds, corpus, nullptr);
        },
        py::arg("scores"), py::arg("gold"),
        "scores in [0,1], cut at 0.5; gold 1 = toxic, 0 = normal");

    m.def(
        "train_and_eval",
        [](const std::vector<std::string>& train_texts, const std::vector<int>& train_labels,
           const std::vector<std::string>& eval_texts, const std::vector<int>& eval_labels,
           std::uint64_t seed, std::size_t epochs, std::size_t threads) {
            Corpus train_corpus = corpus_from(train_texts, &train_labels, "train");
            Corpus gold = corpus_from(eval_texts, &eval_labels, "eval");
            HarnessConfig hc;
            hc.trainer.epochs = epochs;
            hc.threads = threads;
            TokenCache train_cache(train_corpus, hc.tokenizer, threads);
            TokenCache gold_cache(gold, hc.tokenizer, threads);
            return report_to_dict(
                train_and_eval(train_corpus, gold, train_cache, gold_cache, hc, seed));
        },
        py::arg("train_texts"), py::arg("train_labels"), py::arg("eval_texts"),
        py::arg("eval_labels"), py::arg("seed") = 42, py::arg("epochs") = 5,
        py::arg("threads") = 0, "train the linear classifier and score the eval set");

    m.def(
        "make_planted_corpus",
        [](std::size_t n_docs, std::size_t n_topics, std::uint64_t seed, double noise,
           std::size_t min_len, std::size_t max_len) {
            PlantedConfig cfg;
            cfg.n_docs = n_docs;
            cfg.n_topics = n_topics;
            cfg.seed = seed;
            cfg.noise = noise;
            cfg.min_len = min_len;
            cfg.max_len = max_len;
            Corpus corpus = make_planted_corpus(cfg);
            std::vector<std::string> texts;
            for (const Document& doc : corpus.documents) texts.push_back(doc.text);
            return texts;
        },
        py::arg("n_docs") = 2000, py::arg("n_topics") = 5, py::arg("seed") = 7,
        py::arg("noise") = 0.02, py::arg("min_len") = 60, py::arg("max_len") = 120);

    m.def(
        "planted_topic_words",
        [](std::size_t topic, std::size_t n_topics) {
            PlantedConfig cfg;
            cfg.n_topics = n_topics;
            return planted_topic_words(cfg, topic);
        },
        py::arg("topic"), py::arg("n_topics") = 5);

    m.def(
        "make_two_domain",
        [](std::uint64_t seed) {
            TwoDomainConfig cfg;
            cfg.seed = seed;
            TwoDomainData data = make_two_domain(cfg);
            auto unpack = [](const Corpus& corpus) {
                std::vector<std::string> texts;
                std::vector<int> labels;
                for (const Document& doc : corpus.documents) {
                    texts.push_back(doc.text);
                    labels.push_back(doc.label == Label::Toxic ? 1 : 0);
                }
                return py::make_tuple(texts, labels);
            };
            py::dict d;
            d["source"] = unpack(data.source);
            d["target"] = unpack(data.target);
            return d;
        },
        py::arg("seed") = 11,
        "two labeled domains sharing a toxic vocabulary; see the library docs");
}
