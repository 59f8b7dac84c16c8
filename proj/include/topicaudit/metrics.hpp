#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "topicaudit/classifier.hpp"
#include "topicaudit/corpus.hpp"
#include "topicaudit/triage.hpp"

namespace topicaudit {

struct Confusion {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;  // Toxic is the positive class

    double f1_toxic() const;
    double f1_normal() const;
    double macro() const;
};

// Which binary prediction counts as correct for each original_label class.
using PolarityMap = std::map<std::string, Label>;

// Derive polarity from a binarized gold corpus; a class whose documents
// carry mixed binary labels is an error.
PolarityMap polarity_from_gold(const Corpus& gold);

// class name of a document for reporting: original_label, or a fixed
// bucket when none was recorded
std::string class_of(const Document& doc);

// CSV with header doc_id,score. Every id must exist in the gold corpus
// and every score must lie in [0, 1].
std::vector<Prediction> predict_import(const std::string& path, const Corpus& gold);
void write_predictions_csv(const std::vector<Prediction>& preds, const std::string& path);

// Fraction of each class predicted with its expected polarity.
std::map<std::string, double> per_class_accuracy(const std::vector<Prediction>& preds,
                                                 const Corpus& gold,
                                                 const PolarityMap& polarity);

// Unweighted mean of the Toxic and Normal F1 against binary gold labels.
double macro_f1(const std::vector<Prediction>& preds, const Corpus& gold,
                Confusion* confusion = nullptr);

// per_class_accuracy within each topic category; cells with no documents
// are absent from the result
std::map<std::pair<std::string, int>, double> breakdown_by_category(
    const std::vector<Prediction>& preds, const Corpus& gold,
    const std::vector<TopicAssignment>& assignments, const CategoryMap& map,
    const PolarityMap& polarity);

// Fraction of docs whose lowercased alphabetic tokens (no stemming, no
// stopword or length filter) intersect the lexicon.
double explicit_rate(const Corpus& subset, const std::set<std::string>& lexicon);

// one lowercase word per line, '#' comments
std::set<std::string> load_lexicon(const std::string& path);

}  // namespace topicaudit
