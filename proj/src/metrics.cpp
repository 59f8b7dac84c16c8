#include "topicaudit/metrics.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include "topicaudit/error.hpp"

namespace topicaudit {

double Confusion::f1_toxic() const {
    const double denom = static_cast<double>(2 * tp + fp + fn);
    return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

double Confusion::f1_normal() const {
    const double denom = static_cast<double>(2 * tn + fn + fp);
    return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tn) / denom;
}

double Confusion::macro() const { return 0.5 * (f1_toxic() + f1_normal()); }

std::string class_of(const Document& doc) {
    return doc.original_label.empty() ? "(unlabeled)" : doc.original_label;
}

PolarityMap polarity_from_gold(const Corpus& gold) {
    PolarityMap polarity;
    for (const Document& doc : gold.documents) {
        if (doc.label == Label::Unlabeled)
            throw DataError("cannot derive polarity: document \"" + doc.id +
                            "\" has no binary label");
        const std::string cls = class_of(doc);
        auto it = polarity.find(cls);
        if (it == polarity.end()) {
            polarity[cls] = doc.label;
        } else if (it->second != doc.label) {
            throw DataError("class \"" + cls +
                            "\" maps to both binary labels; supply an explicit polarity map");
        }
    }
    return polarity;
}

namespace {

// doc_id -> score, with every gold doc covered
std::unordered_map<std::string, double> score_by_id(const std::vector<Prediction>& preds,
                                                    const Corpus& gold) {
    std::unordered_map<std::string, double> scores;
    scores.reserve(preds.size());
    for (const Prediction& p : preds) scores[p.doc_id] = p.score;
    for (const Document& doc : gold.documents)
        if (!scores.count(doc.id))
            throw DataError("no prediction for document \"" + doc.id + "\"");
    return scores;
}

}  // namespace

std::vector<Prediction> predict_import(const std::string& path, const Corpus& gold) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open predictions file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto rows = parse_csv_rows(buf.str());
    if (rows.empty()) throw DataError("predictions file is empty: " + path);
    const auto& header = rows.front().first;
    if (header.size() != 2 || header[0] != "doc_id" || header[1] != "score")
        throw DataError("predictions file " + path + ": expected header doc_id,score");

    std::set<std::string> known;
    for (const Document& doc : gold.documents) known.insert(doc.id);

    std::vector<Prediction> preds;
    preds.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& [fields, line] = rows[r];
        if (fields.size() != 2)
            throw DataError("predictions file " + path + " line " + std::to_string(line) +
                            ": expected 2 fields, got " + std::to_string(fields.size()));
        if (!known.count(fields[0]))
            throw DataError("predictions file " + path + " line " + std::to_string(line) +
                            ": unknown doc id \"" + fields[0] + "\"");
        errno = 0;
        char* end = nullptr;
        const double score = std::strtod(fields[1].c_str(), &end);
        if (errno != 0 || end != fields[1].c_str() + fields[1].size() || fields[1].empty())
            throw DataError("predictions file " + path + " line " + std::to_string(line) +
                            ": bad score \"" + fields[1] + "\"");
        if (!(score >= 0.0 && score <= 1.0))
            throw DataError("predictions file " + path + " line " + std::to_string(line) +
                            ": score " + fields[1] + " outside [0, 1]");
        preds.push_back({fields[0], score});
    }
    return preds;
}

void write_predictions_csv(const std::vector<Prediction>& preds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write predictions file: " + path);
    out << "doc_id,score\n";
    char buf[64];
    for (const Prediction& p : preds) {
        std::string id = p.doc_id;
        if (id.find_first_of(",\"\n\r") != std::string::npos) {
            std::string quoted = "\"";
            for (char c : id) {
                if (c == '"') quoted += "\"\"";
                else quoted += c;
            }
            quoted += '"';
            id = quoted;
        }
        std::snprintf(buf, sizeof(buf), "%.17g", p.score);
        out << id << ',' << buf << '\n';
    }
}

std::map<std::string, double> per_class_accuracy(const std::vector<Prediction>& preds,
                                                 const Corpus& gold,
                                                 const PolarityMap& polarity) {
    const auto scores = score_by_id(preds, gold);
    std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // correct, total
    for (const Document& doc : gold.documents) {
        const std::string cls = class_of(doc);
        auto pol = polarity.find(cls);
        if (pol == polarity.end())
            throw DataError("polarity map has no entry for class \"" + cls + "\"");
        const Label predicted = scores.at(doc.id) >= 0.5 ? Label::Toxic : Label::Normal;
        auto& [correct, total] = tally[cls];
        ++total;
        if (predicted == pol->second) ++correct;
    }
    std::map<std::string, double> acc;
    for (const auto& [cls, counts] : tally)
        acc[cls] = static_cast<double>(counts.first) / static_cast<double>(counts.second);
    return acc;
}

double macro_f1(const std::vector<Prediction>& preds, const Corpus& gold,
                Confusion* confusion) {
    const auto scores = score_by_id(preds, gold);
    Confusion c;
    for (const Document& doc : gold.documents) {
        if (doc.label == Label::Unlabeled)
            throw DataError("macro-F1 needs binary gold labels; document \"" + doc.id +
                            "\" is unlabeled");
        const bool predicted_toxic = scores.at(doc.id) >= 0.5;
        const bool gold_toxic = doc.label == Label::Toxic;
        if (predicted_toxic && gold_toxic) ++c.tp;
        else if (predicted_toxic && !gold_toxic) ++c.fp;
        else if (!predicted_toxic && gold_toxic) ++c.fn;
        else ++c.tn;
    }
    if (c.tp + c.fp + c.fn == 0)
        std::cerr << "warning: Toxic class empty in both gold and predictions; F1 set to 0\n";
    if (c.tn + c.fn + c.fp == 0)
        std::cerr << "warning: Normal class empty in both gold and predictions; F1 set to 0\n";
    if (confusion) *confusion = c;
    return c.macro();
}

std::map<std::pair<std::string, int>, double> breakdown_by_category(
    const std::vector<Prediction>& preds, const Corpus& gold,
    const std::vector<TopicAssignment>& assignments, const CategoryMap& map,
    const PolarityMap& polarity) {
    const auto scores = score_by_id(preds, gold);
    std::unordered_map<std::string, std::size_t> topic_by_id;
    topic_by_id.reserve(assignments.size());
    for (const TopicAssignment& a : assignments) topic_by_id[a.doc_id] = a.dominant;

    std::map<std::pair<std::string, int>, std::pair<std::size_t, std::size_t>> tally;
    for (const Document& doc : gold.documents) {
        const std::string cls = class_of(doc);
        auto pol = polarity.find(cls);
        if (pol == polarity.end())
            throw DataError("polarity map has no entry for class \"" + cls + "\"");
        auto topic = topic_by_id.find(doc.id);
        if (topic == topic_by_id.end())
            throw DataError("no topic assignment for document \"" + doc.id + "\"");
        auto entry = map.entries.find(topic->second);
        if (entry == map.entries.end())
            throw DataError("category map has no entry for topic " +
                            std::to_string(topic->second));
        const Label predicted = scores.at(doc.id) >= 0.5 ? Label::Toxic : Label::Normal;
        auto& [correct, total] = tally[{cls, entry->second.category}];
        ++total;
        if (predicted == pol->second) ++correct;
    }
    std::map<std::pair<std::string, int>, double> out;
    for (const auto& [key, counts] : tally)
        out[key] = static_cast<double>(counts.first) / static_cast<double>(counts.second);
    return out;
}

double explicit_rate(const Corpus& subset, const std::set<std::string>& lexicon) {
    if (subset.documents.empty()) throw DataError("explicit rate undefined on an empty subset");
    std::size_t hits = 0;
    std::string tok;
    for (const Document& doc : subset.documents) {
        bool found = false;
        tok.clear();
        auto check = [&] {
            if (!tok.empty() && lexicon.count(tok)) found = true;
            tok.clear();
        };
        for (char c : doc.text) {
            if (c >= 'a' && c <= 'z') tok.push_back(c);
            else if (c >= 'A' && c <= 'Z') tok.push_back(static_cast<char>(c - 'A' + 'a'));
            else check();
            if (found) break;
        }
        check();
        if (found) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(subset.documents.size());
}

std::set<std::string> load_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lexicon file: " + path);
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t");
        std::string word = line.substr(b, e - b + 1);
        for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        words.insert(word);
    }
    return words;
}

}  // namespace topicaudit
