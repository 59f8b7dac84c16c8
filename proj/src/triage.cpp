#include "topicaudit/triage.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "topicaudit/error.hpp"

namespace topicaudit {

using nlohmann::json;

const char* to_string(TriageAction action) {
    switch (action) {
        case TriageAction::Keep: return "keep";
        case TriageAction::PruneAll: return "prune_all";
        case TriageAction::PruneNormalOnly: return "prune_normal_only";
    }
    return "keep";
}

TriageAction triage_action_from_string(const std::string& s) {
    if (s == "keep") return TriageAction::Keep;
    if (s == "prune_all") return TriageAction::PruneAll;
    if (s == "prune_normal_only") return TriageAction::PruneNormalOnly;
    throw DataError("unknown action \"" + s +
                    "\" (valid actions: keep, prune_all, prune_normal_only)");
}

void CategoryMap::require_total(std::size_t k) const {
    for (const auto& [topic, decision] : entries)
        if (topic >= k)
            throw DataError("category map mentions unknown topic id " + std::to_string(topic) +
                            " (model has " + std::to_string(k) + " topics)");
    for (std::size_t t = 0; t < k; ++t)
        if (!entries.count(t))
            throw DataError("incomplete map: topic " + std::to_string(t) + " has no entry (" +
                            std::to_string(entries.size()) + " of " + std::to_string(k) +
                            " topics covered)");
}

std::vector<TopicStats> topic_report(const TopicModel& model, const Vocabulary& vocab,
                                     const std::vector<TopicAssignment>& assignments,
                                     const Corpus& corpus, std::size_t top_n) {
    if (assignments.size() != corpus.documents.size())
        throw DataError("assignment count " + std::to_string(assignments.size()) +
                        " does not match corpus size " +
                        std::to_string(corpus.documents.size()));
    const std::size_t k = model.k();
    std::vector<TopicStats> report(k);
    std::size_t total_toxic = 0;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const TopicAssignment& a = assignments[i];
        if (a.doc_id != corpus.documents[i].id)
            throw DataError("assignment " + std::to_string(i) + " is for document \"" +
                            a.doc_id + "\" but the corpus has \"" + corpus.documents[i].id +
                            "\" at that position");
        if (a.dominant >= k)
            throw DataError("assignment for \"" + a.doc_id + "\" names topic " +
                            std::to_string(a.dominant) + " but the model has " +
                            std::to_string(k) + " topics");
        TopicStats& s = report[a.dominant];
        ++s.doc_count;
        if (corpus.documents[i].label == Label::Toxic) {
            ++s.toxic_count;
            ++total_toxic;
        } else if (corpus.documents[i].label == Label::Normal) {
            ++s.normal_count;
        }
    }
    const double n_docs = static_cast<double>(corpus.documents.size());
    for (std::size_t t = 0; t < k; ++t) {
        TopicStats& s = report[t];
        s.topic_id = t;
        s.top_words = top_words(model, vocab, t, top_n);
        s.dataset_fraction = n_docs > 0 ? static_cast<double>(s.doc_count) / n_docs : 0.0;
        s.toxic_fraction =
            s.doc_count > 0 ? static_cast<double>(s.toxic_count) / s.doc_count : 0.0;
        s.toxic_share =
            total_toxic > 0 ? static_cast<double>(s.toxic_count) / total_toxic : 0.0;
    }
    return report;
}

std::string render_topic_report(const std::vector<TopicStats>& report) {
    std::ostringstream out;
    const std::string rule(32, '-');
    char buf[64];
    for (const TopicStats& s : report) {
        out << rule << "\n";
        out << "Topic #" << s.topic_id << ":\n";
        for (std::size_t i = 0; i < s.top_words.size(); ++i) {
            if (i) out << " + ";
            std::snprintf(buf, sizeof(buf), "%.3f", s.top_words[i].second);
            out << buf << "*\"" << s.top_words[i].first << "\"";
        }
        out << "\n";
        std::snprintf(buf, sizeof(buf), "%.3f", s.dataset_fraction);
        out << s.doc_count << " documents  - " << buf << " of dataset\n";
        std::snprintf(buf, sizeof(buf), "%.2f", s.toxic_fraction);
        out << buf << " labeled as Toxic and ";
        std::snprintf(buf, sizeof(buf), "%.2f", s.toxic_share);
        out << buf << " of all Toxic\n";
    }
    out << rule << "\n";
    return out.str();
}

std::string topic_report_json(const std::vector<TopicStats>& report) {
    json topics = json::array();
    for (const TopicStats& s : report) {
        json words = json::array();
        for (const auto& [term, weight] : s.top_words)
            words.push_back({{"term", term}, {"weight", weight}});
        topics.push_back({{"topic", s.topic_id},
                          {"top_words", words},
                          {"doc_count", s.doc_count},
                          {"toxic_count", s.toxic_count},
                          {"normal_count", s.normal_count},
                          {"dataset_fraction", s.dataset_fraction},
                          {"toxic_fraction", s.toxic_fraction},
                          {"toxic_share", s.toxic_share}});
    }
    json j;
    j["topics"] = topics;
    return j.dump(2) + "\n";
}

CategoryDistribution category_distribution(const std::vector<TopicAssignment>& assignments,
                                           const CategoryMap& map, const Corpus& corpus) {
    if (assignments.size() != corpus.documents.size())
        throw DataError("assignment count " + std::to_string(assignments.size()) +
                        " does not match corpus size " +
                        std::to_string(corpus.documents.size()));
    std::map<std::string, std::array<std::size_t, 3>> counts;
    std::map<std::string, std::size_t> totals;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        auto it = map.entries.find(assignments[i].dominant);
        if (it == map.entries.end())
            throw DataError("category map has no entry for topic " +
                            std::to_string(assignments[i].dominant));
        const std::string& raw = corpus.documents[i].original_label;
        const std::string cls = raw.empty() ? "(unlabeled)" : raw;
        ++counts[cls][static_cast<std::size_t>(it->second.category - 1)];
        ++totals[cls];
    }
    CategoryDistribution dist;
    dist.class_counts = totals;
    for (const auto& [cls, per_cat] : counts) {
        std::array<double, 3> row{};
        for (std::size_t c = 0; c < 3; ++c)
            row[c] = static_cast<double>(per_cat[c]) / static_cast<double>(totals[cls]);
        dist.rows[cls] = row;
    }
    return dist;
}

std::string render_category_distribution(const CategoryDistribution& dist) {
    std::ostringstream out;
    std::size_t width = 10;
    for (const auto& [cls, row] : dist.rows) width = std::max(width, cls.size());
    out << std::string(width, ' ') << "  docs        C1      C2      C3\n";
    char buf[128];
    for (const auto& [cls, row] : dist.rows) {
        std::snprintf(buf, sizeof(buf), "%-*s  %-10zu  %5.1f%%  %5.1f%%  %5.1f%%\n",
                      static_cast<int>(width), cls.c_str(), dist.class_counts.at(cls),
                      100.0 * row[0], 100.0 * row[1], 100.0 * row[2]);
        out << buf;
    }
    return out.str();
}

PruneImpact prune_impact(const CategoryMap& map, const std::vector<TopicStats>& report) {
    PruneImpact impact;
    for (const TopicStats& s : report) {
        impact.total_docs += s.doc_count;
        impact.total_toxic += s.toxic_count;
        auto it = map.entries.find(s.topic_id);
        if (it == map.entries.end()) continue;
        switch (it->second.action) {
            case TriageAction::Keep:
                break;
            case TriageAction::PruneAll:
                impact.docs_removed += s.doc_count;
                impact.toxic_removed += s.toxic_count;
                break;
            case TriageAction::PruneNormalOnly:
                impact.docs_removed += s.normal_count;
                break;
        }
    }
    return impact;
}

namespace {

std::string trim_lower(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    std::string out = s.substr(b, e - b + 1);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

void print_impact(std::ostream& out, const PruneImpact& impact) {
    auto pct = [](std::size_t part, std::size_t whole) {
        return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
    };
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "what-if: removes %zu of %zu documents (%.1f%%), %zu of %zu Toxic (%.1f%%)\n",
                  impact.docs_removed, impact.total_docs,
                  pct(impact.docs_removed, impact.total_docs), impact.toxic_removed,
                  impact.total_toxic, pct(impact.toxic_removed, impact.total_toxic));
    out << buf;
}

}  // namespace

CategoryMap interactive_triage(const std::vector<TopicStats>& report,
                               const CategoryMap* existing, std::istream& in,
                               std::ostream& out) {
    std::vector<std::optional<TopicDecision>> decisions(report.size());
    if (existing) {
        for (const auto& [topic, decision] : existing->entries)
            if (topic < report.size()) decisions[topic] = decision;
    }

    auto current_map = [&] {
        CategoryMap map;
        for (std::size_t t = 0; t < decisions.size(); ++t)
            if (decisions[t]) map.entries[t] = *decisions[t];
        map.complete = map.entries.size() == report.size();
        if (existing) map.model_hash = existing->model_hash;
        return map;
    };

    std::size_t i = 0;
    bool aborted = false;
    std::string line;
    while (i < report.size()) {
        out << render_topic_report({report[i]});
        if (decisions[i])
            out << "current: category " << decisions[i]->category << ", "
                << to_string(decisions[i]->action) << "\n";
        out << "[topic " << i + 1 << " of " << report.size()
            << "] category 1/2/3, s=skip, b=back, w=what-if, q=quit: " << std::flush;
        if (!std::getline(in, line)) {
            aborted = true;
            break;
        }
        const std::string cmd = trim_lower(line);
        if (cmd == "s") {
            if (!decisions[i]) decisions[i] = TopicDecision{};  // category 3, keep
            ++i;
        } else if (cmd == "b") {
            if (i > 0) --i;
        } else if (cmd == "w") {
            print_impact(out, prune_impact(current_map(), report));
        } else if (cmd == "q") {
            aborted = true;
            break;
        } else if (cmd == "1" || cmd == "2" || cmd == "3") {
            TopicDecision d = decisions[i] ? *decisions[i] : TopicDecision{};
            d.category = cmd[0] - '0';
            out << "action k=keep, a=prune_all, n=prune_normal_only [" << to_string(d.action)
                << "]: " << std::flush;
            bool ok = true;
            while (true) {
                if (!std::getline(in, line)) {
                    aborted = true;
                    ok = false;
                    break;
                }
                const std::string act = trim_lower(line);
                if (act.empty()) break;  // keep the shown default
                if (act == "k" || act == "keep") {
                    d.action = TriageAction::Keep;
                    break;
                }
                if (act == "a" || act == "prune_all") {
                    d.action = TriageAction::PruneAll;
                    break;
                }
                if (act == "n" || act == "prune_normal_only") {
                    d.action = TriageAction::PruneNormalOnly;
                    break;
                }
                out << "unrecognized; k, a, n or empty for default: " << std::flush;
            }
            if (!ok) break;
            out << "note [" << d.note << "]: " << std::flush;
            if (!std::getline(in, line)) {
                // keep the decision made so far, then stop
                decisions[i] = d;
                aborted = true;
                break;
            }
            if (!trim_lower(line).empty()) {
                // preserve the user's original casing for notes
                std::size_t b = line.find_first_not_of(" \t\r\n");
                std::size_t e = line.find_last_not_of(" \t\r\n");
                d.note = line.substr(b, e - b + 1);
            }
            decisions[i] = d;
            ++i;
        } else {
            out << "unrecognized input \"" << cmd << "\"\n";
        }
    }

    CategoryMap map = current_map();
    if (aborted && !map.complete) {
        out << "\nsession ended early: " << map.entries.size() << " of " << report.size()
            << " topics decided (map saved as incomplete)\n";
    } else {
        print_impact(out, prune_impact(map, report));
    }
    return map;
}

void save_category_map(const CategoryMap& map, const std::string& path) {
    json topics = json::object();
    for (const auto& [topic, d] : map.entries)
        topics[std::to_string(topic)] = {
            {"category", d.category}, {"action", to_string(d.action)}, {"note", d.note}};
    json j;
    j["version"] = 1;
    j["model_hash"] = map.model_hash;
    j["complete"] = map.complete;
    j["topics"] = topics;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write category map: " + path);
    out << j.dump(2) << "\n";
}

CategoryMap load_category_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open category map: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw DataError("category map " + path + ": " + e.what());
    }
    if (j.value("version", 0) != 1)
        throw DataError("category map " + path + ": unsupported version");
    CategoryMap map;
    map.model_hash = j.value("model_hash", std::string{});
    map.complete = j.value("complete", true);
    if (!j.contains("topics") || !j["topics"].is_object())
        throw DataError("category map " + path + ": missing topics object");
    for (const auto& [key, entry] : j["topics"].items()) {
        std::size_t topic = 0;
        try {
            std::size_t pos = 0;
            topic = std::stoul(key, &pos);
            if (pos != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw DataError("category map " + path + ": bad topic id \"" + key + "\"");
        }
        if (map.entries.count(topic))
            throw DataError("category map " + path + ": duplicate topic id " +
                            std::to_string(topic));
        TopicDecision d;
        if (!entry.contains("category") || !entry["category"].is_number_integer())
            throw DataError("category map " + path + ": topic " + key +
                            " has no integer category");
        d.category = entry["category"].get<int>();
        if (d.category < 1 || d.category > 3)
            throw DataError("category map " + path + ": topic " + key + " category " +
                            std::to_string(d.category) + " out of range (1-3)");
        d.action = triage_action_from_string(entry.value("action", std::string{"keep"}));
        d.note = entry.value("note", std::string{});
        map.entries[topic] = d;
    }
    return map;
}

}  // namespace topicaudit
