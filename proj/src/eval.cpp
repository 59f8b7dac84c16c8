#include "topicaudit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "topicaudit/error.hpp"

namespace topicaudit {

using nlohmann::json;

EvalReport evaluate(const std::vector<Prediction>& preds, const Corpus& gold,
                    const PolarityMap& polarity,
                    const std::vector<TopicAssignment>* assignments,
                    const CategoryMap* categories, const std::set<std::string>* lexicon) {
    EvalReport report;
    report.per_class_accuracy = per_class_accuracy(preds, gold, polarity);
    report.macro_f1 = macro_f1(preds, gold, &report.confusion);
    if (assignments && categories)
        report.per_category_accuracy =
            breakdown_by_category(preds, gold, *assignments, *categories, polarity);
    if (lexicon) {
        std::map<std::string, Corpus> by_class;
        for (const Document& doc : gold.documents)
            by_class[class_of(doc)].documents.push_back(doc);
        for (const auto& [cls, subset] : by_class)
            report.explicit_rates[cls] = explicit_rate(subset, *lexicon);
        report.explicit_rates["(all)"] = explicit_rate(gold, *lexicon);
    }
    return report;
}

std::map<std::string, double> flatten_metrics(const EvalReport& report) {
    std::map<std::string, double> flat;
    flat["macro_f1"] = report.macro_f1;
    for (const auto& [cls, acc] : report.per_class_accuracy) flat["acc/" + cls] = acc;
    for (const auto& [key, acc] : report.per_category_accuracy)
        flat["cat/" + key.first + "/" + std::to_string(key.second)] = acc;
    for (const auto& [cls, rate] : report.explicit_rates) flat["explicit/" + cls] = rate;
    return flat;
}

namespace {

json report_to_json(const EvalReport& report) {
    json j;
    j["per_class_accuracy"] = report.per_class_accuracy;
    j["macro_f1"] = report.macro_f1;
    j["confusion"] = {{"tp", report.confusion.tp},
                      {"fp", report.confusion.fp},
                      {"fn", report.confusion.fn},
                      {"tn", report.confusion.tn}};
    if (!report.per_category_accuracy.empty()) {
        json cats = json::object();
        for (const auto& [key, acc] : report.per_category_accuracy)
            cats[key.first][std::to_string(key.second)] = acc;
        j["per_category_accuracy"] = cats;
    }
    if (!report.explicit_rates.empty()) j["explicit_rates"] = report.explicit_rates;
    return j;
}

}  // namespace

std::string report_json(const EvalReport& report) { return report_to_json(report).dump(2) + "\n"; }

std::string render_report(const EvalReport& report) {
    std::ostringstream out;
    std::size_t width = 5;
    for (const auto& [cls, acc] : report.per_class_accuracy)
        width = std::max(width, cls.size());
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-*s  overall      C1      C2      C3\n",
                  static_cast<int>(width), "class");
    out << buf;
    for (const auto& [cls, acc] : report.per_class_accuracy) {
        std::snprintf(buf, sizeof(buf), "%-*s  %7.3f", static_cast<int>(width), cls.c_str(),
                      acc);
        out << buf;
        for (int cat = 1; cat <= 3; ++cat) {
            auto it = report.per_category_accuracy.find({cls, cat});
            if (it == report.per_category_accuracy.end()) {
                out << "       -";
            } else {
                std::snprintf(buf, sizeof(buf), "  %6.3f", it->second);
                out << buf;
            }
        }
        out << "\n";
    }
    std::snprintf(buf, sizeof(buf), "macro F1: %.4f  (TP=%zu FP=%zu FN=%zu TN=%zu)\n",
                  report.macro_f1, report.confusion.tp, report.confusion.fp,
                  report.confusion.fn, report.confusion.tn);
    out << buf;
    if (!report.explicit_rates.empty()) {
        out << "explicit rate\n";
        for (const auto& [cls, rate] : report.explicit_rates) {
            std::snprintf(buf, sizeof(buf), "  %-*s  %.3f\n", static_cast<int>(width),
                          cls.c_str(), rate);
            out << buf;
        }
    }
    return out.str();
}

RepeatedReport run_repeated(const std::function<EvalReport(std::uint64_t)>& run,
                            std::uint64_t base_seed, std::size_t repeats) {
    if (repeats < 1) throw UsageError("repeats must be >= 1");
    RepeatedReport out;
    out.runs.reserve(repeats);
    for (std::size_t i = 0; i < repeats; ++i) out.runs.push_back(run(base_seed + i));

    std::map<std::string, std::vector<double>> series;
    for (const EvalReport& report : out.runs)
        for (const auto& [name, value] : flatten_metrics(report)) series[name].push_back(value);
    for (const auto& [name, values] : series) {
        RepeatStats stats;
        stats.n = values.size();
        for (double v : values) stats.mean += v;
        stats.mean /= static_cast<double>(values.size());
        double var = 0.0;
        for (double v : values) var += (v - stats.mean) * (v - stats.mean);
        var /= static_cast<double>(values.size());
        stats.stddev = std::sqrt(var);
        out.metrics[name] = stats;
    }
    return out;
}

std::string repeated_json(const RepeatedReport& report) {
    json j;
    j["repeats"] = report.runs.size();
    json metrics = json::object();
    for (const auto& [name, stats] : report.metrics)
        metrics[name] = {{"mean", stats.mean}, {"std", stats.stddev}, {"n", stats.n}};
    j["metrics"] = metrics;
    json runs = json::array();
    for (const EvalReport& r : report.runs) runs.push_back(json::parse(report_json(r)));
    j["runs"] = runs;
    return j.dump(2) + "\n";
}

std::string render_repeated(const RepeatedReport& report) {
    std::ostringstream out;
    out << report.runs.size() << " repeats (mean +/- std)\n";
    std::size_t width = 6;
    for (const auto& [name, stats] : report.metrics) width = std::max(width, name.size());
    char buf[160];
    for (const auto& [name, stats] : report.metrics) {
        std::snprintf(buf, sizeof(buf), "  %-*s  %.4f +/- %.4f\n", static_cast<int>(width),
                      name.c_str(), stats.mean, stats.stddev);
        out << buf;
    }
    return out.str();
}

}  // namespace topicaudit
