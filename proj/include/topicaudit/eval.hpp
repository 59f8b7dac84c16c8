#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "topicaudit/metrics.hpp"

namespace topicaudit {

struct EvalReport {
    std::map<std::string, double> per_class_accuracy;
    double macro_f1 = 0.0;
    Confusion confusion;  // the binary counts macro_f1 derives from
    std::map<std::pair<std::string, int>, double> per_category_accuracy;
    std::map<std::string, double> explicit_rates;  // per class plus "(all)"
};

// Scores predictions against the gold corpus. Category breakdown appears
// when assignments+categories are given; explicit rates when a lexicon is.
EvalReport evaluate(const std::vector<Prediction>& preds, const Corpus& gold,
                    const PolarityMap& polarity,
                    const std::vector<TopicAssignment>* assignments = nullptr,
                    const CategoryMap* categories = nullptr,
                    const std::set<std::string>* lexicon = nullptr);

std::string report_json(const EvalReport& report);
std::string render_report(const EvalReport& report);

// "macro_f1", "acc/<class>", "cat/<class>/<category>", "explicit/<class>"
std::map<std::string, double> flatten_metrics(const EvalReport& report);

struct RepeatStats {
    double mean = 0.0;
    double stddev = 0.0;  // population std
    std::size_t n = 0;
};

struct RepeatedReport {
    std::vector<EvalReport> runs;
    std::map<std::string, RepeatStats> metrics;
};

// Runs the experiment once per repeat with seeds base_seed + i and
// aggregates every flattened metric.
RepeatedReport run_repeated(const std::function<EvalReport(std::uint64_t)>& run,
                            std::uint64_t base_seed, std::size_t repeats);

std::string repeated_json(const RepeatedReport& report);
std::string render_repeated(const RepeatedReport& report);

}  // namespace topicaudit
