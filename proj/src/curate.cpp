#include "topicaudit/curate.hpp"

#include <cmath>
#include <unordered_map>

#include "topicaudit/error.hpp"
#include "topicaudit/rng.hpp"

namespace topicaudit {

PruneSpec prune_spec_from_categories(const CategoryMap& map, const std::set<int>& categories,
                                     PruneScope scope) {
    PruneSpec spec;
    spec.scope = scope;
    for (const auto& [topic, decision] : map.entries)
        if (categories.count(decision.category)) spec.topic_ids.insert(topic);
    return spec;
}

namespace {

// dominant topic per doc id; every corpus doc must be covered
std::unordered_map<std::string, std::size_t> dominant_by_id(
    const std::vector<TopicAssignment>& assignments) {
    std::unordered_map<std::string, std::size_t> by_id;
    by_id.reserve(assignments.size());
    for (const TopicAssignment& a : assignments) by_id[a.doc_id] = a.dominant;
    return by_id;
}

}  // namespace

Corpus prune(const Corpus& corpus, const std::vector<TopicAssignment>& assignments,
             const PruneSpec& spec) {
    const auto by_id = dominant_by_id(assignments);
    Corpus out;
    out.name = corpus.name;
    out.documents.reserve(corpus.documents.size());
    for (const Document& doc : corpus.documents) {
        auto it = by_id.find(doc.id);
        if (it == by_id.end())
            throw DataError("no topic assignment for document \"" + doc.id + "\"");
        if (spec.scope == PruneScope::NormalOnly && doc.label == Label::Unlabeled)
            throw DataError("normal-only pruning needs binary labels; document \"" + doc.id +
                            "\" is unlabeled");
        const bool targeted = spec.topic_ids.count(it->second) > 0;
        const bool removed =
            targeted && (spec.scope == PruneScope::All || doc.label == Label::Normal);
        if (!removed) out.documents.push_back(doc);
    }
    return out;
}

Corpus prune_by_actions(const Corpus& corpus, const std::vector<TopicAssignment>& assignments,
                        const CategoryMap& map) {
    const auto by_id = dominant_by_id(assignments);
    bool wants_normal_only = false;
    for (const auto& [topic, decision] : map.entries)
        if (decision.action == TriageAction::PruneNormalOnly) wants_normal_only = true;

    Corpus out;
    out.name = corpus.name;
    out.documents.reserve(corpus.documents.size());
    for (const Document& doc : corpus.documents) {
        auto it = by_id.find(doc.id);
        if (it == by_id.end())
            throw DataError("no topic assignment for document \"" + doc.id + "\"");
        auto entry = map.entries.find(it->second);
        if (entry == map.entries.end())
            throw DataError("category map has no entry for topic " +
                            std::to_string(it->second));
        if (wants_normal_only && doc.label == Label::Unlabeled)
            throw DataError("normal-only pruning needs binary labels; document \"" + doc.id +
                            "\" is unlabeled");
        bool removed = false;
        switch (entry->second.action) {
            case TriageAction::Keep: break;
            case TriageAction::PruneAll: removed = true; break;
            case TriageAction::PruneNormalOnly: removed = doc.label == Label::Normal; break;
        }
        if (!removed) out.documents.push_back(doc);
    }
    return out;
}

namespace {

void require_binary(const Corpus& corpus) {
    for (const Document& doc : corpus.documents)
        if (doc.label == Label::Unlabeled)
            throw DataError("sampling requires binary labels; document \"" + doc.id +
                            "\" is unlabeled");
}

// keep[i] for the docs whose positions are listed in `positions`
std::vector<bool> pick(const std::vector<std::size_t>& positions, std::size_t want,
                       Rng& rng, std::size_t corpus_size) {
    std::vector<bool> keep(corpus_size, false);
    for (std::size_t idx : sample_without_replacement(positions.size(), want, rng))
        keep[positions[idx]] = true;
    return keep;
}

Corpus collect(const Corpus& corpus, const std::vector<bool>& keep) {
    Corpus out;
    out.name = corpus.name;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i)
        if (keep[i]) out.documents.push_back(corpus.documents[i]);
    return out;
}

}  // namespace

Corpus sample_ratio(const Corpus& corpus, double normal_per_toxic, std::uint64_t seed) {
    if (!(normal_per_toxic > 0))
        throw UsageError("ratio must be positive");
    require_binary(corpus);
    std::vector<std::size_t> normals;
    std::size_t n_toxic = 0;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        if (corpus.documents[i].label == Label::Normal) normals.push_back(i);
        else ++n_toxic;
    }
    // round half up
    const std::size_t want = static_cast<std::size_t>(
        std::floor(normal_per_toxic * static_cast<double>(n_toxic) + 0.5));
    if (want > normals.size())
        throw DataError("ratio sampling needs " + std::to_string(want) +
                        " Normal documents, corpus has " + std::to_string(normals.size()));
    Rng rng(seed);
    std::vector<bool> keep = pick(normals, want, rng, corpus.documents.size());
    for (std::size_t i = 0; i < corpus.documents.size(); ++i)
        if (corpus.documents[i].label == Label::Toxic) keep[i] = true;
    return collect(corpus, keep);
}

Corpus sample_fixed(const Corpus& corpus, std::size_t n_toxic, std::size_t n_normal,
                    std::uint64_t seed) {
    require_binary(corpus);
    std::vector<std::size_t> toxics, normals;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        if (corpus.documents[i].label == Label::Toxic) toxics.push_back(i);
        else normals.push_back(i);
    }
    if (n_toxic > toxics.size())
        throw DataError("requested " + std::to_string(n_toxic) + " Toxic documents, corpus has " +
                        std::to_string(toxics.size()));
    if (n_normal > normals.size())
        throw DataError("requested " + std::to_string(n_normal) +
                        " Normal documents, corpus has " + std::to_string(normals.size()));
    Rng rng(seed);
    std::vector<bool> keep = pick(toxics, n_toxic, rng, corpus.documents.size());
    for (std::size_t idx : sample_without_replacement(normals.size(), n_normal, rng))
        keep[normals[idx]] = true;
    return collect(corpus, keep);
}

Corpus sample(const Corpus& corpus, const SampleSpec& spec) {
    if (spec.mode == SampleMode::Ratio)
        return sample_ratio(corpus, spec.normal_per_toxic, spec.seed);
    return sample_fixed(corpus, spec.n_toxic, spec.n_normal, spec.seed);
}

}  // namespace topicaudit
