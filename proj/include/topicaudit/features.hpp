#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace topicaudit {

struct FeatConfig {
    std::size_t n_hash_dims = std::size_t{1} << 18;  // power of two
    std::set<int> ngram_orders = {1, 2};
    bool tfidf = true;  // idf fitted on the training split only

    void validate() const;  // throws UsageError
};

// (index, value), indices strictly increasing
struct SparseVec {
    std::vector<std::pair<std::uint32_t, double>> entries;
};

// Hashed n-gram features: token windows are FNV-1a hashed to an index in
// [0, n_hash_dims) with a sign bit from a second mix, counts accumulated.
class Featurizer {
public:
    explicit Featurizer(FeatConfig cfg);

    // document frequencies -> smoothed idf, from training docs only
    void fit_idf(const std::vector<std::vector<std::string>>& train_docs);

    // signed counts, times idf when fitted, then L2-normalized
    SparseVec transform(const std::vector<std::string>& tokens) const;

    const FeatConfig& config() const { return cfg_; }
    const std::vector<double>& idf() const { return idf_; }
    void set_idf(std::vector<double> idf) { idf_ = std::move(idf); }

private:
    SparseVec hash_counts(const std::vector<std::string>& tokens) const;

    FeatConfig cfg_;
    std::vector<double> idf_;  // empty until fitted (or when tfidf off)
};

}  // namespace topicaudit
