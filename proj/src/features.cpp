#include "topicaudit/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "topicaudit/error.hpp"

namespace topicaudit {

void FeatConfig::validate() const {
    if (n_hash_dims < 2 || (n_hash_dims & (n_hash_dims - 1)) != 0)
        throw UsageError("n_hash_dims must be a power of two >= 2");
    if (ngram_orders.empty()) throw UsageError("ngram_orders must not be empty");
    for (int n : ngram_orders)
        if (n < 1 || n > 3) throw UsageError("ngram orders must lie in {1, 2, 3}");
}

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

// decorrelates the sign bit from the index bits
std::uint64_t remix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

}  // namespace

Featurizer::Featurizer(FeatConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

SparseVec Featurizer::hash_counts(const std::vector<std::string>& tokens) const {
    // tokens are alphabetic, so 0x1f never occurs inside one and n-grams of
    // different orders can never hash-collide by construction of the bytes
    std::map<std::uint32_t, double> acc;
    const std::uint64_t mask = cfg_.n_hash_dims - 1;
    for (int order : cfg_.ngram_orders) {
        const std::size_t n = static_cast<std::size_t>(order);
        if (tokens.size() < n) continue;
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
            std::uint64_t h = kFnvOffset;
            for (std::size_t j = 0; j < n; ++j) {
                if (j) {
                    h ^= 0x1f;
                    h *= kFnvPrime;
                }
                h = fnv1a(h, tokens[i + j]);
            }
            const auto idx = static_cast<std::uint32_t>(h & mask);
            const double sign = (remix(h) & 1) ? 1.0 : -1.0;
            acc[idx] += sign;
        }
    }
    SparseVec vec;
    vec.entries.reserve(acc.size());
    for (const auto& [idx, value] : acc)
        if (value != 0.0) vec.entries.emplace_back(idx, value);
    return vec;
}

void Featurizer::fit_idf(const std::vector<std::vector<std::string>>& train_docs) {
    if (!cfg_.tfidf) return;
    std::vector<std::size_t> df(cfg_.n_hash_dims, 0);
    for (const auto& tokens : train_docs)
        for (const auto& [idx, value] : hash_counts(tokens).entries) ++df[idx];
    const double n = static_cast<double>(train_docs.size());
    idf_.resize(cfg_.n_hash_dims);
    for (std::size_t i = 0; i < cfg_.n_hash_dims; ++i)
        idf_[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[i]))) + 1.0;
}

SparseVec Featurizer::transform(const std::vector<std::string>& tokens) const {
    SparseVec vec = hash_counts(tokens);
    if (!idf_.empty())
        for (auto& [idx, value] : vec.entries) value *= idf_[idx];
    double norm = 0.0;
    for (const auto& [idx, value] : vec.entries) norm += value * value;
    if (norm > 0.0) {
        const double inv = 1.0 / std::sqrt(norm);
        for (auto& [idx, value] : vec.entries) value *= inv;
    }
    return vec;
}

}  // namespace topicaudit
