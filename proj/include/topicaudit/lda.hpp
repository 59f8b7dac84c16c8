#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "topicaudit/corpus.hpp"
#include "topicaudit/textprep.hpp"

namespace topicaudit {

struct LdaConfig {
    std::size_t k = 10;
    // alpha/eta <= 0 mean "use the symmetric default 1/K"
    double alpha = 0.0;
    double eta = 0.0;
    std::size_t chunk_size = 2000;
    double kappa = 0.5;
    double tau0 = 1.0;
    std::size_t passes = 1;
    std::size_t e_step_max_iters = 50;
    double gamma_threshold = 1e-3;
    std::uint64_t seed = 42;
    bool shuffle = false;  // shuffle document order before chunking

    double resolved_alpha() const { return alpha > 0 ? alpha : 1.0 / static_cast<double>(k); }
    double resolved_eta() const { return eta > 0 ? eta : 1.0 / static_cast<double>(k); }

    // throws UsageError when out of range
    void validate() const;
};

class TopicModel {
public:
    TopicModel() = default;
    TopicModel(std::size_t k, std::size_t v, LdaConfig cfg, std::string vocab_hash);

    std::size_t k() const { return k_; }
    std::size_t v() const { return v_; }
    const LdaConfig& config() const { return config_; }
    const std::string& vocab_hash() const { return vocab_hash_; }
    std::size_t updates_seen() const { return updates_seen_; }

    double lambda(std::size_t topic, std::size_t word) const {
        return lambda_[topic * v_ + word];
    }
    const std::vector<double>& lambda_flat() const { return lambda_; }
    std::vector<double>& lambda_flat() { return lambda_; }
    const double* row(std::size_t topic) const { return lambda_.data() + topic * v_; }
    double* row(std::size_t topic) { return lambda_.data() + topic * v_; }

    void set_updates_seen(std::size_t n) { updates_seen_ = n; }

    // row-normalized topic-word probabilities for one topic
    std::vector<double> topic_distribution(std::size_t topic) const;

private:
    std::size_t k_ = 0;
    std::size_t v_ = 0;
    std::vector<double> lambda_;  // row-major K x V
    LdaConfig config_;
    std::string vocab_hash_;  // hex SHA-256 of the training vocabulary
    std::size_t updates_seen_ = 0;
};

struct TopicAssignment {
    std::string doc_id;
    std::vector<double> theta;
    std::size_t dominant = 0;
};

// Online variational Bayes. Chunks are taken in corpus order (or a seeded
// shuffle when cfg.shuffle); the step size for the t-th M-step (0-based,
// counted across passes) is rho_t = (tau0 + t)^(-kappa), clamped to 1.
TopicModel train(const std::vector<BowDoc>& corpus, const Vocabulary& vocab,
                 const LdaConfig& cfg, std::size_t threads = 0);

// E-step against frozen lambda from a symmetric start (alpha + N/K), then
// gamma normalized to a probability vector. Empty doc -> uniform prior.
std::vector<double> infer_theta(const TopicModel& model, const BowDoc& bow);

// argmax with lowest-index tie-break
std::size_t dominant_topic(const std::vector<double>& theta);

// n highest-probability terms of the row-normalized topic, descending,
// ties by term id. Checks the vocabulary hash.
std::vector<std::pair<std::string, double>> top_words(const TopicModel& model,
                                                      const Vocabulary& vocab,
                                                      std::size_t topic, std::size_t n = 10);

// Variational lower bound on log p(corpus), divided by total token count.
double elbo_per_word(const TopicModel& model, const std::vector<BowDoc>& corpus);

void save_model(const TopicModel& model, const std::string& path);
TopicModel load_model(const std::string& path);

// throws DataError when the vocabulary hash differs from the model's
void require_vocab(const TopicModel& model, const Vocabulary& vocab);

std::vector<TopicAssignment> assign_corpus(const TopicModel& model, const Corpus& corpus,
                                           const std::vector<BowDoc>& bows,
                                           std::size_t threads = 0);

}  // namespace topicaudit
