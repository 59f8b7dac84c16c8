#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "topicaudit/corpus.hpp"
#include "topicaudit/features.hpp"

namespace topicaudit {

struct TrainMeta {
    std::uint64_t seed = 42;
    std::size_t epochs = 5;
    double l2 = 1e-4;
    double base_lr = 0.5;  // lr_t = base_lr / (1 + t / steps_per_epoch)
    bool shuffle = true;   // off = visit documents in corpus order every epoch
};

struct LinearModel {
    std::vector<double> weights;  // length n_hash_dims
    double bias = 0.0;
    FeatConfig feat;
    std::vector<double> idf;  // frozen from the training split; empty = counts
    TrainMeta meta;
    std::vector<double> epoch_loss;  // regularized mean loss after each epoch
};

// Logistic regression by seeded SGD (lazy L2 via a scale factor, per-epoch
// shuffle derived from the seed). Labels must contain both classes.
LinearModel train_classifier(const std::vector<std::vector<std::string>>& docs,
                             const std::vector<Label>& labels, const FeatConfig& feat,
                             const TrainMeta& meta);

struct ScoredLabel {
    Label label = Label::Normal;
    double score = 0.0;  // sigmoid(w.x + b); Toxic iff >= 0.5
};

ScoredLabel predict(const LinearModel& model, const std::vector<std::string>& tokens);

struct Prediction {
    std::string doc_id;
    double score = 0.0;

    Label label() const { return score >= 0.5 ? Label::Toxic : Label::Normal; }
};

std::vector<Prediction> predict_corpus(const LinearModel& model, const Corpus& corpus,
                                       const std::vector<std::vector<std::string>>& docs,
                                       std::size_t threads = 0);

// Mean logistic loss over the batch plus (l2/2)|w|^2, with its gradient.
// The analytic gradient here is what the finite-difference check targets.
double loss_and_grad(const std::vector<double>& w, double bias,
                     const std::vector<SparseVec>& xs, const std::vector<int>& ys, double l2,
                     std::vector<double>& grad_w, double& grad_bias);

}  // namespace topicaudit
