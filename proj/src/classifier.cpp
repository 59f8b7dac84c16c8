#include "topicaudit/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "topicaudit/error.hpp"
#include "topicaudit/parallel.hpp"
#include "topicaudit/rng.hpp"

namespace topicaudit {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow
double softplus(double x) {
    if (x > 35.0) return x;
    return std::log1p(std::exp(x));
}

double dot(const std::vector<double>& w, const SparseVec& x) {
    double s = 0.0;
    for (const auto& [idx, value] : x.entries) s += w[idx] * value;
    return s;
}

// mean logistic loss + (l2/2)|w|^2, no gradient
double objective(const std::vector<double>& w, double bias, const std::vector<SparseVec>& xs,
                 const std::vector<int>& ys, double l2) {
    double loss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double z = dot(w, xs[i]) + bias;
        loss += softplus(ys[i] ? -z : z);
    }
    loss /= static_cast<double>(xs.size());
    double sq = 0.0;
    for (double v : w) sq += v * v;
    return loss + 0.5 * l2 * sq;
}

}  // namespace

double loss_and_grad(const std::vector<double>& w, double bias,
                     const std::vector<SparseVec>& xs, const std::vector<int>& ys, double l2,
                     std::vector<double>& grad_w, double& grad_bias) {
    if (xs.empty()) throw UsageError("loss needs at least one example");
    grad_w.assign(w.size(), 0.0);
    grad_bias = 0.0;
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double z = dot(w, xs[i]) + bias;
        loss += softplus(ys[i] ? -z : z);
        const double g = sigmoid(z) - static_cast<double>(ys[i]);
        for (const auto& [idx, value] : xs[i].entries) grad_w[idx] += g * value * inv_n;
        grad_bias += g * inv_n;
    }
    loss *= inv_n;
    double sq = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        grad_w[i] += l2 * w[i];
        sq += w[i] * w[i];
    }
    return loss + 0.5 * l2 * sq;
}

LinearModel train_classifier(const std::vector<std::vector<std::string>>& docs,
                             const std::vector<Label>& labels, const FeatConfig& feat,
                             const TrainMeta& meta) {
    if (docs.size() != labels.size())
        throw DataError("document and label counts differ");
    if (docs.empty()) throw DataError("cannot train on an empty corpus");
    std::size_t n_toxic = 0, n_normal = 0;
    for (Label l : labels) {
        if (l == Label::Toxic) ++n_toxic;
        else if (l == Label::Normal) ++n_normal;
        else throw DataError("training corpus contains unlabeled documents");
    }
    if (n_toxic == 0 || n_normal == 0)
        throw DataError("training corpus has only one class (" + std::to_string(n_toxic) +
                        " Toxic, " + std::to_string(n_normal) + " Normal)");
    if (meta.base_lr <= 0.0 || meta.l2 < 0.0 || meta.base_lr * meta.l2 >= 1.0)
        throw UsageError("bad learning-rate/regularization combination");

    Featurizer featurizer(feat);
    featurizer.fit_idf(docs);
    std::vector<SparseVec> xs(docs.size());
    std::vector<int> ys(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        xs[i] = featurizer.transform(docs[i]);
        ys[i] = labels[i] == Label::Toxic ? 1 : 0;
    }

    const std::size_t n = xs.size();
    std::vector<double> w(feat.n_hash_dims, 0.0);
    double bias = 0.0;
    double scale = 1.0;  // true weights = scale * w
    std::size_t t = 0;   // global step
    const double steps_per_epoch = static_cast<double>(n);

    LinearModel model;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const Rng base(meta.seed);
    for (std::size_t epoch = 0; epoch < meta.epochs; ++epoch) {
        if (meta.shuffle) {
            Rng perm(base.fork(epoch));
            for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[perm.below(i)]);
        }
        for (std::size_t pos = 0; pos < n; ++pos) {
            const std::size_t i = order[pos];
            const double lr =
                meta.base_lr / (1.0 + static_cast<double>(t) / steps_per_epoch);
            const double z = scale * dot(w, xs[i]) + bias;
            const double g = sigmoid(z) - static_cast<double>(ys[i]);
            scale *= 1.0 - lr * meta.l2;  // lazy L2 on every weight
            const double step = lr * g / scale;
            for (const auto& [idx, value] : xs[i].entries) w[idx] -= step * value;
            bias -= lr * g;
            ++t;
            if (scale < 1e-9) {
                for (double& v : w) v *= scale;
                scale = 1.0;
            }
        }
        std::vector<double> folded(w.size());
        for (std::size_t j = 0; j < w.size(); ++j) folded[j] = scale * w[j];
        model.epoch_loss.push_back(objective(folded, bias, xs, ys, meta.l2));
    }

    for (double& v : w) v *= scale;
    for (double v : w)
        if (!std::isfinite(v)) throw DataError("training diverged (non-finite weights)");
    model.weights = std::move(w);
    model.bias = bias;
    model.feat = feat;
    model.idf = featurizer.idf();
    model.meta = meta;
    return model;
}

ScoredLabel predict(const LinearModel& model, const std::vector<std::string>& tokens) {
    Featurizer featurizer(model.feat);
    featurizer.set_idf(model.idf);
    const SparseVec x = featurizer.transform(tokens);
    ScoredLabel out;
    out.score = sigmoid(dot(model.weights, x) + model.bias);
    out.label = out.score >= 0.5 ? Label::Toxic : Label::Normal;
    return out;
}

std::vector<Prediction> predict_corpus(const LinearModel& model, const Corpus& corpus,
                                       const std::vector<std::vector<std::string>>& docs,
                                       std::size_t threads) {
    if (corpus.documents.size() != docs.size())
        throw DataError("corpus has " + std::to_string(corpus.documents.size()) +
                        " documents but " + std::to_string(docs.size()) +
                        " token lists were given");
    Featurizer featurizer(model.feat);
    featurizer.set_idf(model.idf);
    std::vector<Prediction> out(docs.size());
    parallel_slices(docs.size(), resolve_threads(threads),
                    [&](std::size_t b, std::size_t e, std::size_t) {
                        for (std::size_t i = b; i < e; ++i) {
                            const SparseVec x = featurizer.transform(docs[i]);
                            out[i].doc_id = corpus.documents[i].id;
                            out[i].score = sigmoid(dot(model.weights, x) + model.bias);
                        }
                    });
    return out;
}

}  // namespace topicaudit
