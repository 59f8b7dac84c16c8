#include "topicaudit/lda.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "topicaudit/error.hpp"
#include "topicaudit/math_util.hpp"
#include "topicaudit/parallel.hpp"
#include "topicaudit/rng.hpp"
#include "topicaudit/sha256.hpp"

namespace topicaudit {

using nlohmann::json;

void LdaConfig::validate() const {
    if (k < 1) throw UsageError("topic count must be >= 1");
    if (chunk_size < 1) throw UsageError("chunk_size must be >= 1");
    if (kappa < 0.5 || kappa > 1.0) throw UsageError("kappa must lie in [0.5, 1]");
    if (tau0 < 0.0) throw UsageError("tau0 must be >= 0");
    if (passes < 1) throw UsageError("passes must be >= 1");
    if (e_step_max_iters < 1) throw UsageError("e_step_max_iters must be >= 1");
    if (gamma_threshold <= 0.0) throw UsageError("gamma_threshold must be > 0");
}

TopicModel::TopicModel(std::size_t k, std::size_t v, LdaConfig cfg, std::string vocab_hash)
    : k_(k),
      v_(v),
      lambda_(k * v, 0.0),
      config_(std::move(cfg)),
      vocab_hash_(std::move(vocab_hash)) {}

std::vector<double> TopicModel::topic_distribution(std::size_t topic) const {
    const double* r = row(topic);
    double sum = 0.0;
    for (std::size_t w = 0; w < v_; ++w) sum += r[w];
    std::vector<double> p(v_);
    for (std::size_t w = 0; w < v_; ++w) p[w] = r[w] / sum;
    return p;
}

namespace {

// E[log beta_k,w] = psi(lambda_kw) - psi(sum_w lambda_kw), laid out as K
// rows of `stride` columns. `words` selects the columns; null keeps all V
// in id order so column == word id.
struct ElogBeta {
    std::vector<double> data;
    std::size_t stride = 0;
};

ElogBeta expected_log_beta(const TopicModel& model, const std::vector<std::uint32_t>* words) {
    const std::size_t k_count = model.k();
    const std::size_t v = model.v();
    const std::size_t stride = words ? words->size() : v;
    ElogBeta eb;
    eb.stride = stride;
    eb.data.resize(k_count * stride);
    for (std::size_t k = 0; k < k_count; ++k) {
        const double* r = model.row(k);
        double sum = 0.0;
        for (std::size_t w = 0; w < v; ++w) sum += r[w];
        const double psi_sum = digamma(sum);
        double* out = eb.data.data() + k * stride;
        if (words) {
            for (std::size_t a = 0; a < stride; ++a) out[a] = digamma(r[(*words)[a]]) - psi_sum;
        } else {
            for (std::size_t w = 0; w < v; ++w) out[w] = digamma(r[w]) - psi_sum;
        }
    }
    return eb;
}

struct DocScratch {
    std::vector<double> gamma, elogtheta, newgamma, phi;

    void resize(std::size_t k) {
        gamma.resize(k);
        elogtheta.resize(k);
        newgamma.resize(k);
        phi.resize(k);
    }
};

void elog_dirichlet(const std::vector<double>& x, std::vector<double>& out) {
    double sum = 0.0;
    for (double v : x) sum += v;
    const double psi_sum = digamma(sum);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = digamma(x[i]) - psi_sum;
}

// phi for one word: softmax of elogtheta + elogbeta column, with the max
// subtracted before exponentiation. Leaves unnormalized values in phi and
// returns their sum.
double word_phi(const std::vector<double>& elogtheta, const double* beta_col,
                std::size_t stride, std::size_t k_count, std::vector<double>& phi) {
    double m = elogtheta[0] + beta_col[0];
    phi[0] = m;
    for (std::size_t k = 1; k < k_count; ++k) {
        phi[k] = elogtheta[k] + beta_col[k * stride];
        if (phi[k] > m) m = phi[k];
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
        phi[k] = std::exp(phi[k] - m);
        norm += phi[k];
    }
    return norm;
}

// Variational loop for one document. `cols` maps entry index -> column in
// eb (null means column == word id). scratch.gamma carries the start value
// in and the converged value out; elogtheta is left consistent with it.
void doc_e_step(const BowDoc& doc, const std::uint32_t* cols, const ElogBeta& eb,
                std::size_t k_count, double alpha, std::size_t max_iters, double threshold,
                DocScratch& s) {
    elog_dirichlet(s.gamma, s.elogtheta);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        std::fill(s.newgamma.begin(), s.newgamma.end(), alpha);
        for (std::size_t i = 0; i < doc.entries.size(); ++i) {
            const auto& [w, n] = doc.entries[i];
            const std::size_t col = cols ? cols[i] : w;
            const double norm = word_phi(s.elogtheta, eb.data.data() + col, eb.stride, k_count, s.phi);
            const double scale = static_cast<double>(n) / norm;
            for (std::size_t k = 0; k < k_count; ++k) s.newgamma[k] += scale * s.phi[k];
        }
        const double change = mean_abs_diff(s.newgamma, s.gamma);
        s.gamma.swap(s.newgamma);
        elog_dirichlet(s.gamma, s.elogtheta);
        if (change < threshold) break;
    }
}

// n_dw * phi_dwk for the converged scratch, added into sstats (K rows of
// eb.stride columns).
void accumulate_sstats(const BowDoc& doc, const std::uint32_t* cols, const ElogBeta& eb,
                       std::size_t k_count, DocScratch& s, double* sstats) {
    for (std::size_t i = 0; i < doc.entries.size(); ++i) {
        const auto& [w, n] = doc.entries[i];
        const std::size_t col = cols ? cols[i] : w;
        const double norm = word_phi(s.elogtheta, eb.data.data() + col, eb.stride, k_count, s.phi);
        const double scale = static_cast<double>(n) / norm;
        for (std::size_t k = 0; k < k_count; ++k) sstats[k * eb.stride + col] += scale * s.phi[k];
    }
}

void check_term_ids(const std::vector<BowDoc>& corpus, std::size_t v) {
    for (std::size_t d = 0; d < corpus.size(); ++d)
        for (const auto& [w, n] : corpus[d].entries)
            if (w >= v)
                throw DataError("document " + std::to_string(d) + ": term id " +
                                std::to_string(w) + " out of range (vocabulary size " +
                                std::to_string(v) + ")");
}

}  // namespace

TopicModel train(const std::vector<BowDoc>& corpus, const Vocabulary& vocab,
                 const LdaConfig& cfg, std::size_t threads) {
    cfg.validate();
    if (corpus.empty()) throw DataError("cannot train on an empty corpus");
    const std::size_t v = vocab.size();
    const std::size_t k_count = cfg.k;
    check_term_ids(corpus, v);

    const double alpha = cfg.resolved_alpha();
    const double eta = cfg.resolved_eta();
    TopicModel model(k_count, v, cfg, vocab.content_hash());

    const Rng base(cfg.seed);
    {
        Rng lambda_rng(base.fork(0));
        for (auto& cell : model.lambda_flat()) cell = lambda_rng.next_gamma(100.0, 0.01);
    }

    const std::size_t n_docs = corpus.size();
    std::vector<std::size_t> order(n_docs);
    std::iota(order.begin(), order.end(), 0);
    if (cfg.shuffle) {
        Rng shuffle_rng(base.fork(~std::uint64_t{0}));
        for (std::size_t i = n_docs; i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }

    const std::size_t worker_count = resolve_threads(threads);
    std::vector<std::uint32_t> col_of(v, 0);
    std::size_t t = 0;  // M-step counter, 0-based across passes

    for (std::size_t pass = 0; pass < cfg.passes; ++pass) {
        for (std::size_t start = 0; start < n_docs; start += cfg.chunk_size) {
            const std::size_t end = std::min(start + cfg.chunk_size, n_docs);
            const std::size_t chunk_len = end - start;

            std::vector<std::uint32_t> active;
            for (std::size_t i = start; i < end; ++i)
                for (const auto& [w, n] : corpus[order[i]].entries) active.push_back(w);
            std::sort(active.begin(), active.end());
            active.erase(std::unique(active.begin(), active.end()), active.end());
            for (std::size_t a = 0; a < active.size(); ++a)
                col_of[active[a]] = static_cast<std::uint32_t>(a);

            const ElogBeta eb = expected_log_beta(model, &active);

            const std::size_t slices = slice_count(chunk_len, worker_count);
            std::vector<std::vector<double>> partial(slices);
            for (auto& p : partial) p.assign(k_count * active.size(), 0.0);

            parallel_slices(chunk_len, worker_count,
                            [&](std::size_t b, std::size_t e, std::size_t s_idx) {
                                DocScratch scratch;
                                scratch.resize(k_count);
                                std::vector<std::uint32_t> cols;
                                double* sstats = partial[s_idx].data();
                                for (std::size_t i = b; i < e; ++i) {
                                    const BowDoc& doc = corpus[order[start + i]];
                                    cols.resize(doc.entries.size());
                                    for (std::size_t j = 0; j < doc.entries.size(); ++j)
                                        cols[j] = col_of[doc.entries[j].first];
                                    Rng doc_rng(base.fork(1 + pass * n_docs + start + i));
                                    for (std::size_t k = 0; k < k_count; ++k)
                                        scratch.gamma[k] = doc_rng.next_gamma(100.0, 0.01);
                                    doc_e_step(doc, cols.data(), eb, k_count, alpha,
                                               cfg.e_step_max_iters, cfg.gamma_threshold, scratch);
                                    accumulate_sstats(doc, cols.data(), eb, k_count, scratch,
                                                      sstats);
                                }
                            });
            for (std::size_t s_idx = 1; s_idx < slices; ++s_idx)
                for (std::size_t i = 0; i < partial[0].size(); ++i)
                    partial[0][i] += partial[s_idx][i];

            double rho = std::pow(cfg.tau0 + static_cast<double>(t), -cfg.kappa);
            if (!std::isfinite(rho) || rho > 1.0) rho = 1.0;
            const double doc_scale = static_cast<double>(n_docs) / static_cast<double>(chunk_len);

            for (std::size_t k = 0; k < k_count; ++k) {
                double* r = model.row(k);
                for (std::size_t w = 0; w < v; ++w) r[w] = (1.0 - rho) * r[w] + rho * eta;
                const double* ss = partial[0].data() + k * active.size();
                for (std::size_t a = 0; a < active.size(); ++a)
                    r[active[a]] += rho * doc_scale * ss[a];
            }
            for (double cell : model.lambda_flat())
                if (!std::isfinite(cell) || cell <= 0.0)
                    throw DataError("invalid topic-word parameter after chunk " +
                                    std::to_string(t));
            ++t;
        }
    }
    model.set_updates_seen(t);
    return model;
}

std::vector<double> infer_theta(const TopicModel& model, const BowDoc& bow) {
    const std::size_t k_count = model.k();
    if (bow.entries.empty())
        return std::vector<double>(k_count, 1.0 / static_cast<double>(k_count));
    for (const auto& [w, n] : bow.entries)
        if (w >= model.v())
            throw DataError("term id " + std::to_string(w) + " out of range (vocabulary size " +
                            std::to_string(model.v()) + ")");

    std::vector<std::uint32_t> words;
    words.reserve(bow.entries.size());
    for (const auto& [w, n] : bow.entries) words.push_back(w);
    const ElogBeta eb = expected_log_beta(model, &words);
    std::vector<std::uint32_t> cols(words.size());
    std::iota(cols.begin(), cols.end(), std::uint32_t{0});

    const double alpha = model.config().resolved_alpha();
    DocScratch scratch;
    scratch.resize(k_count);
    const double start = alpha + static_cast<double>(bow.token_count()) / static_cast<double>(k_count);
    std::fill(scratch.gamma.begin(), scratch.gamma.end(), start);
    doc_e_step(bow, cols.data(), eb, k_count, alpha, model.config().e_step_max_iters,
               model.config().gamma_threshold, scratch);

    double sum = 0.0;
    for (double g : scratch.gamma) sum += g;
    std::vector<double> theta(k_count);
    for (std::size_t k = 0; k < k_count; ++k) theta[k] = scratch.gamma[k] / sum;
    return theta;
}

std::size_t dominant_topic(const std::vector<double>& theta) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < theta.size(); ++k)
        if (theta[k] > theta[best]) best = k;
    return best;
}

std::vector<std::pair<std::string, double>> top_words(const TopicModel& model,
                                                      const Vocabulary& vocab,
                                                      std::size_t topic, std::size_t n) {
    if (topic >= model.k()) throw UsageError("topic id out of range");
    require_vocab(model, vocab);
    const std::vector<double> p = model.topic_distribution(topic);
    std::vector<std::uint32_t> idx(model.v());
    std::iota(idx.begin(), idx.end(), std::uint32_t{0});
    const std::size_t take = std::min(n, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + take, idx.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                          if (p[a] != p[b]) return p[a] > p[b];
                          return a < b;
                      });
    std::vector<std::pair<std::string, double>> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.emplace_back(vocab.term(idx[i]), p[idx[i]]);
    return out;
}

double elbo_per_word(const TopicModel& model, const std::vector<BowDoc>& corpus) {
    const std::size_t k_count = model.k();
    const std::size_t v = model.v();
    check_term_ids(corpus, v);
    const double alpha = model.config().resolved_alpha();
    const double eta = model.config().resolved_eta();
    const ElogBeta eb = expected_log_beta(model, nullptr);

    double score = 0.0;
    std::size_t total_tokens = 0;
    DocScratch scratch;
    scratch.resize(k_count);
    std::vector<double> x(k_count);
    for (const BowDoc& doc : corpus) {
        if (doc.entries.empty()) continue;  // contributes exactly zero
        total_tokens += doc.token_count();
        const double start =
            alpha + static_cast<double>(doc.token_count()) / static_cast<double>(k_count);
        std::fill(scratch.gamma.begin(), scratch.gamma.end(), start);
        doc_e_step(doc, nullptr, eb, k_count, alpha, model.config().e_step_max_iters,
                   model.config().gamma_threshold, scratch);

        // E[log p(doc | theta, beta)] via log-sum-exp per word
        for (const auto& [w, n] : doc.entries) {
            double m = scratch.elogtheta[0] + eb.data[w];
            x[0] = m;
            for (std::size_t k = 1; k < k_count; ++k) {
                x[k] = scratch.elogtheta[k] + eb.data[k * v + w];
                if (x[k] > m) m = x[k];
            }
            double s = 0.0;
            for (std::size_t k = 0; k < k_count; ++k) s += std::exp(x[k] - m);
            score += static_cast<double>(n) * (m + std::log(s));
        }
        // E[log p(theta | alpha)] - E[log q(theta | gamma)]
        double gsum = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
            score += (alpha - scratch.gamma[k]) * scratch.elogtheta[k] +
                     std::lgamma(scratch.gamma[k]);
            gsum += scratch.gamma[k];
        }
        score -= static_cast<double>(k_count) * std::lgamma(alpha);
        score += std::lgamma(static_cast<double>(k_count) * alpha) - std::lgamma(gsum);
    }

    // E[log p(beta | eta)] - E[log q(beta | lambda)]
    for (std::size_t k = 0; k < k_count; ++k) {
        const double* r = model.row(k);
        const double* e = eb.data.data() + k * v;
        double rsum = 0.0;
        for (std::size_t w = 0; w < v; ++w) {
            score += (eta - r[w]) * e[w] + std::lgamma(r[w]);
            rsum += r[w];
        }
        score -= static_cast<double>(v) * std::lgamma(eta);
        score += std::lgamma(static_cast<double>(v) * eta) - std::lgamma(rsum);
    }

    return total_tokens == 0 ? 0.0 : score / static_cast<double>(total_tokens);
}

namespace {

void write_u32(std::ofstream& out, std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 4);
}

std::uint32_t read_u32(std::ifstream& in, const std::string& path) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4))
        throw DataError("model file truncated in header: " + path);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return v;
}

std::array<std::uint8_t, 32> hex_to_bytes32(const std::string& hex) {
    if (hex.size() != 64) throw DataError("vocabulary hash must be 64 hex characters");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw DataError("vocabulary hash contains a non-hex character");
    };
    std::array<std::uint8_t, 32> out{};
    for (std::size_t i = 0; i < 32; ++i)
        out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return out;
}

}  // namespace

void save_model(const TopicModel& model, const std::string& path) {
    const LdaConfig& c = model.config();
    json meta;
    meta["config"] = {{"k", c.k},
                      {"alpha", c.alpha},
                      {"eta", c.eta},
                      {"chunk_size", c.chunk_size},
                      {"kappa", c.kappa},
                      {"tau0", c.tau0},
                      {"passes", c.passes},
                      {"e_step_max_iters", c.e_step_max_iters},
                      {"gamma_threshold", c.gamma_threshold},
                      {"seed", c.seed},
                      {"shuffle", c.shuffle}};
    meta["v"] = model.v();
    meta["updates_seen"] = model.updates_seen();
    const std::string meta_str = meta.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path);
    out.write("TLDA", 4);
    write_u32(out, 1);
    write_u32(out, static_cast<std::uint32_t>(meta_str.size()));
    out.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));
    const auto hash = hex_to_bytes32(model.vocab_hash());
    out.write(reinterpret_cast<const char*>(hash.data()), 32);

    std::vector<char> buf(model.v() * 8);
    for (std::size_t k = 0; k < model.k(); ++k) {
        const double* r = model.row(k);
        for (std::size_t w = 0; w < model.v(); ++w) {
            const std::uint64_t bits = std::bit_cast<std::uint64_t>(r[w]);
            for (int b = 0; b < 8; ++b)
                buf[w * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
        }
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw DataError("write error on model file: " + path);
}

TopicModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "TLDA", 4) != 0)
        throw DataError("not a topic model file (bad magic): " + path);
    const std::uint32_t version = read_u32(in, path);
    if (version != 1)
        throw DataError("unsupported model file version " + std::to_string(version));
    const std::uint32_t meta_len = read_u32(in, path);
    std::string meta_str(meta_len, '\0');
    if (!in.read(meta_str.data(), meta_len))
        throw DataError("model file truncated in header: " + path);
    json meta;
    try {
        meta = json::parse(meta_str);
    } catch (const json::parse_error& e) {
        throw DataError("model file " + path + ": bad config block: " + e.what());
    }
    LdaConfig cfg;
    const json& c = meta.at("config");
    cfg.k = c.value("k", cfg.k);
    cfg.alpha = c.value("alpha", cfg.alpha);
    cfg.eta = c.value("eta", cfg.eta);
    cfg.chunk_size = c.value("chunk_size", cfg.chunk_size);
    cfg.kappa = c.value("kappa", cfg.kappa);
    cfg.tau0 = c.value("tau0", cfg.tau0);
    cfg.passes = c.value("passes", cfg.passes);
    cfg.e_step_max_iters = c.value("e_step_max_iters", cfg.e_step_max_iters);
    cfg.gamma_threshold = c.value("gamma_threshold", cfg.gamma_threshold);
    cfg.seed = c.value("seed", cfg.seed);
    cfg.shuffle = c.value("shuffle", cfg.shuffle);
    const std::size_t v = meta.at("v").get<std::size_t>();

    std::array<std::uint8_t, 32> hash{};
    if (!in.read(reinterpret_cast<char*>(hash.data()), 32))
        throw DataError("model file truncated in header: " + path);

    TopicModel model(cfg.k, v, cfg, to_hex(hash));
    const std::size_t expected = cfg.k * v * 8;
    std::vector<char> buf(expected);
    in.read(buf.data(), static_cast<std::streamsize>(expected));
    const std::size_t actual = static_cast<std::size_t>(in.gcount());
    if (actual < expected)
        throw DataError("model file truncated: expected " + std::to_string(expected) +
                        " lambda bytes, got " + std::to_string(actual));
    auto& lam = model.lambda_flat();
    for (std::size_t i = 0; i < cfg.k * v; ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i * 8 + b]))
                    << (8 * b);
        lam[i] = std::bit_cast<double>(bits);
    }
    model.set_updates_seen(meta.value("updates_seen", std::size_t{0}));
    return model;
}

void require_vocab(const TopicModel& model, const Vocabulary& vocab) {
    const std::string h = vocab.content_hash();
    if (h != model.vocab_hash())
        throw DataError("vocabulary does not match the model (hash " + h.substr(0, 12) +
                        "... vs model " + model.vocab_hash().substr(0, 12) + "...)");
}

std::vector<TopicAssignment> assign_corpus(const TopicModel& model, const Corpus& corpus,
                                           const std::vector<BowDoc>& bows,
                                           std::size_t threads) {
    if (corpus.documents.size() != bows.size())
        throw DataError("corpus has " + std::to_string(corpus.documents.size()) +
                        " documents but " + std::to_string(bows.size()) +
                        " bag-of-words rows were given");
    check_term_ids(bows, model.v());
    const std::size_t k_count = model.k();
    const double alpha = model.config().resolved_alpha();
    const double uniform = 1.0 / static_cast<double>(k_count);
    const ElogBeta eb = expected_log_beta(model, nullptr);

    std::vector<TopicAssignment> out(bows.size());
    parallel_slices(bows.size(), resolve_threads(threads),
                    [&](std::size_t b, std::size_t e, std::size_t) {
                        DocScratch scratch;
                        scratch.resize(k_count);
                        for (std::size_t i = b; i < e; ++i) {
                            TopicAssignment& a = out[i];
                            a.doc_id = corpus.documents[i].id;
                            const BowDoc& doc = bows[i];
                            if (doc.entries.empty()) {
                                a.theta.assign(k_count, uniform);
                                a.dominant = 0;
                                continue;
                            }
                            const double start =
                                alpha + static_cast<double>(doc.token_count()) /
                                            static_cast<double>(k_count);
                            std::fill(scratch.gamma.begin(), scratch.gamma.end(), start);
                            doc_e_step(doc, nullptr, eb, k_count, alpha,
                                       model.config().e_step_max_iters,
                                       model.config().gamma_threshold, scratch);
                            double sum = 0.0;
                            for (double g : scratch.gamma) sum += g;
                            a.theta.resize(k_count);
                            for (std::size_t k = 0; k < k_count; ++k)
                                a.theta[k] = scratch.gamma[k] / sum;
                            a.dominant = dominant_topic(a.theta);
                        }
                    });
    return out;
}

}  // namespace topicaudit
