#include "seghyp/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "seghyp/evaluation.hpp"
#include "seghyp/features.hpp"
#include "seghyp/random.hpp"

namespace seghyp {

namespace {

// Independent deterministic RNG streams derived from the config seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kMaskStream = 3;

}  // namespace

void write_training_log(const std::vector<EpochLog>& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write training log: " + path);
    for (const EpochLog& e : log) {
        nlohmann::json rec{{"epoch", e.epoch},
                           {"loss", e.loss},
                           {"dev_p", e.dev_p},
                           {"dev_r", e.dev_r},
                           {"dev_f1", e.dev_f1}};
        out << rec.dump() << '\n';
    }
    if (!out) throw DataError("failed while writing training log: " + path);
}

std::vector<double> build_cost(const MentionSet& gold, const SegmentalHypergraph& g,
                               double beta) {
    std::vector<std::uint8_t> in_gold = gold_edge_indicator(gold, g);
    std::vector<double> cost(static_cast<std::size_t>(g.num_edges()), 0.0);
    for (std::int32_t e = 0; e < g.num_edges(); ++e) {
        if (in_gold[static_cast<std::size_t>(e)]) continue;
        EdgeKind kind = g.edge(e).id.kind;
        if (kind == EdgeKind::TX)
            cost[static_cast<std::size_t>(e)] = beta;
        else if (kind == EdgeKind::TI)
            cost[static_cast<std::size_t>(e)] = 1.0;
    }
    return cost;
}

PreparedExample prepare_example(const MentionSet& gold, int n, int num_types, int cap,
                                GraphCache& cache, double beta) {
    PreparedExample ex;
    ex.graph = cache.get(n, num_types, cap);
    ex.gold_path = encode(gold, *ex.graph);
    ex.cost = build_cost(gold, *ex.graph, beta);
    return ex;
}

double structured_loss(EdgeScoreTable& scores, const PreparedExample& ex,
                       std::vector<double>* dphi) {
    scores.set_delta(ex.cost);
    InferenceResult res = marginals(*ex.graph, scores, /*use_cost=*/true);
    double gold_score = 0.0;
    for (std::int32_t e : ex.gold_path.edges) gold_score += scores.phi(e);
    if (dphi != nullptr) {
        *dphi = res.edge_marginals;
        for (std::int32_t e : ex.gold_path.edges) (*dphi)[static_cast<std::size_t>(e)] -= 1.0;
    }
    return res.log_z - gold_score;
}

double linear_sentence_loss(LinearScorer& scorer, const EdgeFeatureLists& features,
                            const PreparedExample& ex, double l2, bool with_grad) {
    ScoredSentence scored = scorer.score_cached(features, *ex.graph);
    std::vector<double> dphi;
    double loss = structured_loss(scored.scores, ex, with_grad ? &dphi : nullptr);
    std::vector<std::uint32_t> active;
    for (const auto& list : features) active.insert(active.end(), list.begin(), list.end());
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());
    for (std::uint32_t f : active) {
        double w = scorer.weights()[f];
        loss += 0.5 * l2 * w * w;
    }
    if (with_grad) {
        scored.backward(dphi);
        for (std::uint32_t f : active) scorer.add_grad(f, l2 * scorer.weights()[f]);
    }
    return loss;
}

double neural_sentence_loss(NeuralScorer& scorer, const Sentence& sentence,
                            const PreparedExample& ex, double l2, bool training_mode,
                            std::uint64_t mask_seed, bool with_grad) {
    ScoredSentence scored = scorer.score(sentence, *ex.graph, training_mode, mask_seed);
    std::vector<double> dphi;
    double loss = structured_loss(scored.scores, ex, with_grad ? &dphi : nullptr);
    auto params = tensor_refs(scorer.params());
    double sq = 0.0;
    for (const TensorRef& ref : params)
        for (Eigen::Index i = 0; i < ref.size(); ++i) sq += ref.data[i] * ref.data[i];
    loss += 0.5 * l2 * sq;
    if (with_grad) {
        scored.backward(dphi);
        auto grads = tensor_refs(scorer.grads());
        for (std::size_t t = 0; t < params.size(); ++t)
            for (Eigen::Index i = 0; i < params[t].size(); ++i)
                grads[t].data[i] += l2 * params[t].data[i];
    }
    return loss;
}

void DenseAdam::step(const std::vector<TensorRef>& params, const std::vector<TensorRef>& grads,
                     const std::string& sentence_id) {
    if (params.size() != grads.size()) throw Error("optimizer: tensor lists differ");
    Eigen::Index total = 0;
    for (const TensorRef& p : params) total += p.size();
    if (m_.empty()) {
        m_.assign(static_cast<std::size_t>(total), 0.0);
        v_.assign(static_cast<std::size_t>(total), 0.0);
    } else if (m_.size() != static_cast<std::size_t>(total)) {
        throw Error("optimizer: parameter count changed between steps");
    }

    double sq = 0.0;
    for (std::size_t t = 0; t < grads.size(); ++t) {
        if (params[t].size() != grads[t].size())
            throw Error("optimizer: gradient shape mismatch for " + params[t].name);
        for (Eigen::Index i = 0; i < grads[t].size(); ++i) sq += grads[t].data[i] * grads[t].data[i];
    }
    if (!std::isfinite(sq))
        throw NonFiniteGradientError("non-finite gradient at sentence " + sentence_id);
    double norm = std::sqrt(sq);
    double scale = norm > clip_ ? clip_ / norm : 1.0;

    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    std::size_t off = 0;
    for (std::size_t t = 0; t < params.size(); ++t) {
        for (Eigen::Index i = 0; i < params[t].size(); ++i, ++off) {
            double g = grads[t].data[i] * scale;
            m_[off] = beta1_ * m_[off] + (1.0 - beta1_) * g;
            v_[off] = beta2_ * v_[off] + (1.0 - beta2_) * g * g;
            double m_hat = m_[off] / bc1;
            double v_hat = v_[off] / bc2;
            params[t].data[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
        }
    }
}

void SparseAdam::step(std::vector<double>& weights,
                      const std::vector<std::pair<std::uint32_t, double>>& grad,
                      const std::string& sentence_id) {
    if (m_.size() < weights.size()) {
        m_.resize(weights.size(), 0.0);
        v_.resize(weights.size(), 0.0);
    }
    double sq = 0.0;
    for (const auto& [fid, g] : grad) {
        if (fid >= weights.size()) throw Error("optimizer: feature id out of range");
        sq += g * g;
    }
    if (!std::isfinite(sq))
        throw NonFiniteGradientError("non-finite gradient at sentence " + sentence_id);
    double norm = std::sqrt(sq);
    double scale = norm > clip_ ? clip_ / norm : 1.0;

    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (const auto& [fid, gval] : grad) {
        double g = gval * scale;
        m_[fid] = beta1_ * m_[fid] + (1.0 - beta1_) * g;
        v_[fid] = beta2_ * v_[fid] + (1.0 - beta2_) * g * g;
        weights[fid] -= lr_ * (m_[fid] / bc1) / (std::sqrt(v_[fid] / bc2) + eps_);
    }
}

namespace {

int cap_for_len(int max_len, int n) {
    int c = max_len == 0 ? n : std::min(max_len, n);
    return std::max(1, c);
}

void fail_on_cap_violations(const Corpus& corpus, const TypeVocab& types, int max_len) {
    std::string offenders;
    int listed = 0, total = 0;
    for (const Annotated& item : corpus.items) {
        int cap = cap_for_len(max_len, item.sentence.length());
        for (const Mention& m : item.mentions) {
            if (mention_length(m) <= cap) continue;
            ++total;
            if (listed < 10) {
                offenders += "\n  " + item.sentence.id + ": [" + std::to_string(m.start) +
                             ", " + std::to_string(m.end) + "] " + types.name(m.type) +
                             " (length " + std::to_string(mention_length(m)) + " > cap " +
                             std::to_string(cap) + ")";
                ++listed;
            }
        }
    }
    if (total == 0) return;
    if (total > listed) offenders += "\n  ... and " + std::to_string(total - listed) + " more";
    throw GoldViolatesCapError("gold mentions exceed the length cap:" + offenders);
}

NeuralScorer build_neural_scorer(const Corpus& train_corpus, const TypeVocab& types,
                                 const TrainConfig& config) {
    StringVocab words, pos, chars;
    std::unordered_map<std::string, int> freq;
    for (const Annotated& item : train_corpus.items) {
        for (const std::string& tok : item.sentence.tokens) {
            std::string low = lowercase(tok);
            words.add(low);
            ++freq[low];
            for (char ch : tok) chars.add(std::string(1, ch));
        }
        for (const std::string& tag : item.sentence.pos) pos.add(tag);
    }
    std::vector<std::uint8_t> rare(static_cast<std::size_t>(words.size()), 0);
    for (int w = 1; w < words.size(); ++w)
        rare[static_cast<std::size_t>(w)] = freq[words.item(w)] <= 1 ? 1 : 0;

    NeuralConfig nc = config.neural;
    nc.dropout = config.dropout;
    NeuralScorer scorer(nc, std::move(words), std::move(pos), std::move(chars), std::move(rare),
                        types.size(), derive_seed(config.seed, kInitStream));
    if (!config.embeddings.empty())
        load_pretrained_embeddings(config.embeddings, scorer.words(),
                                   scorer.params().word_emb);
    return scorer;
}

}  // namespace

TrainResult train(const Corpus& train_corpus, const Corpus& dev_corpus, const TypeVocab& types,
                  const TrainConfig& config) {
    if (train_corpus.items.empty()) throw DataError("training corpus is empty");
    if (dev_corpus.items.empty()) throw DataError("dev corpus is empty");
    if (types.size() < 1) throw DataError("no mention types present");
    if (config.beta < 1.0) throw Error("beta must be at least 1");
    if (config.clip_norm <= 0.0) throw Error("clip norm must be positive");
    if (config.epochs < 1) throw Error("epoch count must be positive");
    if (config.scorer != "linear" && config.scorer != "neural")
        throw Error("unknown scorer kind: " + config.scorer);

    fail_on_cap_violations(train_corpus, types, config.max_len);

    Model model;
    model.max_len = config.max_len;
    model.types = types;
    const bool is_linear = config.scorer == "linear";
    if (is_linear)
        model.scorer = LinearScorer{};
    else
        model.scorer = build_neural_scorer(train_corpus, types, config);

    GraphCache& cache = GraphCache::shared();
    const std::size_t count = train_corpus.items.size();
    std::vector<PreparedExample> examples;
    examples.reserve(count);
    for (const Annotated& item : train_corpus.items)
        examples.push_back(prepare_example(item.mentions, item.sentence.length(), types.size(),
                                           cap_for_len(config.max_len, item.sentence.length()),
                                           cache, config.beta));

    std::vector<EdgeFeatureLists> feature_cache;
    if (is_linear) {
        feature_cache.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            feature_cache.push_back(model.linear().edge_features(
                train_corpus.items[i].sentence, *examples[i].graph));
    }

    DenseAdam dense(config.learning_rate, config.beta1, config.beta2, config.adam_eps,
                    config.clip_norm);
    SparseAdam sparse(config.learning_rate, config.beta1, config.beta2, config.adam_eps,
                      config.clip_norm);

    std::vector<MentionSet> dev_gold;
    dev_gold.reserve(dev_corpus.items.size());
    for (const Annotated& item : dev_corpus.items) dev_gold.push_back(item.mentions);

    TrainResult result;
    double best_f1 = -1.0;
    int since_best = 0;
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(derive_seed(config.seed, kShuffleStream),
                                    static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);
        std::uint64_t epoch_mask_seed =
            derive_seed(derive_seed(config.seed, kMaskStream), static_cast<std::uint64_t>(epoch));

        double total_loss = 0.0;
        for (std::size_t idx : order) {
            const Annotated& item = train_corpus.items[idx];
            if (is_linear) {
                total_loss += linear_sentence_loss(model.linear(), feature_cache[idx],
                                                   examples[idx], config.l2, /*with_grad=*/true);
                auto grad = model.linear().drain_grad();
                sparse.step(model.linear().weights(), grad, item.sentence.id);
            } else {
                NeuralScorer& scorer = model.neural();
                scorer.zero_grads();
                total_loss += neural_sentence_loss(
                    scorer, item.sentence, examples[idx], config.l2, /*training_mode=*/true,
                    derive_seed(epoch_mask_seed, static_cast<std::uint64_t>(idx)),
                    /*with_grad=*/true);
                dense.step(tensor_refs(scorer.params()), tensor_refs(scorer.grads()),
                           item.sentence.id);
            }
        }

        std::vector<MentionSet> dev_pred;
        dev_pred.reserve(dev_corpus.items.size());
        for (const Annotated& item : dev_corpus.items)
            dev_pred.push_back(model.predict(item.sentence, cache));
        EvalReport report = evaluate(dev_gold, dev_pred);

        EpochLog entry;
        entry.epoch = epoch;
        entry.loss = total_loss / static_cast<double>(count);
        entry.dev_p = report.overall.precision;
        entry.dev_r = report.overall.recall;
        entry.dev_f1 = report.overall.f1;
        result.log.push_back(entry);

        if (entry.dev_f1 > best_f1) {
            best_f1 = entry.dev_f1;
            result.model = model;
            result.best_epoch = epoch;
            since_best = 0;
        } else {
            ++since_best;
        }
        if (since_best > config.patience) break;
    }
    return result;
}

}  // namespace seghyp
