#pragma once

// Pluggable edge scorers. Both produce an EdgeScoreTable for a sentence plus
// a backward hook that maps d(loss)/d(phi) into parameter gradients:
//   - LinearScorer: sparse handcrafted features with per-feature weights.
//   - NeuralScorer: embeddings -> word biLSTM -> span biLSTM (dynamic
//     programming over all admissible spans) -> per-type linear score heads,
//     with analytic gradients throughout.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "seghyp/hypergraph.hpp"
#include "seghyp/inference.hpp"
#include "seghyp/lstm.hpp"
#include "seghyp/types.hpp"

namespace seghyp {

/// Per-edge scores plus the matching backward hook. Calling backward(dphi)
/// accumulates gradients into the owning scorer's buffers; it captures the
/// forward trace, so drop the object once consumed. Eval-mode scoring leaves
/// backward empty.
struct ScoredSentence {
    EdgeScoreTable scores;
    std::function<void(const std::vector<double>& dphi)> backward;
};

/// Edge features as interned ids, one list per edge index.
using EdgeFeatureLists = std::vector<std::vector<std::uint32_t>>;

class LinearScorer {
  public:
    /// Eval path: unseen features are looked up without being added.
    ScoredSentence score(const Sentence& sentence, const SegmentalHypergraph& g) const;

    /// Training path, step 1: extract and intern every edge's features.
    /// Deterministic per (sentence, graph shape); the trainer caches this.
    EdgeFeatureLists edge_features(const Sentence& sentence, const SegmentalHypergraph& g);

    /// Training path, step 2: score from cached ids; backward adds
    /// dphi(e) into the gradient of every feature of edge e.
    ScoredSentence score_cached(const EdgeFeatureLists& features, const SegmentalHypergraph& g);

    std::uint32_t intern(const std::string& name);
    int find(const std::string& name) const;           // -1 when absent
    double weight_of(const std::string& name) const;   // 0 when absent
    std::size_t feature_count() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    std::vector<double>& weights() { return weights_; }
    const std::vector<double>& weights() const { return weights_; }

    void add_grad(std::uint32_t feature, double value) { pending_[feature] += value; }
    /// Accumulated gradient entries sorted by feature id; clears the buffer.
    std::vector<std::pair<std::uint32_t, double>> drain_grad();

  private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::vector<double> weights_;
    std::unordered_map<std::uint32_t, double> pending_;
};

/// String-to-dense-id vocabulary with the unknown symbol at index 0.
class StringVocab {
  public:
    StringVocab() { add(unk()); }
    static const std::string& unk();

    int add(const std::string& item);
    int lookup(const std::string& item) const;  // 0 when unknown
    int size() const { return static_cast<int>(items_.size()); }
    const std::string& item(int id) const { return items_[static_cast<std::size_t>(id)]; }
    const std::vector<std::string>& items() const { return items_; }

  private:
    std::vector<std::string> items_;
    std::unordered_map<std::string, int> index_;
};

struct NeuralConfig {
    int word_dim = 100;
    int pos_dim = 32;  // fixed by reporting convention; do not change lightly
    bool use_pos = true;
    bool use_char = false;
    int char_dim = 30;
    int char_hidden = 50;   // total across both directions
    int word_hidden = 200;  // d1, total across both directions
    int span_hidden = 200;  // d2, total across both directions
    double dropout = 0.5;

    int input_dim() const {
        return word_dim + (use_pos ? pos_dim : 0) + (use_char ? char_hidden : 0);
    }
};

/// All learnable tensors. The score head for the end-and-continue edges is
/// tied to w_ii/w_ix by construction: that edge's score is computed as the
/// sum of the continuation and ending scores, so no separate storage exists.
struct NeuralParams {
    Eigen::MatrixXd word_emb;  // word_dim x |Vw|
    Eigen::MatrixXd pos_emb;   // pos_dim x |Vp|
    Eigen::MatrixXd char_emb;  // char_dim x |Vc|
    LstmCell char_fwd, char_bwd;
    LstmCell word_fwd, word_bwd;
    LstmCell span_fwd, span_bwd;
    Eigen::MatrixXd w_tx, w_ti;  // m x d1
    Eigen::MatrixXd w_ii;        // m x 2*d2
    Eigen::MatrixXd w_ix;        // m x d2
};

/// Flat view of one tensor, used by the optimizer, the serializer, and the
/// finite-difference tests. Eigen stores matrices contiguously.
struct TensorRef {
    std::string name;
    double* data = nullptr;
    Eigen::Index rows = 0, cols = 0;

    Eigen::Index size() const { return rows * cols; }
};

/// All tensors of `params` in a fixed order (empty ones included, size 0).
std::vector<TensorRef> tensor_refs(NeuralParams& params);

/// Forward trace kept for the backward pass and for instrumentation.
struct NeuralTrace {
    std::vector<int> word_ids, pos_ids;
    std::vector<std::vector<int>> char_ids;
    std::vector<LstmTrace> char_f, char_b;  // per token
    Eigen::MatrixXd v;                      // input vectors after dropout
    Eigen::MatrixXd mask;                   // dropout mask; empty = identity
    LstmTrace word_f, word_b;
    Eigen::MatrixXd h_w;            // d1 x n
    std::vector<LstmTrace> span_f;  // per start position
    std::vector<LstmTrace> span_b;  // per end position
    Eigen::MatrixXd h_s;  // d2 x span_count, column = graph span index
    int span_fwd_steps = 0, span_bwd_steps = 0;
};

class NeuralScorer {
  public:
    NeuralScorer() = default;
    /// Fresh parameters: embeddings U(-0.1, 0.1), recurrence and head
    /// weights Glorot-uniform, biases zero; all drawn from init_seed.
    NeuralScorer(NeuralConfig config, StringVocab words, StringVocab pos_tags,
                 StringVocab chars, std::vector<std::uint8_t> rare_words, int num_types,
                 std::uint64_t init_seed);

    /// In training mode, mask_seed deterministically drives dropout and the
    /// rare-word unknown replacement; eval mode ignores it and applies no
    /// dropout. The backward hook of the result writes into grads().
    ScoredSentence score(const Sentence& sentence, const SegmentalHypergraph& g,
                         bool training, std::uint64_t mask_seed);

    /// Same as score() but also exposes the forward trace (for tests).
    ScoredSentence score_traced(const Sentence& sentence, const SegmentalHypergraph& g,
                                bool training, std::uint64_t mask_seed,
                                std::shared_ptr<const NeuralTrace>* trace_out);

    NeuralConfig& config() { return config_; }
    const NeuralConfig& config() const { return config_; }
    NeuralParams& params() { return params_; }
    const NeuralParams& params() const { return params_; }
    NeuralParams& grads() { return grads_; }
    void zero_grads();
    int num_types() const { return num_types_; }
    StringVocab& words() { return words_; }
    const StringVocab& words() const { return words_; }
    StringVocab& pos_tags() { return pos_; }
    const StringVocab& pos_tags() const { return pos_; }
    StringVocab& chars() { return chars_; }
    const StringVocab& chars() const { return chars_; }
    std::vector<std::uint8_t>& rare_words() { return rare_; }
    const std::vector<std::uint8_t>& rare_words() const { return rare_; }

  private:
    NeuralConfig config_;
    StringVocab words_, pos_, chars_;
    std::vector<std::uint8_t> rare_;  // parallel to words_: train frequency <= 1
    int num_types_ = 0;
    NeuralParams params_, grads_;
};

/// A trained model: mention-length cap, type inventory, and one scorer.
struct Model {
    int max_len = 0;  // 0 = unrestricted (cap equals sentence length)
    TypeVocab types;
    std::variant<LinearScorer, NeuralScorer> scorer;

    bool is_linear() const { return std::holds_alternative<LinearScorer>(scorer); }
    LinearScorer& linear() { return std::get<LinearScorer>(scorer); }
    const LinearScorer& linear() const { return std::get<LinearScorer>(scorer); }
    NeuralScorer& neural() { return std::get<NeuralScorer>(scorer); }
    const NeuralScorer& neural() const { return std::get<NeuralScorer>(scorer); }

    /// Effective mention-length cap for a sentence of n tokens.
    int cap_for(int n) const {
        int c = max_len == 0 ? n : std::min(max_len, n);
        return std::max(1, c);
    }

    /// Eval-mode scores for one sentence (no backward hook).
    ScoredSentence score(const Sentence& sentence, const SegmentalHypergraph& g);

    /// Highest-scoring mention set for one sentence.
    MentionSet predict(const Sentence& sentence, GraphCache& cache);
};

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

/// Overwrites rows of word_emb with vectors read from a text file
/// (one "token v1 .. v_d" line per word); returns the number of
/// vocabulary words matched. Unmatched words keep their random init.
int load_pretrained_embeddings(const std::string& path, const StringVocab& words,
                               Eigen::MatrixXd& word_emb);

}  // namespace seghyp
