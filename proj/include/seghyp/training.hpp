#pragma once

// Cost-augmented log-linear training: per-sentence loss with exact gradients
// from inside-outside marginals, adaptive-moment updates with global-norm
// clipping and L2, and the epoch loop with dev-based early stopping.

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "seghyp/corpus.hpp"
#include "seghyp/hypergraph.hpp"
#include "seghyp/inference.hpp"
#include "seghyp/scorer.hpp"
#include "seghyp/types.hpp"

namespace seghyp {

struct TrainConfig {
    std::string scorer = "linear";  // "linear" | "neural"
    double beta = 1.5;              // false-negative cost; must be >= 1
    double learning_rate = 1e-3;
    double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    double clip_norm = 3.0;
    double l2 = 1e-6;
    int epochs = 30;
    int patience = 5;  // consecutive epochs without a new best dev F1
    std::uint64_t seed = 1;
    double dropout = 0.5;
    int max_len = 6;  // mention-length cap; 0 = unrestricted
    NeuralConfig neural;              // dimensions for the neural scorer
    std::string embeddings;          // optional pretrained word-vector file
};

struct EpochLog {
    int epoch = 0;
    double loss = 0.0;  // mean per-sentence training loss
    double dev_p = 0.0, dev_r = 0.0, dev_f1 = 0.0;
};

/// JSON lines, one object per epoch with keys epoch/loss/dev_p/dev_r/dev_f1.
void write_training_log(const std::vector<EpochLog>& log, const std::string& path);

/// Per-edge cost table: beta on every non-gold mention-starting edge (TX not
/// in the gold path), 1 on every missed-mention edge (TI not in the gold
/// path), 0 elsewhere.
std::vector<double> build_cost(const MentionSet& gold, const SegmentalHypergraph& g,
                               double beta);

/// One sentence prepared for repeated loss evaluations.
struct PreparedExample {
    std::shared_ptr<const SegmentalHypergraph> graph;
    Hyperpath gold_path;
    std::vector<double> cost;
};

PreparedExample prepare_example(const MentionSet& gold, int n, int num_types, int cap,
                                GraphCache& cache, double beta);

/// Cost-augmented loss for already-computed scores:
///   loss = logZ(phi + cost) - sum of phi over the gold path;
///   d(loss)/d(phi(e)) = augmented marginal(e) - [e in gold path].
/// Installs ex.cost on the table; fills dphi when non-null.
double structured_loss(EdgeScoreTable& scores, const PreparedExample& ex,
                       std::vector<double>* dphi);

/// Loss (and, when with_grad, pending sparse gradients) for the linear
/// scorer, including the L2 term over this sentence's active features.
double linear_sentence_loss(LinearScorer& scorer, const EdgeFeatureLists& features,
                            const PreparedExample& ex, double l2, bool with_grad);

/// Loss for the neural scorer, including the L2 term over all tensors.
/// When with_grad, gradients accumulate into scorer.grads() (caller zeroes).
double neural_sentence_loss(NeuralScorer& scorer, const Sentence& sentence,
                            const PreparedExample& ex, double l2, bool training_mode,
                            std::uint64_t mask_seed, bool with_grad);

/// Adaptive-moment optimizer over dense tensors with bias correction and
/// global-norm clipping. Tensor layout must match between registration,
/// parameters, and gradients.
class DenseAdam {
  public:
    DenseAdam(double lr, double beta1, double beta2, double eps, double clip_norm)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), clip_(clip_norm) {}

    void step(const std::vector<TensorRef>& params, const std::vector<TensorRef>& grads,
              const std::string& sentence_id);

    long long steps_taken() const { return t_; }

  private:
    double lr_, beta1_, beta2_, eps_, clip_;
    long long t_ = 0;
    std::vector<double> m_, v_;
};

/// Lazy adaptive-moment optimizer over sparse feature weights: moments decay
/// only for features touched by the step; bias correction uses the global
/// step count.
class SparseAdam {
  public:
    SparseAdam(double lr, double beta1, double beta2, double eps, double clip_norm)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), clip_(clip_norm) {}

    void step(std::vector<double>& weights,
              const std::vector<std::pair<std::uint32_t, double>>& grad,
              const std::string& sentence_id);

    long long steps_taken() const { return t_; }

  private:
    double lr_, beta1_, beta2_, eps_, clip_;
    long long t_ = 0;
    std::vector<double> m_, v_;  // grown on demand, indexed by feature id
};

struct TrainResult {
    Model model;  // best-dev snapshot
    std::vector<EpochLog> log;
    int best_epoch = 0;
};

/// Full training run. Fails fast with GoldViolatesCapError (listing the
/// offending mentions) if any training mention exceeds the length cap.
/// Single-threaded and fully deterministic for a fixed config.
TrainResult train(const Corpus& train_corpus, const Corpus& dev_corpus,
                  const TypeVocab& types, const TrainConfig& config);

}  // namespace seghyp
