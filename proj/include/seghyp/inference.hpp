#pragma once

// Exact inference on a weighted segmental hypergraph: inside (log-partition),
// outside, edge marginals, and MAP decoding. All sum computations run in the
// log domain with overflow-safe log-sum-exp.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "seghyp/hypergraph.hpp"
#include "seghyp/types.hpp"

namespace seghyp {

/// log(exp(a) + exp(b)) without overflow; tolerates -inf operands.
inline double log_add(double a, double b) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Per-edge scores. phi is the model score; delta is an optional non-negative
// cost used for cost-augmented training. psi = phi + delta when delta is
// present. Spine edges carry phi == 0 by scorer convention.
class EdgeScoreTable {
  public:
    explicit EdgeScoreTable(const SegmentalHypergraph& g)
        : graph_(&g), phi_(static_cast<std::size_t>(g.num_edges()), 0.0) {}

    const SegmentalHypergraph& graph() const { return *graph_; }

    double phi(std::int32_t e) const { return phi_[static_cast<std::size_t>(e)]; }
    void set_phi(std::int32_t e, double value) { phi_[static_cast<std::size_t>(e)] = value; }
    std::vector<double>& phi_values() { return phi_; }
    const std::vector<double>& phi_values() const { return phi_; }

    bool has_delta() const { return !delta_.empty(); }
    double delta(std::int32_t e) const {
        return delta_.empty() ? 0.0 : delta_[static_cast<std::size_t>(e)];
    }
    void set_delta(std::vector<double> delta) { delta_ = std::move(delta); }
    const std::vector<double>& delta_values() const { return delta_; }

    // Score used by the sum computations: phi alone, or phi + delta.
    double psi(std::int32_t e, bool use_cost) const {
        return use_cost ? phi_[static_cast<std::size_t>(e)] + delta(e)
                        : phi_[static_cast<std::size_t>(e)];
    }

    // Throws NonFiniteScoreError if any phi (or delta) entry is not finite.
    void check_finite() const;

  private:
    const SegmentalHypergraph* graph_;
    std::vector<double> phi_;
    std::vector<double> delta_;
};

// Output of the full sum-product pass.
struct InferenceResult {
    std::vector<double> inside;         // log domain, per node
    std::vector<double> outside;        // log domain, per node
    double log_z = 0.0;                 // inside value at the root A(0)
    std::vector<double> edge_marginals; // in [0, 1], per edge
};

// Inside pass. Returns the per-node table in log domain; table[root] is the
// log-partition value. use_cost selects psi = phi + delta over plain phi.
std::vector<double> inside(const SegmentalHypergraph& g, const EdgeScoreTable& scores,
                           bool use_cost);

inline double log_z_of(const SegmentalHypergraph& g, const std::vector<double>& inside_table) {
    return inside_table[static_cast<std::size_t>(g.root())];
}

// Outside pass; inside_table must come from the same scores/use_cost setting.
std::vector<double> outside(const SegmentalHypergraph& g, const EdgeScoreTable& scores,
                            const std::vector<double>& inside_table, bool use_cost);

// Inside + outside + per-edge marginals in one call.
InferenceResult marginals(const SegmentalHypergraph& g, const EdgeScoreTable& scores,
                          bool use_cost);

// Max-sum decoding with back-pointers over phi alone (any cost table is
// ignored). Ties are broken toward the lowest edge index, which by edge layout
// means TX before TI and IEnd before IContinue before IBoth.
std::pair<Hyperpath, double> map_decode(const SegmentalHypergraph& g,
                                        const EdgeScoreTable& scores);

}  // namespace seghyp
