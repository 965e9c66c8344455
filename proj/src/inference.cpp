#include "seghyp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace seghyp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

void EdgeScoreTable::check_finite() const {
    for (std::size_t e = 0; e < phi_.size(); ++e) {
        if (!std::isfinite(phi_[e])) {
            throw NonFiniteScoreError("inference: non-finite score on edge " +
                                      to_string(graph_->edge(static_cast<std::int32_t>(e)).id));
        }
    }
    for (std::size_t e = 0; e < delta_.size(); ++e) {
        if (!std::isfinite(delta_[e])) {
            throw NonFiniteScoreError("inference: non-finite cost on edge " +
                                      to_string(graph_->edge(static_cast<std::int32_t>(e)).id));
        }
    }
}

std::vector<double> inside(const SegmentalHypergraph& g, const EdgeScoreTable& scores,
                           bool use_cost) {
    scores.check_finite();
    std::vector<double> mu(static_cast<std::size_t>(g.num_nodes()), kNegInf);
    mu[SegmentalHypergraph::kSink] = 0.0;
    for (std::int32_t v = 1; v < g.num_nodes(); ++v) {
        double acc = kNegInf;
        for (std::int32_t e = g.out_begin(v); e < g.out_end(v); ++e) {
            double s = scores.psi(e, use_cost);
            for (std::int32_t t : g.tails(e)) s += mu[static_cast<std::size_t>(t)];
            acc = log_add(acc, s);
        }
        mu[static_cast<std::size_t>(v)] = acc;
    }
    return mu;
}

std::vector<double> outside(const SegmentalHypergraph& g, const EdgeScoreTable& scores,
                            const std::vector<double>& inside_table, bool use_cost) {
    std::vector<double> alpha(static_cast<std::size_t>(g.num_nodes()), kNegInf);
    alpha[static_cast<std::size_t>(g.root())] = 0.0;
    for (std::int32_t v = g.root(); v >= 1; --v) {
        double head_out = alpha[static_cast<std::size_t>(v)];
        if (head_out == kNegInf) continue;
        for (std::int32_t e = g.out_begin(v); e < g.out_end(v); ++e) {
            double tail_sum = 0.0;
            for (std::int32_t t : g.tails(e)) tail_sum += inside_table[static_cast<std::size_t>(t)];
            double base = head_out + scores.psi(e, use_cost);
            for (std::int32_t t : g.tails(e)) {
                double siblings = tail_sum - inside_table[static_cast<std::size_t>(t)];
                alpha[static_cast<std::size_t>(t)] =
                    log_add(alpha[static_cast<std::size_t>(t)], base + siblings);
            }
        }
    }
    return alpha;
}

InferenceResult marginals(const SegmentalHypergraph& g, const EdgeScoreTable& scores,
                          bool use_cost) {
    InferenceResult result;
    result.inside = inside(g, scores, use_cost);
    result.log_z = log_z_of(g, result.inside);
    if (!std::isfinite(result.log_z)) {
        throw NonFiniteScoreError("inference: log-partition value is not finite");
    }
    result.outside = outside(g, scores, result.inside, use_cost);
    result.edge_marginals.assign(static_cast<std::size_t>(g.num_edges()), 0.0);
    for (std::int32_t e = 0; e < g.num_edges(); ++e) {
        const auto& edge = g.edge(e);
        double value =
            result.outside[static_cast<std::size_t>(edge.head)] + scores.psi(e, use_cost);
        for (std::int32_t t : g.tails(e)) value += result.inside[static_cast<std::size_t>(t)];
        result.edge_marginals[static_cast<std::size_t>(e)] = std::exp(value - result.log_z);
    }
    return result;
}

std::pair<Hyperpath, double> map_decode(const SegmentalHypergraph& g,
                                        const EdgeScoreTable& scores) {
    scores.check_finite();
    std::vector<double> best(static_cast<std::size_t>(g.num_nodes()), kNegInf);
    std::vector<std::int32_t> back(static_cast<std::size_t>(g.num_nodes()), -1);
    best[SegmentalHypergraph::kSink] = 0.0;
    for (std::int32_t v = 1; v < g.num_nodes(); ++v) {
        // Strict improvement keeps the first maximum; edges are stored in
        // tie-break priority order within each head.
        for (std::int32_t e = g.out_begin(v); e < g.out_end(v); ++e) {
            double s = scores.phi(e);
            for (std::int32_t t : g.tails(e)) s += best[static_cast<std::size_t>(t)];
            if (s > best[static_cast<std::size_t>(v)]) {
                best[static_cast<std::size_t>(v)] = s;
                back[static_cast<std::size_t>(v)] = e;
            }
        }
    }

    Hyperpath path;
    std::vector<std::int32_t> stack = {static_cast<std::int32_t>(g.root())};
    while (!stack.empty()) {
        std::int32_t v = stack.back();
        stack.pop_back();
        std::int32_t e = back[static_cast<std::size_t>(v)];
        path.edges.push_back(e);
        for (std::int32_t t : g.tails(e)) {
            if (t != SegmentalHypergraph::kSink) stack.push_back(t);
        }
    }
    std::sort(path.edges.begin(), path.edges.end());
    return {std::move(path), best[static_cast<std::size_t>(g.root())]};
}

}  // namespace seghyp
