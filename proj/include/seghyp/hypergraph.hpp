#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "seghyp/types.hpp"

namespace seghyp {

using BigInt = boost::multiprecision::cpp_int;

/// A hyperpath of a specific graph, stored as sorted dense edge indices.
struct Hyperpath {
    std::vector<std::int32_t> edges;

    friend bool operator==(const Hyperpath&, const Hyperpath&) = default;
};

/// The complete segmental hypergraph for a sentence of length n with m
/// mention types and length cap c (c = n means unrestricted).
///
/// Nodes are stored in topological order: X has index 0, children always
/// precede their possible heads, and A(0) is last. Inside/outside passes
/// therefore iterate node indices ascending/descending with no extra
/// bookkeeping. Edges are grouped contiguously by head node, heads
/// ascending; within one head the storage order is the MAP tie-break
/// priority (TX before TI, IEnd before IContinue before IBoth).
class SegmentalHypergraph {
  public:
    struct Edge {
        HyperedgeId id;
        std::int32_t head = -1;
        std::int32_t tail_begin = 0;
        std::int32_t tail_count = 0;
    };

    /// Builds the complete graph. Rejects n < 1, m < 1, c < 1 or c > n.
    static SegmentalHypergraph build(int n, int m, int c);

    int sentence_len() const { return n_; }
    int num_types() const { return m_; }
    int max_mention_len() const { return c_; }

    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const NodeId& node(int v) const { return nodes_[static_cast<std::size_t>(v)]; }
    const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }

    std::span<const std::int32_t> tails(int e) const {
        const Edge& ed = edges_[static_cast<std::size_t>(e)];
        return {tails_.data() + ed.tail_begin, static_cast<std::size_t>(ed.tail_count)};
    }

    /// Outgoing edges of node v occupy [out_begin(v), out_end(v)).
    std::int32_t out_begin(int v) const { return out_start_[static_cast<std::size_t>(v)]; }
    std::int32_t out_end(int v) const { return out_start_[static_cast<std::size_t>(v) + 1]; }

    static constexpr int kSink = 0;              // X
    int root() const { return num_nodes() - 1; }  // A(0)

    int chain_len(int i) const { return chain_length(i, n_, c_); }
    /// Number of admissible spans: sum over i of chain_len(i).
    int span_count() const { return span_offset_[static_cast<std::size_t>(n_)]; }
    /// Dense index of span (i, j), start-major.
    int span_index(int i, int j) const { return span_offset_[static_cast<std::size_t>(i)] + (j - i); }

    int node_index(const NodeId& v) const;
    int edge_index(const HyperedgeId& e) const;

  private:
    SegmentalHypergraph() = default;

    int n_ = 0, m_ = 0, c_ = 0;
    std::vector<NodeId> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::int32_t> tails_;
    std::vector<std::int32_t> out_start_;    // size num_nodes + 1
    std::vector<std::int32_t> block_start_;  // node-index base per position i
    std::vector<std::int32_t> span_offset_;  // prefix sums of chain_len, size n + 1
};

/// Encodes a gold mention set as the unique hyperpath whose decode equals
/// canonicalize(gold). Throws MentionTooLongError / IndexOutOfRangeError.
Hyperpath encode(const MentionSet& gold, const SegmentalHypergraph& g);

/// Recovers the mention set of a hyperpath: one mention per IEnd/IBoth edge.
/// Throws MalformedHyperpathError when the edge set is not a valid hyperpath.
MentionSet decode(const Hyperpath& path, const SegmentalHypergraph& g);

/// Exact hyperpath count via the counting semiring over the node order.
BigInt count_hyperpaths(const SegmentalHypergraph& g);

/// Closed form for the hyperpath count: prod_i (2^min(c, n-i))^m.
BigInt hyperpath_count_closed_form(int n, int m, int c);

/// Per-edge membership table of encode(gold).
std::vector<std::uint8_t> gold_edge_indicator(const MentionSet& gold,
                                              const SegmentalHypergraph& g);

/// Cache of built graphs keyed by (n, m, c); topology does not depend on
/// sentence content. Concurrent readers, serialized insertion.
class GraphCache {
  public:
    std::shared_ptr<const SegmentalHypergraph> get(int n, int m, int c);

    static GraphCache& shared();

  private:
    std::mutex mutex_;
    std::vector<std::pair<std::uint64_t, std::shared_ptr<const SegmentalHypergraph>>> entries_;
};

}  // namespace seghyp
