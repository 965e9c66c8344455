#include "seghyp/hypergraph.hpp"

#include <algorithm>
#include <map>

namespace seghyp {

SegmentalHypergraph SegmentalHypergraph::build(int n, int m, int c) {
    if (n < 1) throw Error("graph: sentence length must be >= 1, got " + std::to_string(n));
    if (m < 1) throw Error("graph: type count must be >= 1, got " + std::to_string(m));
    if (c < 1 || c > n) {
        throw Error("graph: mention-length cap must satisfy 1 <= c <= n, got c=" +
                    std::to_string(c) + " n=" + std::to_string(n));
    }

    SegmentalHypergraph g;
    g.n_ = n;
    g.m_ = m;
    g.c_ = c;

    g.span_offset_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 0; i < n; ++i) g.span_offset_[static_cast<std::size_t>(i) + 1] = g.span_offset_[static_cast<std::size_t>(i)] + g.chain_len(i);

    // Nodes in topological order: X, then per position i from n-1 down to 0
    // the I chains (j descending), the T nodes, E(i), A(i).
    g.block_start_.assign(static_cast<std::size_t>(n), 0);
    g.nodes_.push_back(NodeId::x());
    for (int i = n - 1; i >= 0; --i) {
        g.block_start_[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(g.nodes_.size());
        int hi = i + g.chain_len(i) - 1;
        for (int k = 0; k < m; ++k) {
            for (int j = hi; j >= i; --j) g.nodes_.push_back(NodeId::i_node(k, i, j));
        }
        for (int k = 0; k < m; ++k) g.nodes_.push_back(NodeId::t(k, i));
        g.nodes_.push_back(NodeId::e(i));
        g.nodes_.push_back(NodeId::a(i));
    }

    // Edges grouped by head, heads in ascending node index; per head, the
    // storage order is the MAP tie-break priority.
    g.out_start_.assign(g.nodes_.size() + 1, 0);
    auto add_edge = [&g](const HyperedgeId& id, const NodeId& head,
                         std::initializer_list<NodeId> tail) {
        Edge e;
        e.id = id;
        e.head = static_cast<std::int32_t>(g.node_index(head));
        e.tail_begin = static_cast<std::int32_t>(g.tails_.size());
        e.tail_count = static_cast<std::int32_t>(tail.size());
        for (const NodeId& t : tail) g.tails_.push_back(static_cast<std::int32_t>(g.node_index(t)));
        g.edges_.push_back(e);
    };

    for (int v = 1; v < static_cast<int>(g.nodes_.size()); ++v) {
        g.out_start_[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(g.edges_.size());
        const NodeId& node = g.nodes_[static_cast<std::size_t>(v)];
        switch (node.kind) {
            case NodeKind::I: {
                int k = node.type, i = node.start, j = node.end;
                int hi = i + g.chain_len(i) - 1;
                add_edge(HyperedgeId::i_end(k, i, j), node, {NodeId::x()});
                if (j + 1 <= hi) {
                    add_edge(HyperedgeId::i_continue(k, i, j), node, {NodeId::i_node(k, i, j + 1)});
                    add_edge(HyperedgeId::i_both(k, i, j), node,
                             {NodeId::x(), NodeId::i_node(k, i, j + 1)});
                }
                break;
            }
            case NodeKind::T: {
                int k = node.type, i = node.start;
                add_edge(HyperedgeId::tx(k, i), node, {NodeId::x()});
                add_edge(HyperedgeId::ti(k, i), node, {NodeId::i_node(k, i, i)});
                break;
            }
            case NodeKind::E: {
                int i = node.start;
                Edge e;
                e.id = HyperedgeId::spine_e(i);
                e.head = static_cast<std::int32_t>(v);
                e.tail_begin = static_cast<std::int32_t>(g.tails_.size());
                e.tail_count = static_cast<std::int32_t>(m);
                for (int k = 0; k < m; ++k) {
                    g.tails_.push_back(static_cast<std::int32_t>(g.node_index(NodeId::t(k, i))));
                }
                g.edges_.push_back(e);
                break;
            }
            case NodeKind::A: {
                int i = node.start;
                if (i < n - 1) {
                    add_edge(HyperedgeId::spine_a(i), node, {NodeId::a(i + 1), NodeId::e(i)});
                } else {
                    add_edge(HyperedgeId::spine_a(i), node, {NodeId::e(i)});
                }
                break;
            }
            case NodeKind::X:
                break;
        }
    }
    g.out_start_.back() = static_cast<std::int32_t>(g.edges_.size());
    // X has no outgoing edges.
    g.out_start_[0] = 0;
    return g;
}

int SegmentalHypergraph::node_index(const NodeId& v) const {
    if (!valid(v, n_, m_, c_)) throw IndexOutOfRangeError("graph: invalid node " + to_string(v));
    switch (v.kind) {
        case NodeKind::X:
            return 0;
        case NodeKind::I: {
            int li = chain_len(v.start);
            int hi = v.start + li - 1;
            return block_start_[static_cast<std::size_t>(v.start)] + v.type * li + (hi - v.end);
        }
        case NodeKind::T:
            return block_start_[static_cast<std::size_t>(v.start)] + m_ * chain_len(v.start) + v.type;
        case NodeKind::E:
            return block_start_[static_cast<std::size_t>(v.start)] + m_ * chain_len(v.start) + m_;
        case NodeKind::A:
            return block_start_[static_cast<std::size_t>(v.start)] + m_ * chain_len(v.start) + m_ + 1;
    }
    throw IndexOutOfRangeError("graph: invalid node kind");
}

int SegmentalHypergraph::edge_index(const HyperedgeId& e) const {
    if (!valid(e, n_, m_, c_)) throw IndexOutOfRangeError("graph: invalid edge " + to_string(e));
    NodeId head;
    int offset = 0;
    switch (e.kind) {
        case EdgeKind::SpineA: head = NodeId::a(e.start); break;
        case EdgeKind::SpineE: head = NodeId::e(e.start); break;
        case EdgeKind::TX: head = NodeId::t(e.type, e.start); break;
        case EdgeKind::TI: head = NodeId::t(e.type, e.start); offset = 1; break;
        case EdgeKind::IEnd: head = NodeId::i_node(e.type, e.start, e.end); break;
        case EdgeKind::IContinue: head = NodeId::i_node(e.type, e.start, e.end); offset = 1; break;
        case EdgeKind::IBoth: head = NodeId::i_node(e.type, e.start, e.end); offset = 2; break;
    }
    return out_begin(node_index(head)) + offset;
}

Hyperpath encode(const MentionSet& gold, const SegmentalHypergraph& g) {
    const int n = g.sentence_len();
    const int m = g.num_types();
    const int c = g.max_mention_len();

    for (const Mention& men : gold) {
        if (men.start < 0 || men.end < men.start || men.end >= n || men.type < 0 ||
            men.type >= m) {
            throw IndexOutOfRangeError("encode: mention (" + std::to_string(men.start) + "," +
                                       std::to_string(men.end) + "," + std::to_string(men.type) +
                                       ") out of range for n=" + std::to_string(n) +
                                       " m=" + std::to_string(m));
        }
        if (mention_length(men) > c) {
            throw MentionTooLongError("encode: mention (" + std::to_string(men.start) + "," +
                                      std::to_string(men.end) + "," + std::to_string(men.type) +
                                      ") exceeds length cap c=" + std::to_string(c));
        }
    }

    // End positions per (type, start) chain.
    std::map<std::pair<int, int>, std::vector<int>> ends;
    for (const Mention& men : gold) ends[{men.type, men.start}].push_back(men.end);

    Hyperpath path;
    for (int i = 0; i < n; ++i) {
        path.edges.push_back(g.edge_index(HyperedgeId::spine_a(i)));
        path.edges.push_back(g.edge_index(HyperedgeId::spine_e(i)));
    }
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < m; ++k) {
            auto it = ends.find({k, i});
            if (it == ends.end()) {
                path.edges.push_back(g.edge_index(HyperedgeId::tx(k, i)));
                continue;
            }
            std::vector<int>& e = it->second;
            std::sort(e.begin(), e.end());
            e.erase(std::unique(e.begin(), e.end()), e.end());
            path.edges.push_back(g.edge_index(HyperedgeId::ti(k, i)));
            int last = e.back();
            std::size_t next_end = 0;
            for (int j = i; j < last; ++j) {
                if (e[next_end] == j) {
                    ++next_end;
                    path.edges.push_back(g.edge_index(HyperedgeId::i_both(k, i, j)));
                } else {
                    path.edges.push_back(g.edge_index(HyperedgeId::i_continue(k, i, j)));
                }
            }
            path.edges.push_back(g.edge_index(HyperedgeId::i_end(k, i, last)));
        }
    }
    std::sort(path.edges.begin(), path.edges.end());
    return path;
}

MentionSet decode(const Hyperpath& path, const SegmentalHypergraph& g) {
    // One outgoing edge per included node; every tail of an included edge is
    // itself included (X excepted). Walk from the root and check coverage.
    std::vector<std::int32_t> chosen(static_cast<std::size_t>(g.num_nodes()), -1);
    for (std::int32_t e : path.edges) {
        if (e < 0 || e >= g.num_edges()) {
            throw MalformedHyperpathError("decode: edge index " + std::to_string(e) +
                                          " out of range");
        }
        std::int32_t head = g.edge(e).head;
        if (chosen[static_cast<std::size_t>(head)] != -1) {
            throw MalformedHyperpathError("decode: node " + to_string(g.node(head)) +
                                          " has more than one outgoing edge");
        }
        chosen[static_cast<std::size_t>(head)] = e;
    }

    MentionSet result;
    std::vector<std::int32_t> stack = {static_cast<std::int32_t>(g.root())};
    std::size_t used = 0;
    while (!stack.empty()) {
        std::int32_t v = stack.back();
        stack.pop_back();
        std::int32_t e = chosen[static_cast<std::size_t>(v)];
        if (e == -1) {
            throw MalformedHyperpathError("decode: node " + to_string(g.node(v)) +
                                          " reached but has no outgoing edge in the path");
        }
        ++used;
        const HyperedgeId& id = g.edge(e).id;
        if (id.kind == EdgeKind::IEnd || id.kind == EdgeKind::IBoth) {
            result.push_back({id.start, id.end, id.type});
        }
        for (std::int32_t t : g.tails(e)) {
            if (t != SegmentalHypergraph::kSink) stack.push_back(t);
        }
    }
    if (used != path.edges.size()) {
        throw MalformedHyperpathError("decode: path contains edges unreachable from the root");
    }
    return canonicalize(std::move(result));
}

BigInt count_hyperpaths(const SegmentalHypergraph& g) {
    std::vector<BigInt> count(static_cast<std::size_t>(g.num_nodes()));
    count[SegmentalHypergraph::kSink] = 1;
    for (int v = 1; v < g.num_nodes(); ++v) {
        BigInt total = 0;
        for (std::int32_t e = g.out_begin(v); e < g.out_end(v); ++e) {
            BigInt prod = 1;
            for (std::int32_t t : g.tails(e)) prod *= count[static_cast<std::size_t>(t)];
            total += prod;
        }
        count[static_cast<std::size_t>(v)] = total;
    }
    return count[static_cast<std::size_t>(g.root())];
}

BigInt hyperpath_count_closed_form(int n, int m, int c) {
    BigInt total = 1;
    for (int i = 0; i < n; ++i) {
        total <<= static_cast<unsigned>(m * chain_length(i, n, c));
    }
    return total;
}

std::vector<std::uint8_t> gold_edge_indicator(const MentionSet& gold,
                                              const SegmentalHypergraph& g) {
    Hyperpath path = encode(gold, g);
    std::vector<std::uint8_t> table(static_cast<std::size_t>(g.num_edges()), 0);
    for (std::int32_t e : path.edges) table[static_cast<std::size_t>(e)] = 1;
    return table;
}

std::shared_ptr<const SegmentalHypergraph> GraphCache::get(int n, int m, int c) {
    std::uint64_t key = (static_cast<std::uint64_t>(n) << 42) |
                        (static_cast<std::uint64_t>(m) << 21) | static_cast<std::uint64_t>(c);
    std::lock_guard<std::mutex> lock(mutex_);
    for (const auto& [k, graph] : entries_) {
        if (k == key) return graph;
    }
    auto graph = std::make_shared<const SegmentalHypergraph>(SegmentalHypergraph::build(n, m, c));
    entries_.emplace_back(key, graph);
    return graph;
}

GraphCache& GraphCache::shared() {
    static GraphCache cache;
    return cache;
}

}  // namespace seghyp
