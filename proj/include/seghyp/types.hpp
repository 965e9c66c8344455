#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace seghyp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MentionTooLongError : Error {
    using Error::Error;
};
struct IndexOutOfRangeError : Error {
    using Error::Error;
};
struct MalformedHyperpathError : Error {
    using Error::Error;
};
struct NonFiniteScoreError : Error {
    using Error::Error;
};
struct NonFiniteGradientError : Error {
    using Error::Error;
};
struct GoldViolatesCapError : Error {
    using Error::Error;
};
struct TooManyPathsError : Error {
    using Error::Error;
};
struct DataError : Error {
    using Error::Error;
};

/// A tokenized input sentence. POS tags are optional; when present there is
/// exactly one tag per token.
struct Sentence {
    std::string id;
    std::vector<std::string> tokens;
    std::vector<std::string> pos;  // empty, or same length as tokens

    int length() const { return static_cast<int>(tokens.size()); }
    bool has_pos() const { return !pos.empty(); }
};

/// A typed contiguous token span, 0-based with inclusive end.
struct Mention {
    std::int32_t start = 0;
    std::int32_t end = 0;
    std::int32_t type = 0;

    friend bool operator==(const Mention&, const Mention&) = default;
    friend auto operator<=>(const Mention& a, const Mention& b) {
        if (auto c = a.start <=> b.start; c != 0) return c;
        if (auto c = a.end <=> b.end; c != 0) return c;
        return a.type <=> b.type;
    }
};

inline int mention_length(const Mention& m) { return m.end - m.start + 1; }

/// Canonical form: sorted ascending by (start, end, type), no duplicates.
using MentionSet = std::vector<Mention>;

MentionSet canonicalize(MentionSet mentions);
bool is_canonical(const MentionSet& mentions);

/// Bidirectional map between mention-type strings and dense indices 0..m-1.
class TypeVocab {
  public:
    int intern(const std::string& name) {
        auto it = index_.find(name);
        if (it != index_.end()) return it->second;
        int id = static_cast<int>(names_.size());
        names_.push_back(name);
        index_.emplace(name, id);
        return id;
    }

    /// -1 when unknown.
    int find(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? -1 : it->second;
    }

    const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
    int size() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }

  private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
};

enum class NodeKind : std::uint8_t { X, A, E, T, I };

/// Symbolic node identifier. A(i) covers mentions starting at or after i,
/// E(i) mentions starting exactly at i, T(k,i) type-k mentions starting at i,
/// I(k,i,j) type-k mentions starting at i whose span reaches token j, and X
/// marks the end of a mention.
struct NodeId {
    NodeKind kind = NodeKind::X;
    std::int32_t type = -1;   // k, for T/I
    std::int32_t start = -1;  // i, for A/E/T/I
    std::int32_t end = -1;    // j, for I

    static NodeId x() { return {}; }
    static NodeId a(int i) { return {NodeKind::A, -1, i, -1}; }
    static NodeId e(int i) { return {NodeKind::E, -1, i, -1}; }
    static NodeId t(int k, int i) { return {NodeKind::T, k, i, -1}; }
    static NodeId i_node(int k, int i, int j) { return {NodeKind::I, k, i, j}; }

    friend bool operator==(const NodeId&, const NodeId&) = default;
};

enum class EdgeKind : std::uint8_t {
    SpineA,     // A(i) -> (A(i+1), E(i));  A(n-1) -> (E(n-1))
    SpineE,     // E(i) -> (T(0,i), ..., T(m-1,i))
    TX,         // T(k,i) -> X
    TI,         // T(k,i) -> I(k,i,i)
    IEnd,       // I(k,i,j) -> X
    IContinue,  // I(k,i,j) -> I(k,i,j+1)
    IBoth,      // I(k,i,j) -> (X, I(k,i,j+1))
};

/// Symbolic hyperedge identifier: one head plus an ordered tail. The enum
/// order within each head's family doubles as the deterministic tie-break
/// priority used by MAP decoding (TX before TI, IEnd before IContinue before
/// IBoth).
struct HyperedgeId {
    EdgeKind kind = EdgeKind::SpineA;
    std::int32_t type = -1;   // k
    std::int32_t start = -1;  // i
    std::int32_t end = -1;    // j, for I-edges

    static HyperedgeId spine_a(int i) { return {EdgeKind::SpineA, -1, i, -1}; }
    static HyperedgeId spine_e(int i) { return {EdgeKind::SpineE, -1, i, -1}; }
    static HyperedgeId tx(int k, int i) { return {EdgeKind::TX, k, i, -1}; }
    static HyperedgeId ti(int k, int i) { return {EdgeKind::TI, k, i, -1}; }
    static HyperedgeId i_end(int k, int i, int j) { return {EdgeKind::IEnd, k, i, j}; }
    static HyperedgeId i_continue(int k, int i, int j) { return {EdgeKind::IContinue, k, i, j}; }
    static HyperedgeId i_both(int k, int i, int j) { return {EdgeKind::IBoth, k, i, j}; }

    friend bool operator==(const HyperedgeId&, const HyperedgeId&) = default;
};

/// Chain length for start position i: the number of admissible right
/// boundaries j with i <= j <= min(i + c - 1, n - 1).
inline int chain_length(int i, int n, int c) {
    int hi = std::min(i + c - 1, n - 1);
    return hi - i + 1;
}

/// Validity of a node identifier relative to graph shape (n, m, c).
bool valid(const NodeId& v, int n, int m, int c);

/// Validity of a hyperedge identifier relative to graph shape (n, m, c).
bool valid(const HyperedgeId& e, int n, int m, int c);

std::string to_string(const NodeId& v);
std::string to_string(const HyperedgeId& e);

}  // namespace seghyp
