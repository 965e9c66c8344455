#include "seghyp/types.hpp"

#include <algorithm>

namespace seghyp {

MentionSet canonicalize(MentionSet mentions) {
    std::sort(mentions.begin(), mentions.end());
    mentions.erase(std::unique(mentions.begin(), mentions.end()), mentions.end());
    return mentions;
}

bool is_canonical(const MentionSet& mentions) {
    for (std::size_t i = 1; i < mentions.size(); ++i) {
        if (!(mentions[i - 1] < mentions[i])) return false;
    }
    return true;
}

bool valid(const NodeId& v, int n, int m, int c) {
    switch (v.kind) {
        case NodeKind::X:
            return v.type == -1 && v.start == -1 && v.end == -1;
        case NodeKind::A:
        case NodeKind::E:
            return v.type == -1 && v.end == -1 && v.start >= 0 && v.start < n;
        case NodeKind::T:
            return v.end == -1 && v.type >= 0 && v.type < m && v.start >= 0 && v.start < n;
        case NodeKind::I:
            return v.type >= 0 && v.type < m && v.start >= 0 && v.start < n &&
                   v.end >= v.start && v.end <= std::min(v.start + c - 1, n - 1);
    }
    return false;
}

bool valid(const HyperedgeId& e, int n, int m, int c) {
    int cap = 0;
    switch (e.kind) {
        case EdgeKind::SpineA:
        case EdgeKind::SpineE:
            return e.type == -1 && e.end == -1 && e.start >= 0 && e.start < n;
        case EdgeKind::TX:
        case EdgeKind::TI:
            return e.end == -1 && e.type >= 0 && e.type < m && e.start >= 0 && e.start < n;
        case EdgeKind::IEnd:
            if (e.type < 0 || e.type >= m || e.start < 0 || e.start >= n) return false;
            cap = std::min(e.start + c - 1, n - 1);
            return e.end >= e.start && e.end <= cap;
        case EdgeKind::IContinue:
        case EdgeKind::IBoth:
            // Continuation needs room: j + 1 must stay within the chain cap.
            if (e.type < 0 || e.type >= m || e.start < 0 || e.start >= n) return false;
            cap = std::min(e.start + c - 1, n - 1);
            return e.end >= e.start && e.end + 1 <= cap;
    }
    return false;
}

std::string to_string(const NodeId& v) {
    switch (v.kind) {
        case NodeKind::X: return "X";
        case NodeKind::A: return "A(" + std::to_string(v.start) + ")";
        case NodeKind::E: return "E(" + std::to_string(v.start) + ")";
        case NodeKind::T:
            return "T(" + std::to_string(v.type) + "," + std::to_string(v.start) + ")";
        case NodeKind::I:
            return "I(" + std::to_string(v.type) + "," + std::to_string(v.start) + "," +
                   std::to_string(v.end) + ")";
    }
    return "?";
}

std::string to_string(const HyperedgeId& e) {
    auto ki = [&] { return std::to_string(e.type) + "," + std::to_string(e.start); };
    auto kij = [&] { return ki() + "," + std::to_string(e.end); };
    switch (e.kind) {
        case EdgeKind::SpineA: return "SpineA(" + std::to_string(e.start) + ")";
        case EdgeKind::SpineE: return "SpineE(" + std::to_string(e.start) + ")";
        case EdgeKind::TX: return "TX(" + ki() + ")";
        case EdgeKind::TI: return "TI(" + ki() + ")";
        case EdgeKind::IEnd: return "IEnd(" + kij() + ")";
        case EdgeKind::IContinue: return "IContinue(" + kij() + ")";
        case EdgeKind::IBoth: return "IBoth(" + kij() + ")";
    }
    return "?";
}

}  // namespace seghyp
