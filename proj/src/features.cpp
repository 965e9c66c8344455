#include "seghyp/features.hpp"

#include <cctype>

namespace seghyp {

namespace {

const std::string kBos = "(bos)";
const std::string kEos = "(eos)";

std::string token_at(const Sentence& s, int i) {
    if (i < 0) return kBos;
    if (i >= s.length()) return kEos;
    return lowercase(s.tokens[static_cast<std::size_t>(i)]);
}

std::string pos_at(const Sentence& s, int i) {
    if (i < 0) return kBos;
    if (i >= s.length()) return kEos;
    return s.pos[static_cast<std::size_t>(i)];
}

std::string length_bucket(int len) { return len <= 6 ? std::to_string(len) : "7+"; }

// Anchor templates shared by the TX/TI edges at start position i.
void anchor_features(const std::string& family, const Sentence& s, int i,
                     std::vector<std::string>& out) {
    const std::string& raw = s.tokens[static_cast<std::size_t>(i)];
    std::string lower = lowercase(raw);
    out.push_back(family + ":w0=" + lower);
    out.push_back(family + ":W0=" + raw);
    out.push_back(family + ":wm1=" + token_at(s, i - 1));
    out.push_back(family + ":wp1=" + token_at(s, i + 1));
    out.push_back(family + ":shape=" + word_shape(raw));
    for (int k = 1; k <= 3 && k <= static_cast<int>(lower.size()); ++k) {
        out.push_back(family + ":pre" + std::to_string(k) + "=" + lower.substr(0, static_cast<std::size_t>(k)));
        out.push_back(family + ":suf" + std::to_string(k) + "=" +
                      lower.substr(lower.size() - static_cast<std::size_t>(k)));
    }
    if (s.has_pos()) {
        out.push_back(family + ":pm1=" + pos_at(s, i - 1));
        out.push_back(family + ":p0=" + pos_at(s, i));
        out.push_back(family + ":pp1=" + pos_at(s, i + 1));
    }
}

// Span templates shared by the mention-ending edges (IX for end-only, IB for
// end-and-continue) over the span i..j.
void span_features(const std::string& family, const Sentence& s, int i, int j,
                   std::vector<std::string>& out) {
    int len = j - i + 1;
    out.push_back(family + ":len=" + length_bucket(len));
    out.push_back(family + ":first=" + token_at(s, i));
    out.push_back(family + ":last=" + token_at(s, j));
    out.push_back(family + ":left=" + token_at(s, i - 1));
    out.push_back(family + ":right=" + token_at(s, j + 1));
    for (int t = i; t <= j; ++t) out.push_back(family + ":bag=" + token_at(s, t));
    if (s.has_pos()) {
        for (int t = i; t <= j; ++t) out.push_back(family + ":posbag=" + pos_at(s, t));
    }
    if (len <= 6) {
        std::string span;
        for (int t = i; t <= j; ++t) {
            if (t > i) span += '_';
            span += token_at(s, t);
        }
        out.push_back(family + ":span=" + span);
    }
}

}  // namespace

std::string lowercase(const std::string& word) {
    std::string out = word;
    for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

std::string word_shape(const std::string& word) {
    std::string shape;
    char run = '\0';
    int run_len = 0;
    auto flush = [&] {
        if (run_len == 0) return;
        shape += run;
        if (run_len > 1) shape += '+';
    };
    for (char ch : word) {
        unsigned char u = static_cast<unsigned char>(ch);
        char cls = std::isupper(u) ? 'A' : std::islower(u) ? 'a' : std::isdigit(u) ? '0' : '-';
        if (cls == run) {
            ++run_len;
        } else {
            flush();
            run = cls;
            run_len = 1;
        }
    }
    flush();
    return shape;
}

std::vector<std::string> extract_features(const HyperedgeId& edge, const Sentence& sentence) {
    std::vector<std::string> out;
    switch (edge.kind) {
        case EdgeKind::SpineA:
        case EdgeKind::SpineE:
            return out;
        case EdgeKind::TX:
            anchor_features("TX", sentence, edge.start, out);
            break;
        case EdgeKind::TI:
            anchor_features("TI", sentence, edge.start, out);
            break;
        case EdgeKind::IEnd:
            span_features("IX", sentence, edge.start, edge.end, out);
            break;
        case EdgeKind::IBoth:
            span_features("IB", sentence, edge.start, edge.end, out);
            break;
        case EdgeKind::IContinue:
            out.push_back("II:next=" + token_at(sentence, edge.end + 1));
            out.push_back("II:len=" + length_bucket(edge.end - edge.start + 1));
            if (sentence.has_pos()) {
                out.push_back("II:nextpos=" + pos_at(sentence, edge.end + 1));
            }
            break;
    }
    std::string type_tag = ":type=" + std::to_string(edge.type);
    for (std::string& feature : out) feature += type_tag;
    return out;
}

}  // namespace seghyp
