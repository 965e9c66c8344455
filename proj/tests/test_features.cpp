#include <algorithm>
#include <string>
#include <vector>

#include <doctest.h>

#include "seghyp/features.hpp"
#include "seghyp/types.hpp"

using namespace seghyp;

namespace {

bool contains(const std::vector<std::string>& features, const std::string& f) {
    return std::find(features.begin(), features.end(), f) != features.end();
}

}  // namespace

TEST_CASE("word shape collapses character-class runs") {
    CHECK(word_shape("Seattle") == "Aa+");
    CHECK(word_shape("ABC-123") == "A+-0+");
    CHECK(word_shape("zoo") == "a+");
    CHECK(word_shape("I") == "A");
    CHECK(word_shape("B2B") == "A0A");
    CHECK(word_shape("don't") == "a+-a");
    CHECK(word_shape("") == "");
    CHECK(word_shape("2026") == "0+");
}

TEST_CASE("lowercase maps ASCII letters only") {
    CHECK(lowercase("Seattle") == "seattle");
    CHECK(lowercase("ABC-123") == "abc-123");
    CHECK(lowercase("jr") == "jr");
}

TEST_CASE("mention-start features on a single-token sentence") {
    Sentence s{"t", {"Seattle"}, {}};
    auto tx = extract_features(HyperedgeId::tx(0, 0), s);
    CHECK(contains(tx, "TX:w0=seattle:type=0"));
    CHECK(contains(tx, "TX:shape=Aa+:type=0"));
    CHECK(contains(tx, "TX:W0=Seattle:type=0"));
    CHECK(contains(tx, "TX:wm1=(bos):type=0"));
    CHECK(contains(tx, "TX:wp1=(eos):type=0"));
    CHECK(contains(tx, "TX:pre1=s:type=0"));
    CHECK(contains(tx, "TX:pre3=sea:type=0"));
    CHECK(contains(tx, "TX:suf3=tle:type=0"));
    // No POS tags, so no POS templates.
    for (const std::string& f : tx) CHECK(f.find(":p0=") == std::string::npos);

    auto ti = extract_features(HyperedgeId::ti(1, 0), s);
    CHECK(contains(ti, "TI:w0=seattle:type=1"));
    // Same templates, different family prefix and type tag.
    CHECK(tx.size() == ti.size());
}

TEST_CASE("span features for a mention-ending edge") {
    Sentence s{"t", {"the", "zoo"}, {}};
    auto ix = extract_features(HyperedgeId::i_end(0, 0, 1), s);
    CHECK(contains(ix, "IX:len=2:type=0"));
    CHECK(contains(ix, "IX:first=the:type=0"));
    CHECK(contains(ix, "IX:last=zoo:type=0"));
    CHECK(contains(ix, "IX:left=(bos):type=0"));
    CHECK(contains(ix, "IX:right=(eos):type=0"));
    CHECK(contains(ix, "IX:bag=the:type=0"));
    CHECK(contains(ix, "IX:bag=zoo:type=0"));
    CHECK(contains(ix, "IX:span=the_zoo:type=0"));

    // End-and-continue edges use the same span templates under their own
    // family, so the two choices stay separable.
    auto ib = extract_features(HyperedgeId::i_both(0, 0, 0), s);
    CHECK(contains(ib, "IB:len=1:type=0"));
    CHECK(contains(ib, "IB:first=the:type=0"));
    CHECK(contains(ib, "IB:right=zoo:type=0"));
}

TEST_CASE("continuation features look at the next token") {
    Sentence s{"t", {"name", "jr", "x"}, {"NNP", "NNP", "NN"}};
    auto ii = extract_features(HyperedgeId::i_continue(2, 0, 0), s);
    CHECK(contains(ii, "II:next=jr:type=2"));
    CHECK(contains(ii, "II:len=1:type=2"));
    CHECK(contains(ii, "II:nextpos=NNP:type=2"));
    CHECK(ii.size() == 3);
}

TEST_CASE("POS templates appear only when tags are present") {
    Sentence tagged{"t", {"the", "Seattle", "zoo"}, {"DT", "NNP", "NN"}};
    auto tx = extract_features(HyperedgeId::tx(0, 1), tagged);
    CHECK(contains(tx, "TX:pm1=DT:type=0"));
    CHECK(contains(tx, "TX:p0=NNP:type=0"));
    CHECK(contains(tx, "TX:pp1=NN:type=0"));
    auto ix = extract_features(HyperedgeId::i_end(0, 0, 2), tagged);
    CHECK(contains(ix, "IX:posbag=DT:type=0"));
    CHECK(contains(ix, "IX:posbag=NNP:type=0"));
    CHECK(contains(ix, "IX:posbag=NN:type=0"));
    CHECK(contains(ix, "IX:span=the_seattle_zoo:type=0"));
}

TEST_CASE("span string template is dropped for long spans") {
    std::vector<std::string> tokens(8, "w");
    Sentence s{"t", tokens, {}};
    auto ix = extract_features(HyperedgeId::i_end(0, 0, 7), s);
    CHECK(contains(ix, "IX:len=7+:type=0"));
    for (const std::string& f : ix) CHECK(f.find(":span=") == std::string::npos);
}

TEST_CASE("spine edges carry no features") {
    Sentence s{"t", {"a", "b"}, {}};
    CHECK(extract_features(HyperedgeId::spine_a(0), s).empty());
    CHECK(extract_features(HyperedgeId::spine_e(1), s).empty());
}

TEST_CASE("extraction is deterministic") {
    Sentence s{"t", {"the", "Seattle", "zoo"}, {"DT", "NNP", "NN"}};
    auto first = extract_features(HyperedgeId::i_both(1, 0, 1), s);
    for (int r = 0; r < 100; ++r)
        CHECK(extract_features(HyperedgeId::i_both(1, 0, 1), s) == first);
}

TEST_CASE("short tokens only produce affixes up to their length") {
    Sentence s{"t", {"ab"}, {}};
    auto tx = extract_features(HyperedgeId::tx(0, 0), s);
    CHECK(contains(tx, "TX:pre1=a:type=0"));
    CHECK(contains(tx, "TX:pre2=ab:type=0"));
    CHECK(contains(tx, "TX:suf2=ab:type=0"));
    for (const std::string& f : tx) {
        CHECK(f.find(":pre3=") == std::string::npos);
        CHECK(f.find(":suf3=") == std::string::npos);
    }
}
