#include <doctest.h>

#include "seghyp/types.hpp"

using namespace seghyp;

TEST_CASE("mention length is inclusive-end span size") {
    CHECK(mention_length({0, 0, 0}) == 1);
    CHECK(mention_length({1, 3, 0}) == 3);
    CHECK(mention_length({0, 3, 0}) == 4);
}

TEST_CASE("canonicalize sorts by (start, end, type) and deduplicates") {
    CHECK(canonicalize({}) == MentionSet{});
    CHECK(canonicalize({{1, 2, 0}, {1, 2, 0}}) == MentionSet{{1, 2, 0}});

    MentionSet via = canonicalize({{0, 3, 1}, {0, 2, 1}, {1, 1, 0}});
    CHECK(via == MentionSet{{0, 2, 1}, {0, 3, 1}, {1, 1, 0}});

    CHECK(canonicalize(MentionSet(via)) == via);  // idempotent
    CHECK(is_canonical(via));
    CHECK_FALSE(is_canonical({{1, 1, 0}, {0, 2, 1}}));
}

TEST_CASE("type vocabulary interns densely and round-trips") {
    TypeVocab vocab;
    CHECK(vocab.intern("PER") == 0);
    CHECK(vocab.intern("ORG") == 1);
    CHECK(vocab.intern("PER") == 0);
    CHECK(vocab.size() == 2);
    CHECK(vocab.find("ORG") == 1);
    CHECK(vocab.find("GPE") == -1);
    CHECK(vocab.name(1) == "ORG");
}

TEST_CASE("chain length caps the admissible right boundary") {
    CHECK(chain_length(0, 1, 1) == 1);
    CHECK(chain_length(0, 5, 3) == 3);
    CHECK(chain_length(3, 5, 3) == 2);  // runs out of sentence
    CHECK(chain_length(4, 5, 3) == 1);
}

TEST_CASE("node validity matches the index bounds exhaustively") {
    for (int n = 1; n <= 6; ++n) {
        for (int m = 1; m <= 3; ++m) {
            for (int c = 1; c <= n; ++c) {
                CHECK(valid(NodeId::x(), n, m, c));
                for (int i = -1; i <= n; ++i) {
                    CHECK(valid(NodeId::a(i), n, m, c) == (0 <= i && i < n));
                    CHECK(valid(NodeId::e(i), n, m, c) == (0 <= i && i < n));
                    for (int k = -1; k <= m; ++k) {
                        bool ki_ok = 0 <= k && k < m && 0 <= i && i < n;
                        CHECK(valid(NodeId::t(k, i), n, m, c) == ki_ok);
                        for (int j = -1; j <= n; ++j) {
                            bool j_ok = ki_ok && i <= j && j <= std::min(i + c - 1, n - 1);
                            CHECK(valid(NodeId::i_node(k, i, j), n, m, c) == j_ok);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("hyperedge validity enforces the chain cap") {
    for (int n = 1; n <= 6; ++n) {
        for (int m = 1; m <= 3; ++m) {
            for (int c = 1; c <= n; ++c) {
                for (int i = -1; i <= n; ++i) {
                    bool i_ok = 0 <= i && i < n;
                    CHECK(valid(HyperedgeId::spine_a(i), n, m, c) == i_ok);
                    CHECK(valid(HyperedgeId::spine_e(i), n, m, c) == i_ok);
                    for (int k = -1; k <= m; ++k) {
                        bool ki_ok = i_ok && 0 <= k && k < m;
                        CHECK(valid(HyperedgeId::tx(k, i), n, m, c) == ki_ok);
                        CHECK(valid(HyperedgeId::ti(k, i), n, m, c) == ki_ok);
                        for (int j = -1; j <= n; ++j) {
                            int cap = i_ok ? std::min(i + c - 1, n - 1) : -1;
                            bool end_ok = ki_ok && i <= j && j <= cap;
                            bool interior_ok = ki_ok && i <= j && j + 1 <= cap;
                            CHECK(valid(HyperedgeId::i_end(k, i, j), n, m, c) == end_ok);
                            CHECK(valid(HyperedgeId::i_continue(k, i, j), n, m, c) == interior_ok);
                            CHECK(valid(HyperedgeId::i_both(k, i, j), n, m, c) == interior_ok);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("identifier printing names kind and indices") {
    CHECK(to_string(NodeId::x()) == "X");
    CHECK(to_string(NodeId::i_node(1, 0, 2)) == "I(1,0,2)");
    CHECK(to_string(HyperedgeId::tx(0, 3)) == "TX(0,3)");
    CHECK(to_string(HyperedgeId::i_both(1, 0, 2)) == "IBoth(1,0,2)");
}
