#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>

#include "seghyp/inference.hpp"
#include "seghyp/random.hpp"

using namespace seghyp;

namespace {

// Uniform scores on modeled edges; spine edges stay at zero.
EdgeScoreTable random_scores(const SegmentalHypergraph& g, Rng& rng) {
    EdgeScoreTable scores(g);
    for (std::int32_t e = 0; e < g.num_edges(); ++e) {
        EdgeKind kind = g.edge(e).id.kind;
        if (kind == EdgeKind::SpineA || kind == EdgeKind::SpineE) continue;
        scores.set_phi(e, rng.uniform(-3.0, 3.0));
    }
    return scores;
}

}  // namespace

TEST_CASE("uniform zero scores give log of the hyperpath count") {
    SegmentalHypergraph g1 = SegmentalHypergraph::build(1, 1, 1);
    EdgeScoreTable zero1(g1);
    CHECK(log_z_of(g1, inside(g1, zero1, false)) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    SegmentalHypergraph g2 = SegmentalHypergraph::build(2, 1, 2);
    EdgeScoreTable zero2(g2);
    CHECK(log_z_of(g2, inside(g2, zero2, false)) == doctest::Approx(std::log(8.0)).epsilon(1e-12));
}

TEST_CASE("two-path instance: equiprobable marginals and root boundary") {
    SegmentalHypergraph g = SegmentalHypergraph::build(1, 1, 1);
    EdgeScoreTable zero(g);
    InferenceResult result = marginals(g, zero, false);

    CHECK(result.log_z == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(result.outside[static_cast<std::size_t>(g.root())] == 0.0);
    // T(0,0) lies on every hyperpath below an all-zero spine.
    CHECK(result.outside[static_cast<std::size_t>(g.node_index(NodeId::t(0, 0)))] == 0.0);

    auto marginal = [&](const HyperedgeId& id) {
        return result.edge_marginals[static_cast<std::size_t>(g.edge_index(id))];
    };
    CHECK(marginal(HyperedgeId::tx(0, 0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(marginal(HyperedgeId::ti(0, 0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(marginal(HyperedgeId::i_end(0, 0, 0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(marginal(HyperedgeId::spine_a(0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(marginal(HyperedgeId::spine_e(0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cost-augmented partition on the two-path instance") {
    // Zero model scores, gold = the single mention, penalty 1 on the one
    // false-negative edge: the augmented partition is log(1 + e).
    SegmentalHypergraph g = SegmentalHypergraph::build(1, 1, 1);
    EdgeScoreTable scores(g);
    std::vector<double> delta(static_cast<std::size_t>(g.num_edges()), 0.0);
    delta[static_cast<std::size_t>(g.edge_index(HyperedgeId::tx(0, 0)))] = 1.0;
    scores.set_delta(std::move(delta));

    InferenceResult aug = marginals(g, scores, true);
    CHECK(aug.log_z == doctest::Approx(1.3132616875182228).epsilon(1e-12));
    double ti = aug.edge_marginals[static_cast<std::size_t>(g.edge_index(HyperedgeId::ti(0, 0)))];
    CHECK(ti == doctest::Approx(0.2689414213699951).epsilon(1e-12));

    // Plain inference on the same table ignores the cost entirely.
    InferenceResult plain = marginals(g, scores, false);
    CHECK(plain.log_z == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("flow conservation at nodes and edges") {
    Rng rng(99);
    for (auto [n, m, c] : {std::array<int, 3>{3, 2, 2}, {5, 1, 3}, {4, 2, 4}}) {
        SegmentalHypergraph g = SegmentalHypergraph::build(n, m, c);
        for (int trial = 0; trial < 5; ++trial) {
            EdgeScoreTable scores = random_scores(g, rng);
            InferenceResult result = marginals(g, scores, false);

            for (std::int32_t e = 0; e < g.num_edges(); ++e) {
                double marginal = result.edge_marginals[static_cast<std::size_t>(e)];
                CHECK(marginal >= 0.0);
                CHECK(marginal <= 1.0 + 1e-12);
            }
            // Spine edges lie on every hyperpath.
            for (int i = 0; i < n; ++i) {
                double spine = result.edge_marginals[static_cast<std::size_t>(
                    g.edge_index(HyperedgeId::spine_a(i)))];
                CHECK(spine == doctest::Approx(1.0).epsilon(1e-10));
            }
            // Outgoing edge marginals of a node sum to the node's own mass.
            for (int v = 1; v < g.num_nodes(); ++v) {
                double node_mass =
                    std::exp(result.inside[static_cast<std::size_t>(v)] +
                             result.outside[static_cast<std::size_t>(v)] - result.log_z);
                double outgoing = 0.0;
                for (std::int32_t e = g.out_begin(v); e < g.out_end(v); ++e) {
                    outgoing += result.edge_marginals[static_cast<std::size_t>(e)];
                }
                CHECK(outgoing == doctest::Approx(node_mass).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("map decoding prefers the mention-free path on all ties") {
    SegmentalHypergraph g = SegmentalHypergraph::build(3, 2, 3);
    EdgeScoreTable zero(g);
    auto [path, score] = map_decode(g, zero);
    CHECK(score == 0.0);
    CHECK(decode(path, g).empty());
}

TEST_CASE("map decoding follows the dominating chain") {
    SegmentalHypergraph g = SegmentalHypergraph::build(1, 1, 1);
    EdgeScoreTable scores(g);
    scores.set_phi(g.edge_index(HyperedgeId::ti(0, 0)), 2.0);
    scores.set_phi(g.edge_index(HyperedgeId::i_end(0, 0, 0)), 1.0);

    auto [path, score] = map_decode(g, scores);
    CHECK(score == doctest::Approx(3.0));
    CHECK(decode(path, g) == MentionSet{{0, 0, 0}});

    Hyperpath expected = encode({{0, 0, 0}}, g);
    CHECK(path == expected);
}

TEST_CASE("map decoding ignores the cost table") {
    SegmentalHypergraph g = SegmentalHypergraph::build(1, 1, 1);
    EdgeScoreTable scores(g);
    std::vector<double> delta(static_cast<std::size_t>(g.num_edges()), 0.0);
    delta[static_cast<std::size_t>(g.edge_index(HyperedgeId::tx(0, 0)))] = 5.0;
    scores.set_delta(std::move(delta));

    auto [path, score] = map_decode(g, scores);
    CHECK(score == 0.0);
    CHECK(decode(path, g).empty());  // the cost would have flipped the choice
}

TEST_CASE("non-finite scores are rejected") {
    SegmentalHypergraph g = SegmentalHypergraph::build(2, 1, 2);
    EdgeScoreTable scores(g);
    scores.set_phi(0, std::numeric_limits<double>::quiet_NaN());
    CHECK_THROWS_AS(inside(g, scores, false), NonFiniteScoreError);
    CHECK_THROWS_AS(map_decode(g, scores), NonFiniteScoreError);

    EdgeScoreTable bad_delta(g);
    std::vector<double> delta(static_cast<std::size_t>(g.num_edges()), 0.0);
    delta[0] = std::numeric_limits<double>::infinity();
    bad_delta.set_delta(std::move(delta));
    CHECK_THROWS_AS(inside(g, bad_delta, true), NonFiniteScoreError);
}
