#pragma once

// Brute-force ground truth for desk-scale verification: exhaustive hyperpath
// enumeration, brute partition function, brute marginals, brute argmax, and
// the grid verifier that machine-checks the hyperpath/mention-set bijection
// against the inference engine.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "seghyp/hypergraph.hpp"
#include "seghyp/inference.hpp"

namespace seghyp::oracle {

inline constexpr std::uint64_t kDefaultEnumerationBound = 1'000'000;

/// Visits every hyperpath of the graph exactly once. Enumeration factors over
/// the independent per-(type, start) choices (each is a subset of admissible
/// end positions, the empty subset standing for "no mention here"), so the
/// visit count always equals the closed-form hyperpath count. Throws
/// TooManyPathsError when that count exceeds the bound.
void for_each_hyperpath(const SegmentalHypergraph& g,
                        const std::function<void(const Hyperpath&)>& visit,
                        std::uint64_t bound = kDefaultEnumerationBound);

/// Materializes the full hyperpath list (desk scale only).
std::vector<Hyperpath> enumerate_hyperpaths(const SegmentalHypergraph& g,
                                            std::uint64_t bound = kDefaultEnumerationBound);

/// Independent second enumerator: a naive recursive walk of the hypergraph
/// that knows nothing about the per-(k, i) factorization. Exponentially more
/// wasteful; used to cross-check the factored enumerator on tiny graphs.
std::vector<Hyperpath> enumerate_hyperpaths_recursive(const SegmentalHypergraph& g,
                                                      std::uint64_t bound = 100'000);

/// log sum over all hyperpaths of exp(sum of edge scores).
double brute_log_z(const SegmentalHypergraph& g, const EdgeScoreTable& scores, bool use_cost,
                   std::uint64_t bound = kDefaultEnumerationBound);

/// Per-edge marginal = total probability mass of hyperpaths containing the
/// edge, summed path by path.
std::vector<double> brute_marginals(const SegmentalHypergraph& g, const EdgeScoreTable& scores,
                                    bool use_cost,
                                    std::uint64_t bound = kDefaultEnumerationBound);

/// Argmax over enumerated hyperpaths by total phi, with the same tie-break as
/// map_decode (lexicographically smallest root-first traversal sequence of
/// chosen edge indices). Also reports whether the maximum was unique.
struct BruteMapResult {
    Hyperpath path;
    double score = 0.0;
    bool unique = true;
};
BruteMapResult brute_map(const SegmentalHypergraph& g, const EdgeScoreTable& scores,
                         std::uint64_t bound = kDefaultEnumerationBound);

/// Root-first traversal sequence of a hyperpath's chosen edge indices; the
/// canonical form compared by the MAP tie-break rule.
std::vector<std::int32_t> traversal_sequence(const Hyperpath& path, const SegmentalHypergraph& g);

/// Verification outcome for one (n, m, c) grid cell.
struct CellReport {
    int n = 0, m = 0, c = 0;
    std::string hyperpath_count;    // decimal big integer
    std::string combination_count;  // closed form, decimal big integer
    std::uint64_t distinct_decoded_sets = 0;
    bool bijection_holds = false;
    bool round_trip_holds = false;
    double max_log_z_error = 0.0;    // |engine - brute| / max(1, |brute|)
    double max_marginal_error = 0.0; // max absolute difference
    bool map_agrees = false;
    bool map_unique = false;
};

/// Aggregate over the verification grid.
struct EnumerationReport {
    std::vector<CellReport> cells;
    bool bijection_holds = false;
    bool round_trip_holds = false;
    double max_log_z_error = 0.0;
    double max_marginal_error = 0.0;
    bool map_agrees = false;
    bool all_ok = false;
    double elapsed_seconds = 0.0;
};

/// Runs the full bijection / round-trip / partition / marginal / MAP
/// cross-check grid: n in [1, max_n], m in [1, max_m], c drawn from caps
/// (entries clamped to [1, n]; 0 means c = n), `seeds` random score draws per
/// cell. Cells run in parallel up to `threads` workers (0 = auto).
EnumerationReport verify(int max_n, int max_m, const std::vector<int>& caps, int seeds,
                         std::uint64_t bound = 1u << 21, int threads = 0);

/// Report rendered as a JSON document string (pretty-printed).
std::string report_to_json(const EnumerationReport& report);

}  // namespace seghyp::oracle
