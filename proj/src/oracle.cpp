#include "seghyp/oracle.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "seghyp/random.hpp"

namespace seghyp::oracle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// The independent choice set of one (type, start) pair: every subset of the
// admissible end positions, as ready-made edge-index lists. Subset bit b
// stands for end position start + b.
std::vector<std::vector<std::int32_t>> pair_choices(const SegmentalHypergraph& g, int k, int i) {
    int len = g.chain_len(i);
    std::vector<std::vector<std::int32_t>> options;
    options.reserve(1u << len);
    for (std::uint32_t mask = 0; mask < (1u << len); ++mask) {
        std::vector<std::int32_t> edges;
        if (mask == 0) {
            edges.push_back(g.edge_index(HyperedgeId::tx(k, i)));
        } else {
            edges.push_back(g.edge_index(HyperedgeId::ti(k, i)));
            int last = i;
            for (int b = 0; b < len; ++b) {
                if (mask & (1u << b)) last = i + b;
            }
            for (int j = i; j < last; ++j) {
                bool is_end = (mask & (1u << (j - i))) != 0;
                edges.push_back(g.edge_index(is_end ? HyperedgeId::i_both(k, i, j)
                                                    : HyperedgeId::i_continue(k, i, j)));
            }
            edges.push_back(g.edge_index(HyperedgeId::i_end(k, i, last)));
        }
        options.push_back(std::move(edges));
    }
    return options;
}

int env_thread_cap() {
    if (const char* value = std::getenv("SEGHYP_THREADS")) {
        int cap = std::atoi(value);
        if (cap >= 1) return cap;
    }
    return 0;
}

}  // namespace

void for_each_hyperpath(const SegmentalHypergraph& g,
                        const std::function<void(const Hyperpath&)>& visit,
                        std::uint64_t bound) {
    BigInt total = hyperpath_count_closed_form(g.sentence_len(), g.num_types(),
                                               g.max_mention_len());
    if (total > bound) {
        throw TooManyPathsError("oracle: hyperpath count " + total.str() +
                                " exceeds enumeration bound " + std::to_string(bound));
    }

    const int n = g.sentence_len();
    const int m = g.num_types();
    std::vector<std::vector<std::vector<std::int32_t>>> choices;  // per (k, i) pair
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < m; ++k) choices.push_back(pair_choices(g, k, i));
    }

    std::vector<std::int32_t> spine;
    for (int i = 0; i < n; ++i) {
        spine.push_back(g.edge_index(HyperedgeId::spine_a(i)));
        spine.push_back(g.edge_index(HyperedgeId::spine_e(i)));
    }

    // Mixed-radix odometer over the per-pair choices.
    std::vector<std::size_t> digit(choices.size(), 0);
    Hyperpath path;
    for (;;) {
        path.edges = spine;
        for (std::size_t p = 0; p < choices.size(); ++p) {
            const auto& edges = choices[p][digit[p]];
            path.edges.insert(path.edges.end(), edges.begin(), edges.end());
        }
        std::sort(path.edges.begin(), path.edges.end());
        visit(path);

        std::size_t p = 0;
        while (p < digit.size() && ++digit[p] == choices[p].size()) {
            digit[p] = 0;
            ++p;
        }
        if (p == digit.size()) break;
    }
}

std::vector<Hyperpath> enumerate_hyperpaths(const SegmentalHypergraph& g, std::uint64_t bound) {
    std::vector<Hyperpath> paths;
    for_each_hyperpath(g, [&paths](const Hyperpath& p) { paths.push_back(p); }, bound);
    return paths;
}

std::vector<Hyperpath> enumerate_hyperpaths_recursive(const SegmentalHypergraph& g,
                                                      std::uint64_t bound) {
    BigInt total = count_hyperpaths(g);
    if (total > bound) {
        throw TooManyPathsError("oracle: hyperpath count " + total.str() +
                                " exceeds recursive enumeration bound " + std::to_string(bound));
    }

    // walk(v) = every edge set of a sub-hyperpath rooted at v.
    std::function<std::vector<std::vector<std::int32_t>>(std::int32_t)> walk =
        [&](std::int32_t v) -> std::vector<std::vector<std::int32_t>> {
        if (v == SegmentalHypergraph::kSink) return {{}};
        std::vector<std::vector<std::int32_t>> result;
        for (std::int32_t e = g.out_begin(v); e < g.out_end(v); ++e) {
            std::vector<std::vector<std::int32_t>> combos = {{e}};
            for (std::int32_t t : g.tails(e)) {
                std::vector<std::vector<std::int32_t>> sub = walk(t);
                std::vector<std::vector<std::int32_t>> next;
                next.reserve(combos.size() * sub.size());
                for (const auto& left : combos) {
                    for (const auto& right : sub) {
                        std::vector<std::int32_t> joined = left;
                        joined.insert(joined.end(), right.begin(), right.end());
                        next.push_back(std::move(joined));
                    }
                }
                combos = std::move(next);
            }
            for (auto& set : combos) result.push_back(std::move(set));
        }
        return result;
    };

    std::vector<Hyperpath> paths;
    for (auto& edges : walk(static_cast<std::int32_t>(g.root()))) {
        Hyperpath p;
        p.edges = std::move(edges);
        std::sort(p.edges.begin(), p.edges.end());
        paths.push_back(std::move(p));
    }
    std::sort(paths.begin(), paths.end(),
              [](const Hyperpath& a, const Hyperpath& b) { return a.edges < b.edges; });
    return paths;
}

double brute_log_z(const SegmentalHypergraph& g, const EdgeScoreTable& scores, bool use_cost,
                   std::uint64_t bound) {
    double acc = kNegInf;
    for_each_hyperpath(
        g,
        [&](const Hyperpath& p) {
            double s = 0.0;
            for (std::int32_t e : p.edges) s += scores.psi(e, use_cost);
            acc = log_add(acc, s);
        },
        bound);
    return acc;
}

std::vector<double> brute_marginals(const SegmentalHypergraph& g, const EdgeScoreTable& scores,
                                    bool use_cost, std::uint64_t bound) {
    double log_z = brute_log_z(g, scores, use_cost, bound);
    std::vector<double> marginal(static_cast<std::size_t>(g.num_edges()), 0.0);
    for_each_hyperpath(
        g,
        [&](const Hyperpath& p) {
            double s = 0.0;
            for (std::int32_t e : p.edges) s += scores.psi(e, use_cost);
            double mass = std::exp(s - log_z);
            for (std::int32_t e : p.edges) marginal[static_cast<std::size_t>(e)] += mass;
        },
        bound);
    return marginal;
}

std::vector<std::int32_t> traversal_sequence(const Hyperpath& path,
                                             const SegmentalHypergraph& g) {
    std::vector<std::int32_t> chosen(static_cast<std::size_t>(g.num_nodes()), -1);
    for (std::int32_t e : path.edges) chosen[static_cast<std::size_t>(g.edge(e).head)] = e;

    std::vector<std::int32_t> seq;
    seq.reserve(path.edges.size());
    std::vector<std::int32_t> stack = {static_cast<std::int32_t>(g.root())};
    while (!stack.empty()) {
        std::int32_t v = stack.back();
        stack.pop_back();
        std::int32_t e = chosen[static_cast<std::size_t>(v)];
        if (e == -1) {
            throw MalformedHyperpathError("oracle: node " + to_string(g.node(v)) +
                                          " reached but has no outgoing edge in the path");
        }
        seq.push_back(e);
        auto tails = g.tails(e);
        for (auto it = tails.rbegin(); it != tails.rend(); ++it) {
            if (*it != SegmentalHypergraph::kSink) stack.push_back(*it);
        }
    }
    return seq;
}

BruteMapResult brute_map(const SegmentalHypergraph& g, const EdgeScoreTable& scores,
                         std::uint64_t bound) {
    BruteMapResult best;
    best.score = kNegInf;
    std::vector<std::int32_t> best_seq;
    for_each_hyperpath(
        g,
        [&](const Hyperpath& p) {
            double s = 0.0;
            for (std::int32_t e : p.edges) s += scores.phi(e);
            if (s > best.score) {
                best.score = s;
                best.path = p;
                best.unique = true;
                best_seq.clear();
            } else if (s == best.score) {
                best.unique = false;
                if (best_seq.empty()) best_seq = traversal_sequence(best.path, g);
                std::vector<std::int32_t> seq = traversal_sequence(p, g);
                if (seq < best_seq) {
                    best.path = p;
                    best_seq = std::move(seq);
                }
            }
        },
        bound);
    return best;
}

namespace {

// All mentions representable in the graph, in a fixed order; a mention set
// decoded from any hyperpath is keyed by a bitmask over this universe. Any
// enumerable graph (count <= bound < 2^63) has at most 62 possible mentions,
// because the hyperpath count is exactly 2^(m * span count).
std::uint64_t mention_set_key(const MentionSet& mentions, const SegmentalHypergraph& g) {
    std::uint64_t key = 0;
    for (const Mention& men : mentions) {
        int bit = men.type * g.span_count() + g.span_index(men.start, men.end);
        key |= std::uint64_t{1} << static_cast<unsigned>(bit);
    }
    return key;
}

CellReport check_cell(int n, int m, int c, int seeds, std::uint64_t bound) {
    CellReport cell;
    cell.n = n;
    cell.m = m;
    cell.c = c;

    SegmentalHypergraph g = SegmentalHypergraph::build(n, m, c);
    BigInt counted = count_hyperpaths(g);
    BigInt closed = hyperpath_count_closed_form(n, m, c);
    cell.hyperpath_count = counted.str();
    cell.combination_count = closed.str();

    // Bijection + round trips over the full enumeration.
    std::unordered_set<std::uint64_t> decoded_keys;
    std::uint64_t visited = 0;
    bool round_trip = true;
    for_each_hyperpath(
        g,
        [&](const Hyperpath& p) {
            ++visited;
            MentionSet mentions = decode(p, g);
            decoded_keys.insert(mention_set_key(mentions, g));
            if (encode(mentions, g) != p) round_trip = false;
        },
        bound);
    cell.distinct_decoded_sets = decoded_keys.size();
    cell.round_trip_holds = round_trip;
    cell.bijection_holds = round_trip && counted == closed &&
                           BigInt(visited) == counted &&
                           BigInt(cell.distinct_decoded_sets) == counted;

    // Possible mentions, for random gold draws in the cost-augmented check.
    std::vector<Mention> universe;
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = i; j <= i + g.chain_len(i) - 1; ++j) universe.push_back({i, j, k});
        }
    }

    cell.map_agrees = true;
    cell.map_unique = true;
    std::uint64_t cell_seed = derive_seed(
        derive_seed(derive_seed(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m)),
                    static_cast<std::uint64_t>(c)),
        0x5e9ed);

    for (int s = 0; s < seeds; ++s) {
        Rng rng(derive_seed(cell_seed, static_cast<std::uint64_t>(s)));

        // Random scores on all modeled edges; spine edges stay at zero (they
        // appear in every hyperpath, so a spine score is a constant offset).
        EdgeScoreTable scores(g);
        for (std::int32_t e = 0; e < g.num_edges(); ++e) {
            EdgeKind kind = g.edge(e).id.kind;
            if (kind == EdgeKind::SpineA || kind == EdgeKind::SpineE) continue;
            scores.set_phi(e, rng.uniform(-3.0, 3.0));
        }

        // Partition and marginals, plain.
        InferenceResult engine = marginals(g, scores, /*use_cost=*/false);
        double brute = brute_log_z(g, scores, false, bound);
        cell.max_log_z_error = std::max(
            cell.max_log_z_error, std::abs(engine.log_z - brute) / std::max(1.0, std::abs(brute)));
        std::vector<double> brute_marg = brute_marginals(g, scores, false, bound);
        for (std::int32_t e = 0; e < g.num_edges(); ++e) {
            cell.max_marginal_error =
                std::max(cell.max_marginal_error,
                         std::abs(engine.edge_marginals[static_cast<std::size_t>(e)] -
                                  brute_marg[static_cast<std::size_t>(e)]));
        }

        // Cost-augmented variant on a random gold set (first three seeds).
        if (s < 3) {
            MentionSet gold;
            for (const Mention& men : universe) {
                if (rng.bernoulli(0.3)) gold.push_back(men);
            }
            gold = canonicalize(std::move(gold));
            std::vector<std::uint8_t> in_gold = gold_edge_indicator(gold, g);
            std::vector<double> delta(static_cast<std::size_t>(g.num_edges()), 0.0);
            for (std::int32_t e = 0; e < g.num_edges(); ++e) {
                if (in_gold[static_cast<std::size_t>(e)]) continue;
                EdgeKind kind = g.edge(e).id.kind;
                if (kind == EdgeKind::TX) delta[static_cast<std::size_t>(e)] = 1.5;
                if (kind == EdgeKind::TI) delta[static_cast<std::size_t>(e)] = 1.0;
            }
            EdgeScoreTable aug = scores;
            aug.set_delta(std::move(delta));
            InferenceResult engine_aug = marginals(g, aug, /*use_cost=*/true);
            double brute_aug = brute_log_z(g, aug, true, bound);
            cell.max_log_z_error =
                std::max(cell.max_log_z_error, std::abs(engine_aug.log_z - brute_aug) /
                                                   std::max(1.0, std::abs(brute_aug)));
            std::vector<double> brute_marg_aug = brute_marginals(g, aug, true, bound);
            for (std::int32_t e = 0; e < g.num_edges(); ++e) {
                cell.max_marginal_error =
                    std::max(cell.max_marginal_error,
                             std::abs(engine_aug.edge_marginals[static_cast<std::size_t>(e)] -
                                      brute_marg_aug[static_cast<std::size_t>(e)]));
            }
        }

        // MAP agreement after tie-breaking perturbation.
        EdgeScoreTable perturbed = scores;
        for (std::int32_t e = 0; e < g.num_edges(); ++e) {
            EdgeKind kind = g.edge(e).id.kind;
            if (kind == EdgeKind::SpineA || kind == EdgeKind::SpineE) continue;
            perturbed.set_phi(e, perturbed.phi(e) + rng.uniform(0.0, 1e-6));
        }
        auto [engine_path, engine_score] = map_decode(g, perturbed);
        BruteMapResult brute_best = brute_map(g, perturbed, bound);
        if (engine_path != brute_best.path) cell.map_agrees = false;
        if (!brute_best.unique) cell.map_unique = false;
        (void)engine_score;
    }
    return cell;
}

}  // namespace

EnumerationReport verify(int max_n, int max_m, const std::vector<int>& caps, int seeds,
                         std::uint64_t bound, int threads) {
    auto started = std::chrono::steady_clock::now();

    std::vector<std::array<int, 3>> cells;
    for (int n = 1; n <= max_n; ++n) {
        for (int m = 1; m <= max_m; ++m) {
            for (int cap : caps) {
                int c = cap == 0 ? n : std::min(cap, n);
                c = std::max(c, 1);
                std::array<int, 3> cell = {n, m, c};
                if (std::find(cells.begin(), cells.end(), cell) == cells.end()) {
                    cells.push_back(cell);
                }
            }
        }
    }

    EnumerationReport report;
    report.cells.resize(cells.size());

    int worker_count = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (int cap = env_thread_cap(); cap > 0) worker_count = std::min(worker_count, cap);
    worker_count = std::max(1, std::min<int>(worker_count, static_cast<int>(cells.size())));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&]() {
        for (;;) {
            std::size_t index = next.fetch_add(1);
            if (index >= cells.size()) return;
            try {
                report.cells[index] =
                    check_cell(cells[index][0], cells[index][1], cells[index][2], seeds, bound);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    if (worker_count == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < worker_count; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    report.bijection_holds = true;
    report.round_trip_holds = true;
    report.map_agrees = true;
    bool map_unique = true;
    for (const CellReport& cell : report.cells) {
        report.bijection_holds = report.bijection_holds && cell.bijection_holds;
        report.round_trip_holds = report.round_trip_holds && cell.round_trip_holds;
        report.map_agrees = report.map_agrees && cell.map_agrees;
        map_unique = map_unique && cell.map_unique;
        report.max_log_z_error = std::max(report.max_log_z_error, cell.max_log_z_error);
        report.max_marginal_error = std::max(report.max_marginal_error, cell.max_marginal_error);
    }
    report.all_ok = report.bijection_holds && report.round_trip_holds && report.map_agrees &&
                    map_unique && report.max_log_z_error < 1e-8 &&
                    report.max_marginal_error < 1e-10;
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

std::string report_to_json(const EnumerationReport& report) {
    nlohmann::json doc;
    doc["bijectionHolds"] = report.bijection_holds;
    doc["roundTripHolds"] = report.round_trip_holds;
    doc["maxLogZError"] = report.max_log_z_error;
    doc["maxMarginalError"] = report.max_marginal_error;
    doc["mapAgrees"] = report.map_agrees;
    doc["allOk"] = report.all_ok;
    doc["elapsedSeconds"] = report.elapsed_seconds;
    doc["cells"] = nlohmann::json::array();
    for (const CellReport& cell : report.cells) {
        nlohmann::json entry;
        entry["n"] = cell.n;
        entry["m"] = cell.m;
        entry["c"] = cell.c;
        entry["hyperpathCount"] = cell.hyperpath_count;
        entry["combinationCount"] = cell.combination_count;
        entry["distinctDecodedSets"] = cell.distinct_decoded_sets;
        entry["bijectionHolds"] = cell.bijection_holds;
        entry["roundTripHolds"] = cell.round_trip_holds;
        entry["maxLogZError"] = cell.max_log_z_error;
        entry["maxMarginalError"] = cell.max_marginal_error;
        entry["mapAgrees"] = cell.map_agrees;
        entry["mapUnique"] = cell.map_unique;
        doc["cells"].push_back(std::move(entry));
    }
    return doc.dump(2);
}

}  // namespace seghyp::oracle
