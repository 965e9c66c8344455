#pragma once

// Corpus metrics: exact-match micro precision/recall/F1, a breakdown over
// sentences with vs. without overlapping gold mentions, and decoding
// throughput measurement.

#include <string>
#include <vector>

#include "seghyp/corpus.hpp"
#include "seghyp/scorer.hpp"
#include "seghyp/types.hpp"

namespace seghyp {

struct MatchCounts {
    long long tp = 0, fp = 0, fn = 0;

    MatchCounts& operator+=(const MatchCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
};

/// Exact (start, end, type) matching; duplicates are removed defensively.
MatchCounts match(const MentionSet& gold, const MentionSet& pred);

struct Prf {
    long long tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

/// Precision/recall/F1 from counts; zero denominators give 0.
Prf prf(const MatchCounts& counts);

/// True iff two mentions of the set share at least one token index.
bool has_overlap(const MentionSet& mentions);

struct EvalReport {
    Prf overall;
    Prf overlap_portion;      // sentences whose gold has overlapping mentions
    Prf non_overlap_portion;  // the rest
    double words_per_second = 0.0;  // benchmark mode only
};

/// Micro-averaged scores over parallel per-sentence gold/predicted sets; the
/// overlap split is decided by the gold annotations.
EvalReport evaluate(const std::vector<MentionSet>& gold, const std::vector<MentionSet>& pred);

std::string report_to_json(const EvalReport& report, bool include_throughput);

/// Plain text table: one P/R/F1 row per portion.
std::string report_to_table(const EvalReport& report);

/// Median decoding throughput (tokens per second) over `repeat` runs of
/// scoring + MAP decoding across the corpus, single-threaded; the graph
/// cache is pre-warmed so measured time excludes one-time graph builds.
double benchmark_decode(Model& model, const Corpus& corpus, int repeat);

}  // namespace seghyp
