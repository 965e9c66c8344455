#include "seghyp/evaluation.hpp"

#include <algorithm>
#include <chrono>

#include <json.hpp>

namespace seghyp {

MatchCounts match(const MentionSet& gold, const MentionSet& pred) {
    MentionSet g = canonicalize(gold);
    MentionSet p = canonicalize(pred);
    MatchCounts counts;
    std::size_t i = 0, j = 0;
    while (i < g.size() && j < p.size()) {
        if (g[i] == p[j]) {
            ++counts.tp;
            ++i;
            ++j;
        } else if (g[i] < p[j]) {
            ++counts.fn;
            ++i;
        } else {
            ++counts.fp;
            ++j;
        }
    }
    counts.fn += static_cast<long long>(g.size() - i);
    counts.fp += static_cast<long long>(p.size() - j);
    return counts;
}

Prf prf(const MatchCounts& counts) {
    Prf out;
    out.tp = counts.tp;
    out.fp = counts.fp;
    out.fn = counts.fn;
    if (counts.tp + counts.fp > 0)
        out.precision = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
    if (counts.tp + counts.fn > 0)
        out.recall = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
    if (out.precision + out.recall > 0)
        out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

bool has_overlap(const MentionSet& mentions) {
    MentionSet m = canonicalize(mentions);
    std::int32_t max_end = -1;
    for (const Mention& x : m) {
        if (x.start <= max_end) return true;
        max_end = std::max(max_end, x.end);
    }
    return false;
}

EvalReport evaluate(const std::vector<MentionSet>& gold, const std::vector<MentionSet>& pred) {
    if (gold.size() != pred.size())
        throw Error("evaluate: gold and prediction counts differ");
    MatchCounts all, over, rest;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        MatchCounts c = match(gold[i], pred[i]);
        all += c;
        (has_overlap(gold[i]) ? over : rest) += c;
    }
    EvalReport report;
    report.overall = prf(all);
    report.overlap_portion = prf(over);
    report.non_overlap_portion = prf(rest);
    return report;
}

namespace {

nlohmann::json prf_to_json(const Prf& p) {
    return {{"tp", p.tp},     {"fp", p.fp},           {"fn", p.fn},
            {"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

}  // namespace

std::string report_to_json(const EvalReport& report, bool include_throughput) {
    nlohmann::json doc;
    doc["overall"] = prf_to_json(report.overall);
    doc["overlapPortion"] = prf_to_json(report.overlap_portion);
    doc["nonOverlapPortion"] = prf_to_json(report.non_overlap_portion);
    if (include_throughput) doc["wordsPerSecond"] = report.words_per_second;
    return doc.dump(2);
}

std::string report_to_table(const EvalReport& report) {
    char buf[256];
    std::string out = "portion          P      R      F1     (tp/fp/fn)\n";
    auto row = [&](const char* name, const Prf& p) {
        std::snprintf(buf, sizeof(buf), "%-14s %6.4f %6.4f %6.4f  (%lld/%lld/%lld)\n", name,
                      p.precision, p.recall, p.f1, p.tp, p.fp, p.fn);
        out += buf;
    };
    row("overall", report.overall);
    row("overlapping", report.overlap_portion);
    row("non-overlap", report.non_overlap_portion);
    return out;
}

double benchmark_decode(Model& model, const Corpus& corpus, int repeat) {
    if (repeat < 1) repeat = 1;
    GraphCache cache;
    for (const Annotated& a : corpus.items) {
        int n = a.sentence.length();
        cache.get(n, model.types.size(), model.cap_for(n));
    }
    long long tokens = corpus.token_count();
    std::vector<double> rates;
    rates.reserve(static_cast<std::size_t>(repeat));
    for (int r = 0; r < repeat; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        for (const Annotated& a : corpus.items) (void)model.predict(a.sentence, cache);
        auto t1 = std::chrono::steady_clock::now();
        double seconds = std::chrono::duration<double>(t1 - t0).count();
        rates.push_back(seconds > 0 ? static_cast<double>(tokens) / seconds : 0.0);
    }
    std::sort(rates.begin(), rates.end());
    std::size_t mid = rates.size() / 2;
    if (rates.size() % 2 == 1) return rates[mid];
    return 0.5 * (rates[mid - 1] + rates[mid]);
}

}  // namespace seghyp
