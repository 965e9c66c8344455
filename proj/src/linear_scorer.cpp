#include "seghyp/scorer.hpp"

#include <algorithm>

#include "seghyp/features.hpp"

namespace seghyp {

std::uint32_t LinearScorer::intern(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    weights_.push_back(0.0);
    return id;
}

int LinearScorer::find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : static_cast<int>(it->second);
}

double LinearScorer::weight_of(const std::string& name) const {
    int id = find(name);
    return id < 0 ? 0.0 : weights_[static_cast<std::size_t>(id)];
}

ScoredSentence LinearScorer::score(const Sentence& sentence, const SegmentalHypergraph& g) const {
    ScoredSentence out{EdgeScoreTable(g), {}};
    for (std::int32_t e = 0; e < g.num_edges(); ++e) {
        const HyperedgeId& id = g.edge(e).id;
        if (id.kind == EdgeKind::SpineA || id.kind == EdgeKind::SpineE) continue;
        double phi = 0.0;
        for (const std::string& f : extract_features(id, sentence)) {
            int fid = find(f);
            if (fid >= 0) phi += weights_[static_cast<std::size_t>(fid)];
        }
        out.scores.set_phi(e, phi);
    }
    return out;
}

EdgeFeatureLists LinearScorer::edge_features(const Sentence& sentence,
                                             const SegmentalHypergraph& g) {
    EdgeFeatureLists lists(static_cast<std::size_t>(g.num_edges()));
    for (std::int32_t e = 0; e < g.num_edges(); ++e) {
        const HyperedgeId& id = g.edge(e).id;
        if (id.kind == EdgeKind::SpineA || id.kind == EdgeKind::SpineE) continue;
        auto& ids = lists[static_cast<std::size_t>(e)];
        for (const std::string& f : extract_features(id, sentence)) ids.push_back(intern(f));
    }
    return lists;
}

ScoredSentence LinearScorer::score_cached(const EdgeFeatureLists& features,
                                          const SegmentalHypergraph& g) {
    ScoredSentence out{EdgeScoreTable(g), {}};
    for (std::int32_t e = 0; e < g.num_edges(); ++e) {
        double phi = 0.0;
        for (std::uint32_t fid : features[static_cast<std::size_t>(e)])
            phi += weights_[fid];
        out.scores.set_phi(e, phi);
    }
    // The hook borrows the caller's feature lists; call it before they move.
    out.backward = [this, &features](const std::vector<double>& dphi) {
        for (std::size_t e = 0; e < features.size(); ++e) {
            double d = dphi[e];
            if (d == 0.0) continue;
            for (std::uint32_t fid : features[e]) add_grad(fid, d);
        }
    };
    return out;
}

std::vector<std::pair<std::uint32_t, double>> LinearScorer::drain_grad() {
    std::vector<std::pair<std::uint32_t, double>> out(pending_.begin(), pending_.end());
    pending_.clear();
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace seghyp
