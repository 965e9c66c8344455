#include "seghyp/scorer.hpp"

#include <cmath>
#include <utility>

#include "seghyp/features.hpp"
#include "seghyp/random.hpp"

namespace seghyp {

namespace {

void fill_uniform(Eigen::MatrixXd& mat, Rng& rng, double lo, double hi) {
    double* p = mat.data();
    for (Eigen::Index idx = 0; idx < mat.size(); ++idx) p[idx] = rng.uniform(lo, hi);
}

void fill_glorot(Eigen::MatrixXd& mat, Rng& rng) {
    double r = std::sqrt(6.0 / static_cast<double>(mat.rows() + mat.cols()));
    fill_uniform(mat, rng, -r, r);
}

LstmCell make_cell(int input_dim, int hidden_dim, Rng& rng) {
    LstmCell cell = LstmCell::zeros(input_dim, hidden_dim);
    fill_glorot(cell.w_x, rng);
    fill_glorot(cell.w_h, rng);
    return cell;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(what);
}

}  // namespace

const std::string& StringVocab::unk() {
    static const std::string u = "<unk>";
    return u;
}

int StringVocab::add(const std::string& item) {
    auto it = index_.find(item);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(items_.size());
    items_.push_back(item);
    index_.emplace(item, id);
    return id;
}

int StringVocab::lookup(const std::string& item) const {
    auto it = index_.find(item);
    return it == index_.end() ? 0 : it->second;
}

std::vector<TensorRef> tensor_refs(NeuralParams& p) {
    std::vector<TensorRef> refs;
    auto add_mat = [&](const char* name, Eigen::MatrixXd& m) {
        refs.push_back({name, m.data(), m.rows(), m.cols()});
    };
    auto add_cell = [&](const std::string& prefix, LstmCell& cell) {
        refs.push_back({prefix + ".w_x", cell.w_x.data(), cell.w_x.rows(), cell.w_x.cols()});
        refs.push_back({prefix + ".w_h", cell.w_h.data(), cell.w_h.rows(), cell.w_h.cols()});
        refs.push_back({prefix + ".b", cell.b.data(), cell.b.size(), cell.b.size() > 0 ? 1 : 0});
    };
    add_mat("word_emb", p.word_emb);
    add_mat("pos_emb", p.pos_emb);
    add_mat("char_emb", p.char_emb);
    add_cell("char_fwd", p.char_fwd);
    add_cell("char_bwd", p.char_bwd);
    add_cell("word_fwd", p.word_fwd);
    add_cell("word_bwd", p.word_bwd);
    add_cell("span_fwd", p.span_fwd);
    add_cell("span_bwd", p.span_bwd);
    add_mat("w_tx", p.w_tx);
    add_mat("w_ti", p.w_ti);
    add_mat("w_ii", p.w_ii);
    add_mat("w_ix", p.w_ix);
    return refs;
}

NeuralScorer::NeuralScorer(NeuralConfig config, StringVocab words, StringVocab pos_tags,
                           StringVocab chars, std::vector<std::uint8_t> rare_words,
                           int num_types, std::uint64_t init_seed)
    : config_(config),
      words_(std::move(words)),
      pos_(std::move(pos_tags)),
      chars_(std::move(chars)),
      rare_(std::move(rare_words)),
      num_types_(num_types) {
    require(num_types_ >= 1, "scorer needs at least one mention type");
    require(config_.word_dim >= 1, "word_dim must be positive");
    require(config_.word_hidden >= 2 && config_.word_hidden % 2 == 0,
            "word_hidden must be a positive even number");
    require(config_.span_hidden >= 2 && config_.span_hidden % 2 == 0,
            "span_hidden must be a positive even number");
    require(!config_.use_pos || config_.pos_dim >= 1, "pos_dim must be positive");
    require(!config_.use_char || (config_.char_dim >= 1 && config_.char_hidden >= 2 &&
                                  config_.char_hidden % 2 == 0),
            "char dims must be positive (char_hidden even)");
    require(config_.dropout >= 0.0 && config_.dropout < 1.0, "dropout must be in [0, 1)");
    require(rare_.size() == static_cast<std::size_t>(words_.size()),
            "rare-word flags must parallel the word vocabulary");

    Rng rng(init_seed);
    int d1 = config_.word_hidden, d2 = config_.span_hidden;
    params_.word_emb.resize(config_.word_dim, words_.size());
    fill_uniform(params_.word_emb, rng, -0.1, 0.1);
    if (config_.use_pos) {
        params_.pos_emb.resize(config_.pos_dim, pos_.size());
        fill_uniform(params_.pos_emb, rng, -0.1, 0.1);
    }
    if (config_.use_char) {
        params_.char_emb.resize(config_.char_dim, chars_.size());
        fill_uniform(params_.char_emb, rng, -0.1, 0.1);
        params_.char_fwd = make_cell(config_.char_dim, config_.char_hidden / 2, rng);
        params_.char_bwd = make_cell(config_.char_dim, config_.char_hidden / 2, rng);
    }
    params_.word_fwd = make_cell(config_.input_dim(), d1 / 2, rng);
    params_.word_bwd = make_cell(config_.input_dim(), d1 / 2, rng);
    params_.span_fwd = make_cell(d1, d2 / 2, rng);
    params_.span_bwd = make_cell(d1, d2 / 2, rng);
    params_.w_tx.resize(num_types_, d1);
    fill_glorot(params_.w_tx, rng);
    params_.w_ti.resize(num_types_, d1);
    fill_glorot(params_.w_ti, rng);
    params_.w_ii.resize(num_types_, 2 * d2);
    fill_glorot(params_.w_ii, rng);
    params_.w_ix.resize(num_types_, d2);
    fill_glorot(params_.w_ix, rng);

    zero_grads();
}

void NeuralScorer::zero_grads() {
    auto zero_like = [](const Eigen::MatrixXd& src, Eigen::MatrixXd& dst) {
        dst = Eigen::MatrixXd::Zero(src.rows(), src.cols());
    };
    zero_like(params_.word_emb, grads_.word_emb);
    zero_like(params_.pos_emb, grads_.pos_emb);
    zero_like(params_.char_emb, grads_.char_emb);
    auto zero_cell = [](const LstmCell& src, LstmCell& dst) {
        dst = LstmCell::zeros(src.input_dim(), src.hidden_dim());
    };
    zero_cell(params_.char_fwd, grads_.char_fwd);
    zero_cell(params_.char_bwd, grads_.char_bwd);
    zero_cell(params_.word_fwd, grads_.word_fwd);
    zero_cell(params_.word_bwd, grads_.word_bwd);
    zero_cell(params_.span_fwd, grads_.span_fwd);
    zero_cell(params_.span_bwd, grads_.span_bwd);
    zero_like(params_.w_tx, grads_.w_tx);
    zero_like(params_.w_ti, grads_.w_ti);
    zero_like(params_.w_ii, grads_.w_ii);
    zero_like(params_.w_ix, grads_.w_ix);
}

ScoredSentence NeuralScorer::score(const Sentence& sentence, const SegmentalHypergraph& g,
                                   bool training, std::uint64_t mask_seed) {
    return score_traced(sentence, g, training, mask_seed, nullptr);
}

ScoredSentence NeuralScorer::score_traced(const Sentence& sentence, const SegmentalHypergraph& g,
                                          bool training, std::uint64_t mask_seed,
                                          std::shared_ptr<const NeuralTrace>* trace_out) {
    const int n = g.sentence_len();
    require(sentence.length() == n, "sentence length does not match the graph");
    require(g.num_types() == num_types_, "graph type count does not match the scorer");
    const int d1 = config_.word_hidden;
    const int d2 = config_.span_hidden;
    const int h1 = d1 / 2, h2 = d2 / 2;
    const int dw = config_.word_dim;
    const int dp = config_.use_pos ? config_.pos_dim : 0;
    const int dc = config_.use_char ? config_.char_hidden : 0;
    const int vdim = config_.input_dim();
    const std::int32_t span_count = g.span_count();

    auto tr = std::make_shared<NeuralTrace>();
    // Draw order is fixed so a mask seed pins the whole stochastic state:
    // first the per-token rare-word replacements, then the dropout mask.
    Rng rng(derive_seed(mask_seed, 0x6d61736bULL));

    tr->word_ids.resize(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        int wid = words_.lookup(lowercase(sentence.tokens[static_cast<std::size_t>(t)]));
        if (training && wid != 0 && rare_[static_cast<std::size_t>(wid)] && rng.bernoulli(0.5))
            wid = 0;
        tr->word_ids[static_cast<std::size_t>(t)] = wid;
    }
    if (config_.use_pos) {
        tr->pos_ids.resize(static_cast<std::size_t>(n), 0);
        if (sentence.has_pos() && sentence.pos.size() == static_cast<std::size_t>(n))
            for (int t = 0; t < n; ++t)
                tr->pos_ids[static_cast<std::size_t>(t)] =
                    pos_.lookup(sentence.pos[static_cast<std::size_t>(t)]);
    }
    if (config_.use_char) {
        tr->char_ids.resize(static_cast<std::size_t>(n));
        tr->char_f.resize(static_cast<std::size_t>(n));
        tr->char_b.resize(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) {
            const std::string& tok = sentence.tokens[static_cast<std::size_t>(t)];
            auto& ids = tr->char_ids[static_cast<std::size_t>(t)];
            for (char ch : tok) ids.push_back(chars_.lookup(std::string(1, ch)));
            if (ids.empty()) ids.push_back(0);
            auto len = static_cast<Eigen::Index>(ids.size());
            Eigen::MatrixXd cx(config_.char_dim, len);
            for (Eigen::Index p = 0; p < len; ++p)
                cx.col(p) = params_.char_emb.col(ids[static_cast<std::size_t>(p)]);
            Eigen::MatrixXd cx_rev = cx.rowwise().reverse();
            tr->char_f[static_cast<std::size_t>(t)] = lstm_forward(params_.char_fwd, cx);
            tr->char_b[static_cast<std::size_t>(t)] = lstm_forward(params_.char_bwd, cx_rev);
        }
    }

    tr->v.resize(vdim, n);
    for (int t = 0; t < n; ++t) {
        tr->v.col(t).head(dw) = params_.word_emb.col(tr->word_ids[static_cast<std::size_t>(t)]);
        if (dp > 0)
            tr->v.col(t).segment(dw, dp) =
                params_.pos_emb.col(tr->pos_ids[static_cast<std::size_t>(t)]);
        if (dc > 0) {
            const LstmTrace& cf = tr->char_f[static_cast<std::size_t>(t)];
            const LstmTrace& cb = tr->char_b[static_cast<std::size_t>(t)];
            tr->v.col(t).segment(dw + dp, dc / 2) = cf.h.col(cf.steps() - 1);
            tr->v.col(t).tail(dc / 2) = cb.h.col(cb.steps() - 1);
        }
    }
    if (training && config_.dropout > 0.0) {
        double keep = 1.0 - config_.dropout;
        double scale = 1.0 / keep;
        tr->mask.resize(vdim, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < vdim; ++i) tr->mask(i, j) = rng.bernoulli(keep) ? scale : 0.0;
        tr->v = tr->v.cwiseProduct(tr->mask);
    }

    tr->word_f = lstm_forward(params_.word_fwd, tr->v);
    Eigen::MatrixXd v_rev = tr->v.rowwise().reverse();
    tr->word_b = lstm_forward(params_.word_bwd, v_rev);
    tr->h_w.resize(d1, n);
    tr->h_w.topRows(h1) = tr->word_f.h;
    tr->h_w.bottomRows(h1) = tr->word_b.h.rowwise().reverse();

    // Span dynamic program: one forward recurrence per start position over
    // its admissible window, one backward recurrence per end position.
    tr->span_f.resize(static_cast<std::size_t>(n));
    tr->span_b.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int len = g.chain_len(i);
        tr->span_f[static_cast<std::size_t>(i)] =
            lstm_forward(params_.span_fwd, tr->h_w.middleCols(i, len));
        tr->span_fwd_steps += len;
    }
    const int cap = g.max_mention_len();
    for (int j = 0; j < n; ++j) {
        int len = std::min(cap, j + 1);
        Eigen::MatrixXd back_in(d1, len);
        for (int t = 0; t < len; ++t) back_in.col(t) = tr->h_w.col(j - t);
        tr->span_b[static_cast<std::size_t>(j)] = lstm_forward(params_.span_bwd, back_in);
        tr->span_bwd_steps += len;
    }
    tr->h_s.resize(d2, span_count);
    for (int i = 0; i < n; ++i) {
        int len = g.chain_len(i);
        for (int t = 0; t < len; ++t) {
            std::int32_t idx = g.span_index(i, i + t);
            tr->h_s.col(idx).head(h2) = tr->span_f[static_cast<std::size_t>(i)].h.col(t);
            tr->h_s.col(idx).tail(h2) = tr->span_b[static_cast<std::size_t>(i + t)].h.col(t);
        }
    }

    Eigen::MatrixXd tx_scores = params_.w_tx * tr->h_w;                         // m x n
    Eigen::MatrixXd ti_scores = params_.w_ti * tr->h_w;                         // m x n
    Eigen::MatrixXd ix_scores = params_.w_ix * tr->h_s;                         // m x S
    Eigen::MatrixXd ii_left = params_.w_ii.leftCols(d2) * tr->h_s;              // m x S
    Eigen::MatrixXd ii_right = params_.w_ii.rightCols(d2) * tr->h_s;            // m x S

    ScoredSentence out{EdgeScoreTable(g), {}};
    for (std::int32_t e = 0; e < g.num_edges(); ++e) {
        const HyperedgeId& id = g.edge(e).id;
        switch (id.kind) {
            case EdgeKind::TX:
                out.scores.set_phi(e, tx_scores(id.type, id.start));
                break;
            case EdgeKind::TI:
                out.scores.set_phi(e, ti_scores(id.type, id.start));
                break;
            case EdgeKind::IEnd:
                out.scores.set_phi(e, ix_scores(id.type, g.span_index(id.start, id.end)));
                break;
            case EdgeKind::IContinue: {
                std::int32_t idx = g.span_index(id.start, id.end);
                std::int32_t next = g.span_index(id.start, id.end + 1);
                out.scores.set_phi(e, ii_left(id.type, idx) + ii_right(id.type, next));
                break;
            }
            case EdgeKind::IBoth: {
                std::int32_t idx = g.span_index(id.start, id.end);
                std::int32_t next = g.span_index(id.start, id.end + 1);
                out.scores.set_phi(e, ii_left(id.type, idx) + ii_right(id.type, next) +
                                          ix_scores(id.type, idx));
                break;
            }
            default:
                break;  // spine edges stay 0
        }
    }

    // The graph is borrowed by the hook; callers keep it alive until the
    // hook has run (it is cached process-wide in normal use).
    const SegmentalHypergraph* graph = &g;
    out.backward = [this, tr, graph](const std::vector<double>& dphi) {
        const SegmentalHypergraph& gg = *graph;
        const int nn = gg.sentence_len();
        const int dd1 = config_.word_hidden;
        const int dd2 = config_.span_hidden;
        const int hh1 = dd1 / 2, hh2 = dd2 / 2;
        Eigen::MatrixXd d_hw = Eigen::MatrixXd::Zero(dd1, nn);
        Eigen::MatrixXd d_hs = Eigen::MatrixXd::Zero(dd2, gg.span_count());

        for (std::int32_t e = 0; e < gg.num_edges(); ++e) {
            double d = dphi[static_cast<std::size_t>(e)];
            if (d == 0.0) continue;
            const HyperedgeId& id = gg.edge(e).id;
            switch (id.kind) {
                case EdgeKind::TX:
                    grads_.w_tx.row(id.type) += d * tr->h_w.col(id.start).transpose();
                    d_hw.col(id.start) += d * params_.w_tx.row(id.type).transpose();
                    break;
                case EdgeKind::TI:
                    grads_.w_ti.row(id.type) += d * tr->h_w.col(id.start).transpose();
                    d_hw.col(id.start) += d * params_.w_ti.row(id.type).transpose();
                    break;
                case EdgeKind::IEnd: {
                    std::int32_t idx = gg.span_index(id.start, id.end);
                    grads_.w_ix.row(id.type) += d * tr->h_s.col(idx).transpose();
                    d_hs.col(idx) += d * params_.w_ix.row(id.type).transpose();
                    break;
                }
                case EdgeKind::IContinue:
                case EdgeKind::IBoth: {
                    std::int32_t idx = gg.span_index(id.start, id.end);
                    std::int32_t next = gg.span_index(id.start, id.end + 1);
                    grads_.w_ii.row(id.type).head(dd2) += d * tr->h_s.col(idx).transpose();
                    grads_.w_ii.row(id.type).tail(dd2) += d * tr->h_s.col(next).transpose();
                    d_hs.col(idx) +=
                        d * params_.w_ii.row(id.type).head(dd2).transpose();
                    d_hs.col(next) +=
                        d * params_.w_ii.row(id.type).tail(dd2).transpose();
                    if (id.kind == EdgeKind::IBoth) {
                        grads_.w_ix.row(id.type) += d * tr->h_s.col(idx).transpose();
                        d_hs.col(idx) += d * params_.w_ix.row(id.type).transpose();
                    }
                    break;
                }
                default:
                    break;
            }
        }

        for (int i = 0; i < nn; ++i) {
            int len = gg.chain_len(i);
            Eigen::MatrixXd dh_f(hh2, len);
            for (int t = 0; t < len; ++t)
                dh_f.col(t) = d_hs.col(gg.span_index(i, i + t)).head(hh2);
            Eigen::MatrixXd dx = lstm_backward(params_.span_fwd,
                                               tr->span_f[static_cast<std::size_t>(i)], dh_f,
                                               grads_.span_fwd);
            for (int t = 0; t < len; ++t) d_hw.col(i + t) += dx.col(t);
        }
        const int capc = gg.max_mention_len();
        for (int j = 0; j < nn; ++j) {
            int len = std::min(capc, j + 1);
            Eigen::MatrixXd dh_b(hh2, len);
            for (int t = 0; t < len; ++t)
                dh_b.col(t) = d_hs.col(gg.span_index(j - t, j)).tail(hh2);
            Eigen::MatrixXd dx = lstm_backward(params_.span_bwd,
                                               tr->span_b[static_cast<std::size_t>(j)], dh_b,
                                               grads_.span_bwd);
            for (int t = 0; t < len; ++t) d_hw.col(j - t) += dx.col(t);
        }

        Eigen::MatrixXd dx_f =
            lstm_backward(params_.word_fwd, tr->word_f, d_hw.topRows(hh1), grads_.word_fwd);
        Eigen::MatrixXd dh_wb = d_hw.bottomRows(hh1).rowwise().reverse();
        Eigen::MatrixXd dx_b = lstm_backward(params_.word_bwd, tr->word_b, dh_wb,
                                             grads_.word_bwd);
        Eigen::MatrixXd dv = dx_f + dx_b.rowwise().reverse();
        if (tr->mask.size() > 0) dv = dv.cwiseProduct(tr->mask);

        const int ddw = config_.word_dim;
        const int ddp = config_.use_pos ? config_.pos_dim : 0;
        const int ddc = config_.use_char ? config_.char_hidden : 0;
        for (int t = 0; t < nn; ++t) {
            grads_.word_emb.col(tr->word_ids[static_cast<std::size_t>(t)]) +=
                dv.col(t).head(ddw);
            if (ddp > 0)
                grads_.pos_emb.col(tr->pos_ids[static_cast<std::size_t>(t)]) +=
                    dv.col(t).segment(ddw, ddp);
            if (ddc > 0) {
                const auto& ids = tr->char_ids[static_cast<std::size_t>(t)];
                auto len = static_cast<Eigen::Index>(ids.size());
                int hc = ddc / 2;
                Eigen::MatrixXd dch = Eigen::MatrixXd::Zero(hc, len);
                dch.col(len - 1) = dv.col(t).segment(ddw + ddp, hc);
                Eigen::MatrixXd dcx = lstm_backward(params_.char_fwd,
                                                    tr->char_f[static_cast<std::size_t>(t)],
                                                    dch, grads_.char_fwd);
                dch.col(len - 1) = dv.col(t).tail(hc);
                Eigen::MatrixXd dcx_rev = lstm_backward(params_.char_bwd,
                                                        tr->char_b[static_cast<std::size_t>(t)],
                                                        dch, grads_.char_bwd);
                for (Eigen::Index p = 0; p < len; ++p) {
                    grads_.char_emb.col(ids[static_cast<std::size_t>(p)]) += dcx.col(p);
                    grads_.char_emb.col(ids[static_cast<std::size_t>(len - 1 - p)]) +=
                        dcx_rev.col(p);
                }
            }
        }
    };

    if (trace_out != nullptr) *trace_out = tr;
    return out;
}

}  // namespace seghyp
