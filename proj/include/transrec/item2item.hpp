#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "transrec/common.hpp"
#include "transrec/eval.hpp"
#include "transrec/features.hpp"
#include "transrec/model_io.hpp"
#include "transrec/ranking_model.hpp"
#include "transrec/rng.hpp"
#include "transrec/training.hpp"

namespace transrec {

// Directed item-to-item edges with an 80/10/10 train/validation/test split.
struct Edge {
    std::uint32_t src;
    std::uint32_t dst;
};

enum class EdgePart : std::uint8_t { Train = 0, Validation = 1, Test = 2 };

struct EdgeDataset {
    std::size_t n_items = 0;
    std::vector<Edge> edges;
    std::vector<std::uint8_t> part;                     // parallel to edges
    std::vector<std::vector<std::uint32_t>> out_links;  // all parts, sorted per src
    std::vector<std::uint32_t> train_edges;             // indices into edges

    bool linked(std::uint32_t src, std::uint32_t dst) const {
        const auto& out = out_links[src];
        return std::binary_search(out.begin(), out.end(), dst);
    }

    std::size_t count(EdgePart p) const {
        std::size_t n = 0;
        for (auto x : part)
            if (x == static_cast<std::uint8_t>(p)) ++n;
        return n;
    }

    void rebuild() {
        out_links.assign(n_items, {});
        train_edges.clear();
        for (std::size_t e = 0; e < edges.size(); ++e) {
            out_links[edges[e].src].push_back(edges[e].dst);
            if (part[e] == static_cast<std::uint8_t>(EdgePart::Train))
                train_edges.push_back(static_cast<std::uint32_t>(e));
        }
        for (auto& out : out_links) {
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
        }
    }
};

// Parses delimited (src_item, dst_item) lines; ids resolve against the
// feature matrix's item map.
inline EdgeDataset load_edges(const std::string& path, const FeatureMatrix& features,
                              char delimiter = '\t') {
    std::unordered_map<std::string_view, std::uint32_t> index;
    for (std::uint32_t i = 0; i < features.item_count(); ++i)
        index.emplace(features.item_ids[i], i);

    const std::string content = detail::read_file_maybe_gzip(path);
    EdgeDataset ds;
    ds.n_items = features.item_count();
    std::size_t pos = 0, line_no = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string_view line(content.data() + pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        const auto fields = detail::split_fields(line, delimiter);
        if (fields.size() < 2 || fields[0].empty() || fields[1].empty())
            throw InputError(path + ":" + std::to_string(line_no) + ": malformed edge line");
        const auto s = index.find(fields[0]);
        const auto d = index.find(fields[1]);
        if (s == index.end() || d == index.end())
            throw InputError(path + ":" + std::to_string(line_no) +
                             ": edge references an item with no features");
        ds.edges.push_back({s->second, d->second});
    }
    ds.part.assign(ds.edges.size(), 0);
    ds.rebuild();
    return ds;
}

// Uniform random 80/10/10 assignment, reproducible from the seed.
inline void assign_edge_split(EdgeDataset& ds, std::uint64_t seed) {
    Rng rng(seed, "edge-split");
    for (std::size_t e = 0; e < ds.edges.size(); ++e) {
        const double u = rng.uniform();
        ds.part[e] = u < 0.8 ? 0 : (u < 0.9 ? 1 : 2);
    }
    ds.rebuild();
}

// Frozen scorer with per-evaluation precomputation (embeddings etc.).
class I2IFrozenScorer {
public:
    virtual ~I2IFrozenScorer() = default;
    virtual void scores_for_head(std::uint32_t head, std::span<double> out) const = 0;
};

// Content-based relation models score directed pairs (i -> j); they plug into
// the generic S-BPR machinery as ranking models that ignore the user slot.
class I2IModelBase : public RankingModel {
public:
    double score(std::uint32_t, std::uint32_t prev, std::uint32_t next) const final {
        return edge_score(prev, next);
    }

    virtual double edge_score(std::uint32_t i, std::uint32_t j) const = 0;
    virtual std::unique_ptr<I2IFrozenScorer> freeze() const = 0;

    const FeatureMatrix& features() const { return *features_; }
    std::shared_ptr<const FeatureMatrix> features_ptr() const { return features_; }

protected:
    I2IModelBase(std::shared_ptr<const FeatureMatrix> features, std::size_t k)
        : RankingModel(0, features->item_count(), k), features_(std::move(features)) {}

    std::shared_ptr<const FeatureMatrix> features_;
};

namespace detail {

// dense = sparse_row scaled into a zeroed buffer; undo with clear_into
inline void add_sparse(std::span<double> dense,
                       const std::vector<std::pair<std::uint32_t, double>>& row) {
    for (const auto& [c, v] : row) dense[c] += v;
}

} // namespace detail

// Translation over a linear feature embedding:
//   score(i -> j) = -|| E f_i + t - E f_j ||^2
// with no constraint on E f (Psi = Phi). Layout: [E (D x K') | t].
class I2ITransRecModel final : public I2IModelBase {
public:
    I2ITransRecModel(std::shared_ptr<const FeatureMatrix> features, std::size_t k)
        : I2IModelBase(std::move(features), k) {
        theta_.assign(features_->dim * k + k, 0.0);
    }

    static I2ITransRecModel random_init(std::shared_ptr<const FeatureMatrix> features,
                                        std::size_t k, Rng& rng) {
        I2ITransRecModel m(std::move(features), k);
        for (std::size_t i = 0; i < m.features_->dim * k; ++i)
            m.theta_[i] = rng.uniform(-0.01, 0.01);
        fill_random_unit_vector(m.translation(), rng);
        return m;
    }

    std::string_view kind() const override { return "i2i-transrec"; }

    std::map<std::string, std::string> settings() const override {
        return {{"feature_dim", std::to_string(features_->dim)}};
    }

    std::span<double> translation() { return block(features_->dim * k_, k_); }
    std::span<const double> translation() const { return block(features_->dim * k_, k_); }

    void embed(std::uint32_t item, std::span<double> out) const {
        std::fill(out.begin(), out.end(), 0.0);
        for (const auto& [d, v] : features_->rows[item]) {
            const double* e_row = theta_.data() + static_cast<std::size_t>(d) * k_;
            for (std::size_t k = 0; k < k_; ++k) out[k] += v * e_row[k];
        }
    }

    double edge_score(std::uint32_t i, std::uint32_t j) const override {
        std::vector<double> a(k_), b(k_);
        embed(i, a);
        embed(j, b);
        const auto t = translation();
        double s = 0.0;
        for (std::size_t k = 0; k < k_; ++k) {
            const double diff = a[k] + t[k] - b[k];
            s += diff * diff;
        }
        return -s;
    }

    void pair_gradient(const Triple& t, std::vector<ParamGrad>& out) const override {
        std::vector<double> a(k_), bp(k_), bn(k_);
        embed(t.prev, a);
        embed(t.pos, bp);
        embed(t.neg, bn);
        const auto tr = translation();

        std::vector<double> g_a(k_), g_bp(k_), g_bn(k_);
        for (std::size_t k = 0; k < k_; ++k) {
            const double dp = a[k] + tr[k] - bp[k];
            const double dn = a[k] + tr[k] - bn[k];
            g_a[k] = -2.0 * dp + 2.0 * dn;
            g_bp[k] = 2.0 * dp;
            g_bn[k] = -2.0 * dn;
            out.push_back({features_->dim * k_ + k, g_a[k], RegClass::Translation});
        }
        auto emit = [&](std::uint32_t item, const std::vector<double>& g) {
            for (const auto& [d, v] : features_->rows[item]) {
                const std::size_t row = static_cast<std::size_t>(d) * k_;
                for (std::size_t k = 0; k < k_; ++k)
                    out.push_back({row + k, v * g[k], RegClass::Embedding});
            }
        };
        emit(t.prev, g_a);
        emit(t.pos, g_bp);
        emit(t.neg, g_bn);
    }

    std::unique_ptr<I2IFrozenScorer> freeze() const override {
        struct Frozen final : I2IFrozenScorer {
            std::vector<double> emb; // n_items x k
            std::vector<double> t;
            std::size_t k;
            void scores_for_head(std::uint32_t head, std::span<double> out) const override {
                const double* a = emb.data() + static_cast<std::size_t>(head) * k;
                for (std::uint32_t j = 0; j < out.size(); ++j) {
                    const double* b = emb.data() + static_cast<std::size_t>(j) * k;
                    double s = 0.0;
                    for (std::size_t x = 0; x < k; ++x) {
                        const double diff = a[x] + t[x] - b[x];
                        s += diff * diff;
                    }
                    out[j] = -s;
                }
            }
        };
        auto f = std::make_unique<Frozen>();
        f->k = k_;
        f->t.assign(translation().begin(), translation().end());
        f->emb.assign(n_items_ * k_, 0.0);
        for (std::uint32_t i = 0; i < n_items_; ++i)
            embed(i, {f->emb.data() + static_cast<std::size_t>(i) * k_, k_});
        return f;
    }
};

// Weighted nearest neighbor in the raw feature space:
//   score(i -> j) = -|| w o (f_i - f_j) ||^2   (Hadamard product)
// Layout: [w (D)]. Weights start at 1 (plain Euclidean).
class WnnModel final : public I2IModelBase {
public:
    explicit WnnModel(std::shared_ptr<const FeatureMatrix> features)
        : I2IModelBase(std::move(features), 0) {
        theta_.assign(features_->dim, 1.0);
    }

    std::string_view kind() const override { return "wnn"; }

    std::map<std::string, std::string> settings() const override {
        return {{"feature_dim", std::to_string(features_->dim)}};
    }

    double edge_score(std::uint32_t i, std::uint32_t j) const override {
        double s = 0.0;
        merge_rows(i, j, [&](std::uint32_t d, double fi, double fj) {
            const double wd = theta_[d] * (fi - fj);
            s += wd * wd;
        });
        return -s;
    }

    void pair_gradient(const Triple& t, std::vector<ParamGrad>& out) const override {
        merge_rows(t.prev, t.pos, [&](std::uint32_t d, double fi, double fj) {
            const double g = fi - fj;
            out.push_back({d, -2.0 * theta_[d] * g * g, RegClass::Embedding});
        });
        merge_rows(t.prev, t.neg, [&](std::uint32_t d, double fi, double fj) {
            const double g = fi - fj;
            out.push_back({d, 2.0 * theta_[d] * g * g, RegClass::Embedding});
        });
    }

    std::unique_ptr<I2IFrozenScorer> freeze() const override {
        struct Frozen final : I2IFrozenScorer {
            const WnnModel* model;
            void scores_for_head(std::uint32_t head, std::span<double> out) const override {
                for (std::uint32_t j = 0; j < out.size(); ++j)
                    out[j] = model->edge_score(head, j);
            }
        };
        auto f = std::make_unique<Frozen>();
        f->model = this;
        return f;
    }

private:
    template <typename Fn>
    void merge_rows(std::uint32_t i, std::uint32_t j, Fn&& fn) const {
        const auto& a = features_->rows[i];
        const auto& b = features_->rows[j];
        std::size_t x = 0, y = 0;
        while (x < a.size() || y < b.size()) {
            if (y == b.size() || (x < a.size() && a[x].first < b[y].first)) {
                fn(a[x].first, a[x].second, 0.0);
                ++x;
            } else if (x == a.size() || b[y].first < a[x].first) {
                fn(b[y].first, 0.0, b[y].second);
                ++y;
            } else {
                fn(a[x].first, a[x].second, b[y].second);
                ++x;
                ++y;
            }
        }
    }
};

// Low-rank Mahalanobis transform:
//   score(i -> j) = -|| W f_i - W f_j ||^2
// symmetric in (i, j) by construction. Layout: [W (K' x D), row-major by k].
class LmtModel final : public I2IModelBase {
public:
    LmtModel(std::shared_ptr<const FeatureMatrix> features, std::size_t k)
        : I2IModelBase(std::move(features), k) {
        theta_.assign(k * features_->dim, 0.0);
    }

    static LmtModel random_init(std::shared_ptr<const FeatureMatrix> features, std::size_t k,
                                Rng& rng) {
        LmtModel m(std::move(features), k);
        for (double& x : m.theta_) x = rng.uniform(-0.01, 0.01);
        return m;
    }

    std::string_view kind() const override { return "lmt"; }

    std::map<std::string, std::string> settings() const override {
        return {{"feature_dim", std::to_string(features_->dim)}};
    }

    void transform(std::uint32_t item, std::span<double> out) const {
        const std::size_t dim = features_->dim;
        for (std::size_t k = 0; k < k_; ++k) {
            double s = 0.0;
            const double* w_row = theta_.data() + k * dim;
            for (const auto& [d, v] : features_->rows[item]) s += w_row[d] * v;
            out[k] = s;
        }
    }

    double edge_score(std::uint32_t i, std::uint32_t j) const override {
        std::vector<double> vi(k_), vj(k_);
        transform(i, vi);
        transform(j, vj);
        return -squared_l2_distance(vi, vj);
    }

    void pair_gradient(const Triple& t, std::vector<ParamGrad>& out) const override {
        std::vector<double> vi(k_), vp(k_), vn(k_);
        transform(t.prev, vi);
        transform(t.pos, vp);
        transform(t.neg, vn);
        const std::size_t dim = features_->dim;
        for (std::size_t k = 0; k < k_; ++k) {
            const double gp = vi[k] - vp[k]; // W(f_i - f_pos), coordinate k
            const double gn = vi[k] - vn[k];
            // d delta / d W[k,d] = -2 gp (f_i - f_pos)_d + 2 gn (f_i - f_neg)_d
            for (const auto& [d, v] : features_->rows[t.prev])
                out.push_back({k * dim + d, (-2.0 * gp + 2.0 * gn) * v, RegClass::Embedding});
            for (const auto& [d, v] : features_->rows[t.pos])
                out.push_back({k * dim + d, 2.0 * gp * v, RegClass::Embedding});
            for (const auto& [d, v] : features_->rows[t.neg])
                out.push_back({k * dim + d, -2.0 * gn * v, RegClass::Embedding});
        }
    }

    std::unique_ptr<I2IFrozenScorer> freeze() const override {
        struct Frozen final : I2IFrozenScorer {
            std::vector<double> proj; // n_items x k
            std::size_t k;
            void scores_for_head(std::uint32_t head, std::span<double> out) const override {
                const double* a = proj.data() + static_cast<std::size_t>(head) * k;
                for (std::uint32_t j = 0; j < out.size(); ++j) {
                    const double* b = proj.data() + static_cast<std::size_t>(j) * k;
                    double s = 0.0;
                    for (std::size_t x = 0; x < k; ++x) {
                        const double diff = a[x] - b[x];
                        s += diff * diff;
                    }
                    out[j] = -s;
                }
            }
        };
        auto f = std::make_unique<Frozen>();
        f->k = k_;
        f->proj.assign(n_items_ * k_, 0.0);
        for (std::uint32_t i = 0; i < n_items_; ++i)
            transform(i, {f->proj.data() + static_cast<std::size_t>(i) * k_, k_});
        return f;
    }
};

inline std::unique_ptr<I2IModelBase> make_i2i_model(const std::string& kind,
                                                    std::shared_ptr<const FeatureMatrix> features,
                                                    std::size_t k, Rng& rng) {
    if (kind == "i2i-transrec" || kind == "transrec")
        return std::make_unique<I2ITransRecModel>(
            I2ITransRecModel::random_init(std::move(features), k, rng));
    if (kind == "wnn") return std::make_unique<WnnModel>(std::move(features));
    if (kind == "lmt")
        return std::make_unique<LmtModel>(LmtModel::random_init(std::move(features), k, rng));
    throw InputError("unknown item-to-item model kind: " + kind);
}

inline std::unique_ptr<I2IModelBase> instantiate_i2i(const SavedModel& saved,
                                                     std::shared_ptr<const FeatureMatrix> features) {
    if (features->item_count() != saved.n_items)
        throw InputError("feature matrix has " + std::to_string(features->item_count()) +
                         " items but the model was trained with " + std::to_string(saved.n_items));
    const auto dim_it = saved.settings.find("feature_dim");
    if (dim_it != saved.settings.end() &&
        static_cast<std::size_t>(std::stoull(dim_it->second)) != features->dim)
        throw InputError("feature dimensionality mismatch: model expects " + dim_it->second +
                         ", features have " + std::to_string(features->dim));

    std::unique_ptr<I2IModelBase> model;
    if (saved.kind == "i2i-transrec")
        model = std::make_unique<I2ITransRecModel>(std::move(features), saved.k);
    else if (saved.kind == "wnn")
        model = std::make_unique<WnnModel>(std::move(features));
    else if (saved.kind == "lmt")
        model = std::make_unique<LmtModel>(std::move(features), saved.k);
    else
        throw InputError("unknown item-to-item model kind: " + saved.kind);
    if (model->raw_params().size() != saved.params.size())
        throw InputError("model file parameter count does not match kind '" + saved.kind + "'");
    model->raw_params() = saved.params;
    return model;
}

// Held-out edge evaluation: rank the true tail against every item not linked
// from the head (in any split), then average AUC / Hit@K over edges.
inline EvalReport eval_i2i(const I2IModelBase& model, const EdgeDataset& ds, EdgePart part,
                           std::size_t hit_k = 10, unsigned threads = 0) {
    std::vector<std::uint32_t> targets;
    for (std::size_t e = 0; e < ds.edges.size(); ++e)
        if (ds.part[e] == static_cast<std::uint8_t>(part))
            targets.push_back(static_cast<std::uint32_t>(e));
    if (targets.empty()) throw InputError("eval_i2i: no edges in the requested split");

    const auto scorer = model.freeze();
    const std::size_t n_items = ds.n_items;

    struct Row {
        double auc_strict, auc_half;
        std::size_t rank;
        bool valid;
    };
    std::vector<Row> rows(targets.size());
    detail::parallel_over_users(targets.size(), threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> scores(n_items);
        for (std::size_t x = lo; x < hi; ++x) {
            const Edge edge = ds.edges[targets[x]];
            scorer->scores_for_head(edge.src, scores);
            const double truth = scores[edge.dst];
            const auto& linked = ds.out_links[edge.src];
            std::size_t li = 0, better = 0, tied = 0, candidates = 0;
            for (std::uint32_t j = 0; j < n_items; ++j) {
                while (li < linked.size() && linked[li] < j) ++li;
                if (li < linked.size() && linked[li] == j) continue; // an observed tail
                ++candidates;
                if (scores[j] > truth)
                    ++better;
                else if (scores[j] == truth)
                    ++tied;
            }
            Row r{};
            r.valid = candidates > 0;
            if (r.valid) {
                const std::size_t worse = candidates - better - tied;
                r.auc_strict = double(worse) / double(candidates);
                r.auc_half = (double(worse) + 0.5 * double(tied)) / double(candidates);
                r.rank = 1 + better + tied;
            }
            rows[x] = r;
        }
    });

    EvalReport rep;
    rep.hit_k = hit_k;
    double auc_sum = 0.0, half_sum = 0.0;
    std::size_t hits = 0;
    for (const auto& r : rows) {
        if (!r.valid) continue;
        ++rep.users_evaluated;
        auc_sum += r.auc_strict;
        half_sum += r.auc_half;
        if (r.rank <= hit_k) ++hits;
    }
    if (rep.users_evaluated == 0) throw InputError("eval_i2i: no edge had any candidate");
    rep.auc = auc_sum / double(rep.users_evaluated);
    rep.auc_ties_half = half_sum / double(rep.users_evaluated);
    rep.hit_rate = double(hits) / double(rep.users_evaluated);
    return rep;
}

// Training task over the edge split; negatives are uniform over items with no
// observed out-edge from the head in any split.
class EdgeTask {
public:
    explicit EdgeTask(const EdgeDataset& ds, std::size_t validation_hit_k = 10,
                      unsigned eval_threads = 0)
        : ds_(&ds), hit_k_(validation_hit_k), eval_threads_(eval_threads) {
        if (ds.train_edges.empty()) throw InputError("EdgeTask: no training edges");
    }

    std::size_t default_samples_per_iteration() const { return ds_->train_edges.size(); }

    Triple sample(Rng& rng) const {
        const auto e = ds_->edges[ds_->train_edges[rng.uniform_index(ds_->train_edges.size())]];
        if (ds_->out_links[e.src].size() >= ds_->n_items)
            throw InputError("EdgeTask: head item links to every item; no negative exists");
        Triple t{};
        t.user = 0;
        t.prev = e.src;
        t.pos = e.dst;
        do {
            t.neg = static_cast<std::uint32_t>(rng.uniform_index(ds_->n_items));
        } while (ds_->linked(e.src, t.neg));
        return t;
    }

    double validation_metric(const RankingModel& model) const {
        const auto& i2i = dynamic_cast<const I2IModelBase&>(model);
        return eval_i2i(i2i, *ds_, EdgePart::Validation, hit_k_, eval_threads_).auc;
    }

private:
    const EdgeDataset* ds_;
    std::size_t hit_k_;
    unsigned eval_threads_;
};

inline FitReport train_i2i(I2IModelBase& model, const EdgeDataset& edges,
                           const TrainConfig& cfg) {
    return fit(model, EdgeTask(edges, 10, cfg.eval_threads), cfg);
}

} // namespace transrec
