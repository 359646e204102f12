#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "transrec/dataset.hpp"
#include "transrec/eval.hpp"
#include "transrec/ranking_model.hpp"
#include "transrec/rng.hpp"

namespace transrec {

struct TrainConfig {
    double learning_rate = 0.05;
    double lambda = 0.0; // shared default across parameter classes
    std::optional<double> lambda_bias;
    std::optional<double> lambda_embedding;
    std::optional<double> lambda_translation;
    std::size_t k = 10;
    std::size_t max_iterations = 100;
    std::size_t samples_per_iteration = 0; // 0 = one nominal epoch (task default)
    std::size_t patience = 10;             // validation checks without improvement
    std::uint64_t seed = 42;
    unsigned eval_threads = 0;

    Regularization regularization() const {
        Regularization r = Regularization::uniform(lambda);
        if (lambda_bias) r.bias = *lambda_bias;
        if (lambda_embedding) r.embedding = *lambda_embedding;
        if (lambda_translation) r.translation = *lambda_translation;
        return r;
    }
};

struct IterationRow {
    std::size_t iteration;
    double mean_loglik;
    double validation_auc;
    double seconds;
};

struct FitReport {
    std::vector<IterationRow> rows;
    double best_validation_auc = 0.0;
    std::size_t best_iteration = 0; // 0 = the initial parameters won
    std::size_t samples_per_iteration = 0;
};

// Uniformly samples a user, then a positive transition inside the user's
// training prefix, then a negative item outside S^u by rejection. Users
// without a trainable transition are resampled.
inline Triple sample_triple(const SequenceDataset& ds, Rng& rng) {
    const std::size_t n_users = ds.user_count();
    const std::size_t n_items = ds.item_count();

    std::size_t guard = 0;
    const std::size_t guard_limit = 100 * n_users + 1000;
    while (true) {
        if (++guard > guard_limit)
            throw InputError("sample_triple: no user has a trainable transition");
        const auto u = static_cast<std::uint32_t>(rng.uniform_index(n_users));
        const std::size_t n_trans = ds.train_transitions(u);
        if (n_trans == 0) continue;

        if (ds.user_items[u].size() >= n_items)
            throw InputError("sample_triple: user " + std::to_string(u) +
                             " has interacted with every item; no negative exists");

        // positive at sequence position p in [1, n-3]; predecessor precedes it
        const std::size_t p = 1 + rng.uniform_index(n_trans);
        const auto& seq = ds.sequences[u];
        Triple t{};
        t.user = u;
        t.prev = seq[p - 1];
        t.pos = seq[p];
        do {
            t.neg = static_cast<std::uint32_t>(rng.uniform_index(n_items));
        } while (ds.user_has(u, t.neg));
        return t;
    }
}

// ln sigma(p_pos - p_neg), stable for large |delta|
inline double pairwise_loglik(const RankingModel& model, const Triple& t) {
    return log_sigmoid(model.score(t.user, t.prev, t.pos) -
                       model.score(t.user, t.prev, t.neg));
}

// Exact S-BPR objective by full enumeration over users, training transitions
// and all negatives. O(|U| * |S| * |I|): test-scale verification only.
inline double sbpr_objective(const RankingModel& model, const SequenceDataset& ds,
                             double lambda) {
    double total = 0.0;
    const std::size_t n_items = ds.item_count();
    for (std::uint32_t u = 0; u < ds.user_count(); ++u) {
        const auto& seq = ds.sequences[u];
        const std::size_t n_trans = ds.train_transitions(u);
        for (std::size_t p = 1; p <= n_trans; ++p) {
            const double pos_score = model.score(u, seq[p - 1], seq[p]);
            for (std::uint32_t neg = 0; neg < n_items; ++neg) {
                if (ds.user_has(u, neg)) continue;
                total += log_sigmoid(pos_score - model.score(u, seq[p - 1], neg));
            }
        }
    }
    double sq = 0.0;
    for (double x : model.raw_params()) sq += x * x;
    return total - lambda * sq;
}

// Training task over a split sequence dataset.
class SequentialTask {
public:
    explicit SequentialTask(const SequenceDataset& ds, unsigned eval_threads = 0)
        : ds_(&ds), eval_threads_(eval_threads) {
        if (!ds.has_split) throw InputError("training requires a split dataset");
    }

    std::size_t default_samples_per_iteration() const {
        return ds_->train_transition_count();
    }

    Triple sample(Rng& rng) const { return sample_triple(*ds_, rng); }

    double validation_metric(const RankingModel& model) const {
        return auc(model, *ds_, EvalSplit::Validation, eval_threads_);
    }

    const SequenceDataset& dataset() const { return *ds_; }

private:
    const SequenceDataset* ds_;
    unsigned eval_threads_;
};

// Stochastic gradient ascent with early stopping: each iteration runs
// samples_per_iteration updates, then checks validation AUC. The best
// snapshot is kept and restored at the end. Deterministic given the seed.
template <typename Task>
FitReport fit(RankingModel& model, const Task& task, const TrainConfig& cfg) {
    FitReport report;
    if (!model.trainable() || cfg.max_iterations == 0) return report;

    const std::size_t samples = cfg.samples_per_iteration != 0
                                    ? cfg.samples_per_iteration
                                    : task.default_samples_per_iteration();
    if (samples == 0) throw InputError("fit: no training samples available");
    report.samples_per_iteration = samples;

    const Regularization reg = cfg.regularization();
    Rng rng(cfg.seed, "sample");

    std::vector<double> best = model.raw_params();
    double best_auc = task.validation_metric(model);
    std::size_t best_iter = 0;
    std::size_t stale = 0;

    for (std::size_t iter = 1; iter <= cfg.max_iterations; ++iter) {
        const auto t0 = std::chrono::steady_clock::now();
        double loglik_sum = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            const Triple t = task.sample(rng);
            const double delta = model.sbpr_update(t, cfg.learning_rate, reg);
            loglik_sum += log_sigmoid(delta);
        }
        if (!model.params_finite())
            throw NumericError("fit: non-finite parameter after iteration " +
                               std::to_string(iter) + " (kind=" + std::string(model.kind()) +
                               ", lr=" + std::to_string(cfg.learning_rate) + ")");

        const double val = task.validation_metric(model);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report.rows.push_back({iter, loglik_sum / static_cast<double>(samples), val, secs});

        if (val > best_auc) {
            best_auc = val;
            best = model.raw_params();
            best_iter = iter;
            stale = 0;
        } else if (++stale >= cfg.patience) {
            break;
        }
    }

    model.raw_params() = best;
    report.best_validation_auc = best_auc;
    report.best_iteration = best_iter;
    return report;
}

} // namespace transrec
