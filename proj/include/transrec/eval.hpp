#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

#include "transrec/common.hpp"
#include "transrec/dataset.hpp"
#include "transrec/ranking_model.hpp"

namespace transrec {

enum class EvalSplit { Validation, Test };

struct UserRank {
    std::uint32_t user;
    std::size_t rank;       // pessimistic: ties count against the ground truth
    std::size_t candidates; // |I \ S^u| + 1
};

struct EvalReport {
    double auc = 0.0;           // strict indicator, ties contribute 0
    double auc_ties_half = 0.0; // ties contribute 0.5
    double hit_rate = 0.0;
    std::size_t hit_k = 50;
    std::size_t users_evaluated = 0;
    std::vector<UserRank> ranks; // filled when requested
};

struct EvalOptions {
    std::size_t hit_k = 50;
    bool collect_ranks = false;
    unsigned threads = 0; // 0 = hardware concurrency
};

namespace detail {

struct PerUserEval {
    double auc_strict;
    double auc_half;
    std::size_t rank;
    std::size_t candidates;
    bool valid;
};

// Ranks the held-out item against every item outside S^u. Single pass:
// count candidates scoring strictly above / tied with the ground truth.
inline PerUserEval eval_user(const RankingModel& model, const SequenceDataset& ds,
                             std::uint32_t u, EvalSplit split,
                             std::vector<double>& score_buf, std::vector<char>& seen_buf) {
    const std::uint32_t context =
        split == EvalSplit::Test ? ds.test_context(u) : ds.validation_context(u);
    const std::uint32_t truth =
        split == EvalSplit::Test ? ds.test_item(u) : ds.validation_item(u);

    const std::size_t n_items = ds.item_count();
    model.scores_for_context(u, context, {score_buf.data(), n_items});

    for (auto i : ds.user_items[u]) seen_buf[i] = 1;
    const double truth_score = score_buf[truth];
    std::size_t better = 0, tied = 0, n_candidates = 0;
    for (std::uint32_t j = 0; j < n_items; ++j) {
        if (seen_buf[j]) continue;
        ++n_candidates;
        if (score_buf[j] > truth_score)
            ++better;
        else if (score_buf[j] == truth_score)
            ++tied;
    }
    for (auto i : ds.user_items[u]) seen_buf[i] = 0;

    PerUserEval r{};
    r.candidates = n_candidates + 1; // the ground truth itself is a candidate
    r.valid = n_candidates > 0;
    if (!r.valid) return r;
    const std::size_t worse = n_candidates - better - tied;
    r.auc_strict = static_cast<double>(worse) / static_cast<double>(n_candidates);
    r.auc_half = (static_cast<double>(worse) + 0.5 * static_cast<double>(tied)) /
                 static_cast<double>(n_candidates);
    r.rank = 1 + better + tied;
    return r;
}

template <typename Fn>
inline void parallel_over_users(std::size_t n_users, unsigned threads, Fn&& fn) {
    unsigned n_threads = threads != 0 ? threads : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min<unsigned>(n_threads, 16);
    if (n_threads <= 1 || n_users < 64) {
        fn(std::size_t{0}, n_users);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_users + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
        const std::size_t lo = std::min<std::size_t>(t * chunk, n_users);
        const std::size_t hi = std::min<std::size_t>(lo + chunk, n_users);
        if (lo < hi) pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

} // namespace detail

// Leave-one-out ranking evaluation: per-user rank of the held-out item among
// {truth} U (I \ S^u), averaged into AUC (strict and tie-aware) and Hit@K.
// Parallel over users; the reduction order is fixed, so results are
// independent of thread count.
inline EvalReport evaluate(const RankingModel& model, const SequenceDataset& ds,
                           EvalSplit split, const EvalOptions& opts = {}) {
    if (!ds.has_split) throw InputError("evaluate: dataset has no leave-one-out split");
    const std::size_t n_users = ds.user_count();
    const std::size_t n_items = ds.item_count();

    std::vector<detail::PerUserEval> rows(n_users);
    detail::parallel_over_users(n_users, opts.threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> score_buf(n_items);
        std::vector<char> seen_buf(n_items, 0);
        for (std::size_t u = lo; u < hi; ++u)
            rows[u] = detail::eval_user(model, ds, static_cast<std::uint32_t>(u), split,
                                        score_buf, seen_buf);
    });

    EvalReport rep;
    rep.hit_k = opts.hit_k;
    double auc_sum = 0.0, half_sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t u = 0; u < n_users; ++u) {
        const auto& r = rows[u];
        if (!r.valid) continue;
        ++rep.users_evaluated;
        auc_sum += r.auc_strict;
        half_sum += r.auc_half;
        if (r.rank <= opts.hit_k) ++hits;
        if (opts.collect_ranks)
            rep.ranks.push_back({static_cast<std::uint32_t>(u), r.rank, r.candidates});
    }
    if (rep.users_evaluated == 0) throw InputError("evaluate: no user had any candidate item");
    rep.auc = auc_sum / static_cast<double>(rep.users_evaluated);
    rep.auc_ties_half = half_sum / static_cast<double>(rep.users_evaluated);
    rep.hit_rate = static_cast<double>(hits) / static_cast<double>(rep.users_evaluated);
    return rep;
}

// Pessimistic rank of the held-out item for one user.
inline std::size_t rank_of_ground_truth(const RankingModel& model, const SequenceDataset& ds,
                                        std::uint32_t u, EvalSplit split) {
    if (!ds.has_split) throw InputError("rank_of_ground_truth: dataset has no split");
    if (u >= ds.user_count()) throw InputError("rank_of_ground_truth: invalid user index");
    std::vector<double> score_buf(ds.item_count());
    std::vector<char> seen_buf(ds.item_count(), 0);
    const auto r = detail::eval_user(model, ds, u, split, score_buf, seen_buf);
    if (!r.valid)
        throw InputError("rank_of_ground_truth: user " + std::to_string(u) +
                         " has no candidate item");
    return r.rank;
}

inline double auc(const RankingModel& model, const SequenceDataset& ds, EvalSplit split,
                  unsigned threads = 0) {
    EvalOptions opts;
    opts.threads = threads;
    return evaluate(model, ds, split, opts).auc;
}

inline double hit_at_k(const RankingModel& model, const SequenceDataset& ds, EvalSplit split,
                       std::size_t k = 50, unsigned threads = 0) {
    EvalOptions opts;
    opts.hit_k = k;
    opts.threads = threads;
    return evaluate(model, ds, split, opts).hit_rate;
}

} // namespace transrec
