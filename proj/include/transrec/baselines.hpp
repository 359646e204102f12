#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "transrec/dataset.hpp"
#include "transrec/ranking_model.hpp"
#include "transrec/rng.hpp"

namespace transrec {

namespace detail {

inline void fill_small_uniform(std::span<double> v, Rng& rng) {
    for (double& x : v) x = rng.uniform(-0.01, 0.01);
}

} // namespace detail

// Popularity ranking: score is the item's training-split frequency,
// independent of user and context. Nothing to train.
class PopRecModel final : public RankingModel {
public:
    PopRecModel(std::size_t n_users, std::size_t n_items)
        : RankingModel(n_users, n_items, 0) {
        theta_.assign(n_items, 0.0);
    }

    static PopRecModel from_training_counts(const SequenceDataset& ds) {
        PopRecModel m(ds.user_count(), ds.item_count());
        for (std::uint32_t u = 0; u < ds.user_count(); ++u) {
            const auto& seq = ds.sequences[u];
            const std::size_t train_len = ds.has_split ? seq.size() - 2 : seq.size();
            for (std::size_t p = 0; p < train_len; ++p) m.theta_[seq[p]] += 1.0;
        }
        return m;
    }

    std::string_view kind() const override { return "poprec"; }
    bool trainable() const override { return false; }

    double score(std::uint32_t, std::uint32_t, std::uint32_t next) const override {
        return theta_[next];
    }

    void pair_gradient(const Triple&, std::vector<ParamGrad>&) const override {}
};

// Matrix factorization under BPR: <M_u, N_j> plus an optional item bias;
// sequentially unaware by construction.
// Layout: [beta? | M (U x K) | N (I x K)].
class BprMfModel final : public RankingModel {
public:
    BprMfModel(std::size_t n_users, std::size_t n_items, std::size_t k, bool use_bias = true)
        : RankingModel(n_users, n_items, k), use_bias_(use_bias) {
        theta_.assign((use_bias ? n_items : 0) + (n_users + n_items) * k, 0.0);
    }

    static BprMfModel random_init(std::size_t n_users, std::size_t n_items, std::size_t k,
                                  Rng& rng, bool use_bias = true) {
        BprMfModel m(n_users, n_items, k, use_bias);
        detail::fill_small_uniform(m.block(m.m_off(), (n_users + n_items) * k), rng);
        return m;
    }

    std::string_view kind() const override { return "bprmf"; }

    std::map<std::string, std::string> settings() const override {
        return {{"use_bias", use_bias_ ? "1" : "0"}};
    }

    std::span<const double> user_factors(std::uint32_t u) const { return block(m_off() + u * k_, k_); }
    std::span<const double> item_factors(std::uint32_t j) const { return block(n_off() + j * k_, k_); }

    double score(std::uint32_t u, std::uint32_t, std::uint32_t next) const override {
        const double bias = use_bias_ ? theta_[next] : 0.0;
        return bias + dot(user_factors(u), item_factors(next));
    }

    void pair_gradient(const Triple& t, std::vector<ParamGrad>& out) const override {
        const auto mu = user_factors(t.user);
        const auto np = item_factors(t.pos);
        const auto nn = item_factors(t.neg);
        if (use_bias_) {
            out.push_back({t.pos, 1.0, RegClass::Bias});
            out.push_back({t.neg, -1.0, RegClass::Bias});
        }
        for (std::size_t k = 0; k < k_; ++k) {
            out.push_back({m_off() + t.user * k_ + k, np[k] - nn[k], RegClass::Embedding});
            out.push_back({n_off() + t.pos * k_ + k, mu[k], RegClass::Embedding});
            out.push_back({n_off() + t.neg * k_ + k, -mu[k], RegClass::Embedding});
        }
    }

    void scores_for_context(std::uint32_t u, std::uint32_t,
                            std::span<double> out) const override {
        const auto mu = user_factors(u);
        for (std::uint32_t j = 0; j < out.size(); ++j)
            out[j] = (use_bias_ ? theta_[j] : 0.0) + dot(mu, item_factors(j));
    }

private:
    std::size_t m_off() const { return use_bias_ ? n_items_ : 0; }
    std::size_t n_off() const { return m_off() + n_users_ * k_; }

    bool use_bias_;
};

// Factorized first-order Markov chain: <P_i, Q_j>, shared by all users.
// Layout: [P (I x K) | Q (I x K)].
class FmcModel final : public RankingModel {
public:
    FmcModel(std::size_t n_users, std::size_t n_items, std::size_t k)
        : RankingModel(n_users, n_items, k) {
        theta_.assign(2 * n_items * k, 0.0);
    }

    static FmcModel random_init(std::size_t n_users, std::size_t n_items, std::size_t k, Rng& rng) {
        FmcModel m(n_users, n_items, k);
        detail::fill_small_uniform(m.theta_, rng);
        return m;
    }

    std::string_view kind() const override { return "fmc"; }

    std::span<const double> prev_factors(std::uint32_t i) const { return block(i * k_, k_); }
    std::span<const double> next_factors(std::uint32_t j) const { return block(q_off() + j * k_, k_); }

    double score(std::uint32_t, std::uint32_t prev, std::uint32_t next) const override {
        return dot(prev_factors(prev), next_factors(next));
    }

    void pair_gradient(const Triple& t, std::vector<ParamGrad>& out) const override {
        const auto pi = prev_factors(t.prev);
        const auto qp = next_factors(t.pos);
        const auto qn = next_factors(t.neg);
        for (std::size_t k = 0; k < k_; ++k) {
            out.push_back({t.prev * k_ + k, qp[k] - qn[k], RegClass::Embedding});
            out.push_back({q_off() + t.pos * k_ + k, pi[k], RegClass::Embedding});
            out.push_back({q_off() + t.neg * k_ + k, -pi[k], RegClass::Embedding});
        }
    }

    void scores_for_context(std::uint32_t, std::uint32_t prev,
                            std::span<double> out) const override {
        const auto pi = prev_factors(prev);
        for (std::uint32_t j = 0; j < out.size(); ++j) out[j] = dot(pi, next_factors(j));
    }

private:
    std::size_t q_off() const { return n_items_ * k_; }
};

// FPMC: sum of the MF and factorized-MC parts, <M_u, N_j> + <P_i, Q_j>.
// Layout: [M (U x K) | N (I x K) | P (I x K) | Q (I x K)].
class FpmcModel final : public RankingModel {
public:
    FpmcModel(std::size_t n_users, std::size_t n_items, std::size_t k)
        : RankingModel(n_users, n_items, k) {
        theta_.assign((n_users + 3 * n_items) * k, 0.0);
    }

    static FpmcModel random_init(std::size_t n_users, std::size_t n_items, std::size_t k, Rng& rng) {
        FpmcModel m(n_users, n_items, k);
        detail::fill_small_uniform(m.theta_, rng);
        return m;
    }

    std::string_view kind() const override { return "fpmc"; }

    std::span<const double> user_factors(std::uint32_t u) const { return block(u * k_, k_); }
    std::span<const double> item_factors(std::uint32_t j) const { return block(n_off() + j * k_, k_); }
    std::span<const double> prev_factors(std::uint32_t i) const { return block(p_off() + i * k_, k_); }
    std::span<const double> next_factors(std::uint32_t j) const { return block(q_off() + j * k_, k_); }

    double score(std::uint32_t u, std::uint32_t prev, std::uint32_t next) const override {
        return dot(user_factors(u), item_factors(next)) +
               dot(prev_factors(prev), next_factors(next));
    }

    void pair_gradient(const Triple& t, std::vector<ParamGrad>& out) const override {
        const auto mu = user_factors(t.user);
        const auto np = item_factors(t.pos);
        const auto nn = item_factors(t.neg);
        const auto pi = prev_factors(t.prev);
        const auto qp = next_factors(t.pos);
        const auto qn = next_factors(t.neg);
        for (std::size_t k = 0; k < k_; ++k) {
            out.push_back({t.user * k_ + k, np[k] - nn[k], RegClass::Embedding});
            out.push_back({n_off() + t.pos * k_ + k, mu[k], RegClass::Embedding});
            out.push_back({n_off() + t.neg * k_ + k, -mu[k], RegClass::Embedding});
            out.push_back({p_off() + t.prev * k_ + k, qp[k] - qn[k], RegClass::Embedding});
            out.push_back({q_off() + t.pos * k_ + k, pi[k], RegClass::Embedding});
            out.push_back({q_off() + t.neg * k_ + k, -pi[k], RegClass::Embedding});
        }
    }

    void scores_for_context(std::uint32_t u, std::uint32_t prev,
                            std::span<double> out) const override {
        const auto mu = user_factors(u);
        const auto pi = prev_factors(prev);
        for (std::uint32_t j = 0; j < out.size(); ++j)
            out[j] = dot(mu, item_factors(j)) + dot(pi, next_factors(j));
    }

private:
    std::size_t n_off() const { return n_users_ * k_; }
    std::size_t p_off() const { return (n_users_ + n_items_) * k_; }
    std::size_t q_off() const { return (n_users_ + 2 * n_items_) * k_; }
};

// PRME: two squared-L2 metric spaces blended by alpha,
//   -(alpha * ||M_u - N_j||^2 + (1 - alpha) * ||P_i - P_j||^2).
// Layout: [M (U x K) | N (I x K) | P (I x K)].
class PrmeModel final : public RankingModel {
public:
    PrmeModel(std::size_t n_users, std::size_t n_items, std::size_t k, double alpha)
        : RankingModel(n_users, n_items, k), alpha_(alpha) {
        theta_.assign((n_users + 2 * n_items) * k, 0.0);
    }

    // points start as unit directions, like the translation model
    static PrmeModel random_init(std::size_t n_users, std::size_t n_items, std::size_t k,
                                 double alpha, Rng& rng) {
        PrmeModel m(n_users, n_items, k, alpha);
        for (std::size_t u = 0; u < n_users; ++u)
            fill_random_unit_vector(m.block(u * k, k), rng);
        for (std::size_t j = 0; j < n_items; ++j)
            fill_random_unit_vector(m.block(m.n_off() + j * k, k), rng);
        for (std::size_t i = 0; i < n_items; ++i)
            fill_random_unit_vector(m.block(m.p_off() + i * k, k), rng);
        return m;
    }

    std::string_view kind() const override { return "prme"; }
    double alpha() const { return alpha_; }

    std::map<std::string, std::string> settings() const override {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", alpha_);
        return {{"alpha", buf}};
    }

    std::span<const double> user_point(std::uint32_t u) const { return block(u * k_, k_); }
    std::span<const double> item_point(std::uint32_t j) const { return block(n_off() + j * k_, k_); }
    std::span<const double> seq_point(std::uint32_t i) const { return block(p_off() + i * k_, k_); }

    double score(std::uint32_t u, std::uint32_t prev, std::uint32_t next) const override {
        return -(alpha_ * squared_l2_distance(user_point(u), item_point(next)) +
                 (1.0 - alpha_) * squared_l2_distance(seq_point(prev), seq_point(next)));
    }

    void pair_gradient(const Triple& t, std::vector<ParamGrad>& out) const override {
        const auto mu = user_point(t.user);
        const auto np = item_point(t.pos);
        const auto nn = item_point(t.neg);
        const auto pi = seq_point(t.prev);
        const auto pp = seq_point(t.pos);
        const auto pn = seq_point(t.neg);
        const double b = 1.0 - alpha_;
        for (std::size_t k = 0; k < k_; ++k) {
            const double a_pos = mu[k] - np[k];
            const double a_neg = mu[k] - nn[k];
            const double c_pos = pi[k] - pp[k];
            const double c_neg = pi[k] - pn[k];
            out.push_back({t.user * k_ + k, 2.0 * alpha_ * (a_neg - a_pos), RegClass::Embedding});
            out.push_back({n_off() + t.pos * k_ + k, 2.0 * alpha_ * a_pos, RegClass::Embedding});
            out.push_back({n_off() + t.neg * k_ + k, -2.0 * alpha_ * a_neg, RegClass::Embedding});
            out.push_back({p_off() + t.prev * k_ + k, 2.0 * b * (c_neg - c_pos), RegClass::Embedding});
            out.push_back({p_off() + t.pos * k_ + k, 2.0 * b * c_pos, RegClass::Embedding});
            out.push_back({p_off() + t.neg * k_ + k, -2.0 * b * c_neg, RegClass::Embedding});
        }
    }

    void scores_for_context(std::uint32_t u, std::uint32_t prev,
                            std::span<double> out) const override {
        const auto mu = user_point(u);
        const auto pi = seq_point(prev);
        for (std::uint32_t j = 0; j < out.size(); ++j)
            out[j] = -(alpha_ * squared_l2_distance(mu, item_point(j)) +
                       (1.0 - alpha_) * squared_l2_distance(pi, seq_point(j)));
    }

private:
    std::size_t n_off() const { return n_users_ * k_; }
    std::size_t p_off() const { return (n_users_ + n_items_) * k_; }

    double alpha_;
};

enum class HrmPooling : std::uint8_t { Average, Max };

// HRM: the user and previous-item representations are pooled elementwise
// before the inner product with the next item, <pool(M_u, N_i), N_j>.
// Layout: [M (U x K) | N (I x K)].
class HrmModel final : public RankingModel {
public:
    HrmModel(std::size_t n_users, std::size_t n_items, std::size_t k, HrmPooling pooling)
        : RankingModel(n_users, n_items, k), pooling_(pooling) {
        theta_.assign((n_users + n_items) * k, 0.0);
    }

    static HrmModel random_init(std::size_t n_users, std::size_t n_items, std::size_t k,
                                HrmPooling pooling, Rng& rng) {
        HrmModel m(n_users, n_items, k, pooling);
        detail::fill_small_uniform(m.theta_, rng);
        return m;
    }

    std::string_view kind() const override {
        return pooling_ == HrmPooling::Average ? "hrm-avg" : "hrm-max";
    }
    HrmPooling pooling() const { return pooling_; }

    std::map<std::string, std::string> settings() const override {
        return {{"pooling", pooling_ == HrmPooling::Average ? "avg" : "max"}};
    }

    std::span<const double> user_factors(std::uint32_t u) const { return block(u * k_, k_); }
    std::span<const double> item_factors(std::uint32_t j) const { return block(n_off() + j * k_, k_); }

    double score(std::uint32_t u, std::uint32_t prev, std::uint32_t next) const override {
        const auto mu = user_factors(u);
        const auto ni = item_factors(prev);
        const auto nj = item_factors(next);
        double s = 0.0;
        if (pooling_ == HrmPooling::Average) {
            for (std::size_t k = 0; k < k_; ++k) s += 0.5 * (mu[k] + ni[k]) * nj[k];
        } else {
            for (std::size_t k = 0; k < k_; ++k) s += std::max(mu[k], ni[k]) * nj[k];
        }
        return s;
    }

    void pair_gradient(const Triple& t, std::vector<ParamGrad>& out) const override {
        const auto mu = user_factors(t.user);
        const auto ni = item_factors(t.prev);
        const auto np = item_factors(t.pos);
        const auto nn = item_factors(t.neg);
        for (std::size_t k = 0; k < k_; ++k) {
            const double pool = pooling_ == HrmPooling::Average
                                    ? 0.5 * (mu[k] + ni[k])
                                    : std::max(mu[k], ni[k]);
            const double dnj = np[k] - nn[k];
            double du, di;
            if (pooling_ == HrmPooling::Average) {
                du = 0.5 * dnj;
                di = 0.5 * dnj;
            } else {
                // subgradient routes through the winning coordinate; ties go to M_u
                const bool user_wins = mu[k] >= ni[k];
                du = user_wins ? dnj : 0.0;
                di = user_wins ? 0.0 : dnj;
            }
            out.push_back({t.user * k_ + k, du, RegClass::Embedding});
            out.push_back({n_off() + t.prev * k_ + k, di, RegClass::Embedding});
            out.push_back({n_off() + t.pos * k_ + k, pool, RegClass::Embedding});
            out.push_back({n_off() + t.neg * k_ + k, -pool, RegClass::Embedding});
        }
    }

    void scores_for_context(std::uint32_t u, std::uint32_t prev,
                            std::span<double> out) const override {
        const auto mu = user_factors(u);
        const auto ni = item_factors(prev);
        std::vector<double> pool(k_);
        if (pooling_ == HrmPooling::Average) {
            for (std::size_t k = 0; k < k_; ++k) pool[k] = 0.5 * (mu[k] + ni[k]);
        } else {
            for (std::size_t k = 0; k < k_; ++k) pool[k] = std::max(mu[k], ni[k]);
        }
        for (std::uint32_t j = 0; j < out.size(); ++j) out[j] = dot(pool, item_factors(j));
    }

private:
    std::size_t n_off() const { return n_users_ * k_; }

    HrmPooling pooling_;
};

} // namespace transrec
