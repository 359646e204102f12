#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "transrec/ranking_model.hpp"
#include "transrec/rng.hpp"

namespace transrec {

// Translation model: items are points gamma_i in R^K constrained to the unit
// L2 ball, each user moves through the catalog by the translation
// T_u = t + t_u, and the next-item score is
//
//   score(u, i, j) = beta_j - d(gamma_i + T_u, gamma_j)
//
// with d either L1 or squared L2.
//
// Flat parameter layout: [beta | gamma (I x K) | t | t_user (U x K)].
class TransRecModel final : public RankingModel {
public:
    TransRecModel(std::size_t n_users, std::size_t n_items, std::size_t k, Distance dist)
        : RankingModel(n_users, n_items, k), dist_(dist) {
        theta_.assign(n_items + n_items * k + k + n_users * k, 0.0);
    }

    // gamma rows and t start as random unit directions; beta and all user
    // offsets start at zero, so cold users fall back to the global t.
    static TransRecModel random_init(std::size_t n_users, std::size_t n_items, std::size_t k,
                                     Distance dist, Rng& rng) {
        TransRecModel m(n_users, n_items, k, dist);
        for (std::size_t i = 0; i < n_items; ++i) fill_random_unit_vector(m.gamma(i), rng);
        fill_random_unit_vector(m.t_global(), rng);
        return m;
    }

    Distance distance_kind() const { return dist_; }

    std::string_view kind() const override {
        return dist_ == Distance::L1 ? "transrec-l1" : "transrec-l2";
    }

    std::map<std::string, std::string> settings() const override {
        return {{"distance", std::string(to_string(dist_))}};
    }

    std::span<double> beta() { return block(0, n_items_); }
    std::span<const double> beta() const { return block(0, n_items_); }
    std::span<double> gamma(std::uint32_t i) { return block(gamma_off() + i * k_, k_); }
    std::span<const double> gamma(std::uint32_t i) const { return block(gamma_off() + i * k_, k_); }
    std::span<double> t_global() { return block(t_off(), k_); }
    std::span<const double> t_global() const { return block(t_off(), k_); }
    std::span<double> t_user(std::uint32_t u) { return block(tu_off() + u * k_, k_); }
    std::span<const double> t_user(std::uint32_t u) const { return block(tu_off() + u * k_, k_); }

    // T_u = t + t_u
    void user_translation(std::uint32_t u, std::span<double> out) const {
        const auto t = t_global();
        const auto tu = t_user(u);
        for (std::size_t k = 0; k < k_; ++k) out[k] = t[k] + tu[k];
    }

    double score(std::uint32_t u, std::uint32_t prev, std::uint32_t next) const override {
        const auto gi = gamma(prev);
        const auto gj = gamma(next);
        const auto t = t_global();
        const auto tu = t_user(u);
        double d = 0.0;
        if (dist_ == Distance::SquaredL2) {
            for (std::size_t k = 0; k < k_; ++k) {
                const double diff = gi[k] + t[k] + tu[k] - gj[k];
                d += diff * diff;
            }
        } else {
            for (std::size_t k = 0; k < k_; ++k)
                d += std::fabs(gi[k] + t[k] + tu[k] - gj[k]);
        }
        return theta_[next] - d;
    }

    void scores_for_context(std::uint32_t u, std::uint32_t prev,
                            std::span<double> out) const override {
        std::vector<double> q(k_);
        const auto gi = gamma(prev);
        const auto t = t_global();
        const auto tu = t_user(u);
        for (std::size_t k = 0; k < k_; ++k) q[k] = gi[k] + t[k] + tu[k];

        const double* g = theta_.data() + gamma_off();
        if (dist_ == Distance::SquaredL2) {
            for (std::uint32_t j = 0; j < out.size(); ++j) {
                const double* gj = g + static_cast<std::size_t>(j) * k_;
                double d = 0.0;
                for (std::size_t k = 0; k < k_; ++k) {
                    const double diff = q[k] - gj[k];
                    d += diff * diff;
                }
                out[j] = theta_[j] - d;
            }
        } else {
            for (std::uint32_t j = 0; j < out.size(); ++j) {
                const double* gj = g + static_cast<std::size_t>(j) * k_;
                double d = 0.0;
                for (std::size_t k = 0; k < k_; ++k) d += std::fabs(q[k] - gj[k]);
                out[j] = theta_[j] - d;
            }
        }
    }

    void pair_gradient(const Triple& t, std::vector<ParamGrad>& out) const override {
        const auto gi = gamma(t.prev);
        const auto gp = gamma(t.pos);
        const auto gn = gamma(t.neg);
        const auto tg = t_global();
        const auto tu = t_user(t.user);

        out.push_back({t.pos, 1.0, RegClass::Bias});
        out.push_back({t.neg, -1.0, RegClass::Bias});

        const std::size_t pos_row = gamma_off() + t.pos * k_;
        const std::size_t neg_row = gamma_off() + t.neg * k_;
        const std::size_t prev_row = gamma_off() + t.prev * k_;
        const std::size_t tu_row = tu_off() + t.user * k_;

        for (std::size_t k = 0; k < k_; ++k) {
            const double q = gi[k] + tg[k] + tu[k];
            double dpos, dneg; // d score_pos / d q_k, d score_neg / d q_k (negated distance grads)
            if (dist_ == Distance::SquaredL2) {
                dpos = -2.0 * (q - gp[k]);
                dneg = -2.0 * (q - gn[k]);
            } else {
                // subgradient of -|x|: 0 at the kink
                const double sp = q - gp[k];
                const double sn = q - gn[k];
                dpos = sp > 0.0 ? -1.0 : (sp < 0.0 ? 1.0 : 0.0);
                dneg = sn > 0.0 ? -1.0 : (sn < 0.0 ? 1.0 : 0.0);
            }
            const double gq = dpos - dneg; // d delta / d q_k
            out.push_back({pos_row + k, -dpos, RegClass::Embedding});
            out.push_back({neg_row + k, dneg, RegClass::Embedding});
            out.push_back({prev_row + k, gq, RegClass::Embedding});
            out.push_back({t_off() + k, gq, RegClass::Translation});
            out.push_back({tu_row + k, gq, RegClass::Translation});
        }
    }

    // gamma_i, gamma_j, gamma_j' back onto the unit ball after each step
    void renormalize(const Triple& t) override {
        project_to_unit_ball(gamma(t.prev));
        project_to_unit_ball(gamma(t.pos));
        project_to_unit_ball(gamma(t.neg));
    }

    bool ball_constraint_holds(double tol = 1e-9) const {
        for (std::uint32_t i = 0; i < n_items_; ++i)
            if (norm2(gamma(i)) > 1.0 + tol) return false;
        return true;
    }

private:
    std::size_t gamma_off() const { return n_items_; }
    std::size_t t_off() const { return n_items_ + n_items_ * k_; }
    std::size_t tu_off() const { return t_off() + k_; }

    Distance dist_;
};

} // namespace transrec
