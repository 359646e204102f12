#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "transrec/linalg.hpp"

namespace transrec {

// One S-BPR training sample: user u transitioned from prev to pos;
// neg is a sampled item the user never interacted with.
struct Triple {
    std::uint32_t user;
    std::uint32_t prev;
    std::uint32_t pos;
    std::uint32_t neg;
};

// Regularization class of a parameter coordinate; each class can carry its
// own lambda (single shared default).
enum class RegClass : std::uint8_t { Bias, Embedding, Translation };

struct Regularization {
    double bias = 0.0;
    double embedding = 0.0;
    double translation = 0.0;

    static Regularization uniform(double lambda) { return {lambda, lambda, lambda}; }

    double of(RegClass c) const {
        switch (c) {
            case RegClass::Bias: return bias;
            case RegClass::Embedding: return embedding;
            default: return translation;
        }
    }
};

// One coordinate of the pair gradient d(p_pos - p_neg)/d(theta).
struct ParamGrad {
    std::size_t index;
    double value;
    RegClass cls;
};

// Uniform scoring surface over the translation model and every baseline.
//
// Parameters live in one flat vector. Models report the sparse gradient of
// the pairwise score difference; the S-BPR ascent step itself is generic:
//   theta += lr * (w * grad - lambda * theta),  w = sigma(p_neg - p_pos),
// applied exactly once per touched coordinate, followed by the model's
// renormalization hook.
class RankingModel {
public:
    virtual ~RankingModel() = default;

    virtual std::string_view kind() const = 0;
    virtual double score(std::uint32_t u, std::uint32_t prev, std::uint32_t next) const = 0;

    // Emits d(score(u,prev,pos) - score(u,prev,neg))/d(theta) for every
    // structurally touched coordinate (zero entries included). Duplicate
    // indices are allowed; the update merges them.
    virtual void pair_gradient(const Triple& t, std::vector<ParamGrad>& out) const = 0;

    // Post-update projection (e.g. unit-ball renormalization). Default: none.
    virtual void renormalize(const Triple&) {}

    virtual bool trainable() const { return true; }

    // Kind-specific settings needed to reconstruct the model from a file.
    virtual std::map<std::string, std::string> settings() const { return {}; }

    // Scores every candidate next item for a fixed (u, prev) context.
    // Overridden where hoisting the context out of the item loop pays off.
    virtual void scores_for_context(std::uint32_t u, std::uint32_t prev,
                                    std::span<double> out) const {
        for (std::uint32_t j = 0; j < out.size(); ++j) out[j] = score(u, prev, j);
    }

    std::size_t user_count() const { return n_users_; }
    std::size_t item_count() const { return n_items_; }
    std::size_t dim() const { return k_; }

    std::vector<double>& raw_params() { return theta_; }
    const std::vector<double>& raw_params() const { return theta_; }

    bool params_finite() const {
        for (double x : theta_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    // One stochastic gradient ascent step on ln sigma(p_pos - p_neg) with L2
    // shrinkage. Returns the pre-update score difference.
    double sbpr_update(const Triple& t, double lr, const Regularization& reg) {
        const double delta = score(t.user, t.prev, t.pos) - score(t.user, t.prev, t.neg);
        const double w = sigmoid(-delta);

        grad_buf_.clear();
        pair_gradient(t, grad_buf_);
        std::sort(grad_buf_.begin(), grad_buf_.end(),
                  [](const ParamGrad& a, const ParamGrad& b) { return a.index < b.index; });

        // merge duplicate coordinates so shrinkage applies once per parameter
        std::size_t i = 0;
        while (i < grad_buf_.size()) {
            double g = grad_buf_[i].value;
            const std::size_t idx = grad_buf_[i].index;
            const RegClass cls = grad_buf_[i].cls;
            std::size_t j = i + 1;
            while (j < grad_buf_.size() && grad_buf_[j].index == idx) {
                g += grad_buf_[j].value;
                ++j;
            }
            theta_[idx] += lr * (w * g - reg.of(cls) * theta_[idx]);
            i = j;
        }
        renormalize(t);
        return delta;
    }

protected:
    RankingModel(std::size_t n_users, std::size_t n_items, std::size_t k)
        : n_users_(n_users), n_items_(n_items), k_(k) {}

    std::span<double> block(std::size_t offset, std::size_t len) {
        return {theta_.data() + offset, len};
    }
    std::span<const double> block(std::size_t offset, std::size_t len) const {
        return {theta_.data() + offset, len};
    }

    std::size_t n_users_;
    std::size_t n_items_;
    std::size_t k_;
    std::vector<double> theta_;

private:
    std::vector<ParamGrad> grad_buf_;
};

} // namespace transrec
