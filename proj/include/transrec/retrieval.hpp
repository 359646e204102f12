#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "transrec/common.hpp"
#include "transrec/transrec_model.hpp"

namespace transrec {

// Exact top-N retrieval over bias-absorbed item coordinates.
//
// Biases are shifted so beta'_j = beta_j - max_k beta_k <= 0 (shifting does
// not change any ranking), then absorbed into an extra coordinate:
//   squared L2:  gamma'_j = (gamma_j ; sqrt(-beta'_j))
//   L1:          gamma'_j = (gamma_j ; beta'_j)
// With the query (gamma_i + T_u ; 0), the augmented distance equals
// d(gamma_i + T_u, gamma_j) - beta'_j in both cases, so nearest neighbors
// come back in exact model-score order.
struct RetrievalIndex {
    Distance distance = Distance::SquaredL2;
    std::size_t n_items = 0;
    std::size_t k = 0;                   // augmented rows have k + 1 entries
    std::vector<double> augmented;       // n_items x (k + 1), row-major
    std::vector<double> shifted_bias;    // beta'
    double beta_max = 0.0;

    std::span<const double> row(std::uint32_t j) const {
        return {augmented.data() + static_cast<std::size_t>(j) * (k + 1), k + 1};
    }
};

inline RetrievalIndex build_index(const TransRecModel& model) {
    if (!model.params_finite()) throw NumericError("build_index: non-finite parameters");

    RetrievalIndex index;
    index.distance = model.distance_kind();
    index.n_items = model.item_count();
    index.k = model.dim();

    const auto beta = model.beta();
    index.beta_max = *std::max_element(beta.begin(), beta.end());

    index.shifted_bias.resize(index.n_items);
    index.augmented.resize(index.n_items * (index.k + 1));
    for (std::uint32_t j = 0; j < index.n_items; ++j) {
        const double shifted = beta[j] - index.beta_max;
        index.shifted_bias[j] = shifted;
        double* row = index.augmented.data() + static_cast<std::size_t>(j) * (index.k + 1);
        const auto g = model.gamma(j);
        std::copy(g.begin(), g.end(), row);
        row[index.k] = index.distance == Distance::SquaredL2 ? std::sqrt(-shifted) : shifted;
    }
    return index;
}

struct Recommendation {
    std::uint32_t item;
    double score; // exact model score, beta_j - d(gamma_i + T_u, gamma_j)
};

// Top-N next items for (user, previous item), in exhaustive-score order with
// ties broken by dense item index. exclude must be sorted when given.
inline std::vector<Recommendation> recommend(const RetrievalIndex& index,
                                             const TransRecModel& model, std::uint32_t user,
                                             std::uint32_t prev, std::size_t top_n,
                                             bool exclude_seen = false,
                                             std::span<const std::uint32_t> exclude = {}) {
    if (top_n < 1) throw InputError("recommend: topN must be >= 1");
    if (prev >= index.n_items) throw InputError("recommend: previous item index out of range");

    // query coordinate (gamma_prev + T_u ; 0)
    std::vector<double> query(index.k + 1, 0.0);
    const auto gi = model.gamma(prev);
    model.user_translation(user, {query.data(), index.k});
    for (std::size_t k = 0; k < index.k; ++k) query[k] += gi[k];

    struct Entry {
        double dist;
        std::uint32_t item;
    };
    std::vector<Entry> entries;
    entries.reserve(index.n_items);
    const std::span<const double> q{query.data(), index.k + 1};
    for (std::uint32_t j = 0; j < index.n_items; ++j) {
        if (exclude_seen && std::binary_search(exclude.begin(), exclude.end(), j)) continue;
        const double d = index.distance == Distance::SquaredL2
                             ? squared_l2_distance(q, index.row(j))
                             : l1_distance(q, index.row(j));
        entries.push_back({d, j});
    }
    if (entries.empty()) throw InputError("recommend: empty candidate set");

    const auto less = [](const Entry& a, const Entry& b) {
        return a.dist != b.dist ? a.dist < b.dist : a.item < b.item;
    };
    const std::size_t n = std::min(top_n, entries.size());
    std::nth_element(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(n) - 1,
                     entries.end(), less);
    entries.resize(n);
    std::sort(entries.begin(), entries.end(), less);

    std::vector<Recommendation> out;
    out.reserve(n);
    for (const auto& e : entries) out.push_back({e.item, index.beta_max - e.dist});
    return out;
}

} // namespace transrec
