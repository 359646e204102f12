#pragma once

// Test-only ranking model scoring straight from a lookup table, independent
// of every learner under test.

#include <cstdint>
#include <vector>

#include "transrec/ranking_model.hpp"

namespace testutil {

class TableModel final : public transrec::RankingModel {
public:
    TableModel(std::size_t n_users, std::size_t n_items)
        : transrec::RankingModel(n_users, n_items, 0), table_(n_users * n_items, 0.0) {}

    double& at(std::uint32_t u, std::uint32_t j) { return table_[u * item_count() + j]; }

    std::string_view kind() const override { return "table"; }
    double score(std::uint32_t u, std::uint32_t, std::uint32_t next) const override {
        return table_[u * item_count() + next];
    }
    void pair_gradient(const transrec::Triple&, std::vector<transrec::ParamGrad>&) const override {}

private:
    std::vector<double> table_;
};

} // namespace testutil
