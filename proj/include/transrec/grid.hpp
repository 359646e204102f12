#pragma once

#include <memory>
#include <string>
#include <vector>

#include "transrec/baselines.hpp"
#include "transrec/dataset.hpp"
#include "transrec/item2item.hpp"
#include "transrec/training.hpp"
#include "transrec/transrec_model.hpp"

namespace transrec {

inline const std::vector<std::string>& sequential_model_kinds() {
    static const std::vector<std::string> kinds = {
        "poprec", "bprmf", "fmc", "fpmc", "prme",
        "hrm-avg", "hrm-max", "transrec-l1", "transrec-l2"};
    return kinds;
}

// Fresh, seeded model of the named kind over the dataset's shapes.
inline std::unique_ptr<RankingModel> make_sequential_model(const std::string& kind,
                                                           const SequenceDataset& ds,
                                                           std::size_t k, double prme_alpha,
                                                           bool bprmf_use_bias, Rng& rng) {
    const std::size_t u = ds.user_count(), i = ds.item_count();
    if (kind == "poprec")
        return std::make_unique<PopRecModel>(PopRecModel::from_training_counts(ds));
    if (kind == "bprmf")
        return std::make_unique<BprMfModel>(BprMfModel::random_init(u, i, k, rng, bprmf_use_bias));
    if (kind == "fmc") return std::make_unique<FmcModel>(FmcModel::random_init(u, i, k, rng));
    if (kind == "fpmc") return std::make_unique<FpmcModel>(FpmcModel::random_init(u, i, k, rng));
    if (kind == "prme")
        return std::make_unique<PrmeModel>(PrmeModel::random_init(u, i, k, prme_alpha, rng));
    if (kind == "hrm-avg")
        return std::make_unique<HrmModel>(HrmModel::random_init(u, i, k, HrmPooling::Average, rng));
    if (kind == "hrm-max")
        return std::make_unique<HrmModel>(HrmModel::random_init(u, i, k, HrmPooling::Max, rng));
    if (kind == "transrec-l1")
        return std::make_unique<TransRecModel>(
            TransRecModel::random_init(u, i, k, Distance::L1, rng));
    if (kind == "transrec-l2")
        return std::make_unique<TransRecModel>(
            TransRecModel::random_init(u, i, k, Distance::SquaredL2, rng));
    throw InputError("unknown model kind: " + kind + " (expected one of poprec|bprmf|fmc|fpmc|"
                     "prme|hrm-avg|hrm-max|transrec-l1|transrec-l2)");
}

struct GridPoint {
    double lambda = 0.0;
    double alpha = 0.0; // PRME only; 0 elsewhere
    double validation_auc = 0.0;
    std::size_t iterations_run = 0;
    std::size_t best_iteration = 0;
    bool diverged = false; // training hit non-finite parameters
};

struct GridSearchResult {
    std::unique_ptr<RankingModel> model; // best point, best snapshot
    FitReport report;                    // report of the winning point
    std::vector<GridPoint> table;
    std::size_t best_index = 0;
};

namespace detail {

// Grid point 0 trains with the base seed, so a singleton grid is plain
// training; later points get derived, independent streams.
inline std::uint64_t grid_point_seed(std::uint64_t base, std::size_t index) {
    return index == 0 ? base : splitmix64(base ^ (0x9e3779b97f4a7c15ull * index));
}

template <typename MakeModel, typename MakeTask>
GridSearchResult grid_search_impl(const TrainConfig& base,
                                  const std::vector<double>& lambda_grid,
                                  const std::vector<double>& alpha_grid, MakeModel&& make_model,
                                  MakeTask&& make_task) {
    const std::vector<double> lambdas = lambda_grid.empty()
                                            ? std::vector<double>{base.lambda}
                                            : lambda_grid;
    const std::vector<double> alphas = alpha_grid.empty() ? std::vector<double>{0.0} : alpha_grid;

    GridSearchResult result;
    bool have_best = false;
    std::size_t index = 0;
    for (double alpha : alphas) {
        for (double lambda : lambdas) {
            TrainConfig cfg = base;
            cfg.lambda = lambda;
            cfg.seed = grid_point_seed(base.seed, index);
            Rng init_rng(cfg.seed, "init");

            auto model = make_model(alpha, cfg, init_rng);
            GridPoint point{lambda, alpha, 0.0, 0, 0, false};
            FitReport rep;
            try {
                rep = fit(*model, make_task(*model), cfg);
                point.validation_auc = model->trainable()
                                           ? rep.best_validation_auc
                                           : make_task(*model).validation_metric(*model);
                point.iterations_run = rep.rows.size();
                point.best_iteration = rep.best_iteration;
            } catch (const NumericError&) {
                // a diverged grid point loses the selection but does not
                // abort the search
                point.diverged = true;
            }
            result.table.push_back(point);
            if (!point.diverged &&
                (!have_best ||
                 point.validation_auc > result.table[result.best_index].validation_auc)) {
                have_best = true;
                result.best_index = index;
                result.model = std::move(model);
                result.report = rep;
            }
            ++index;
        }
    }
    if (!have_best) throw NumericError("grid search: every grid point diverged");
    return result;
}

} // namespace detail

// Trains one model per (lambda, alpha) grid point, selects the best
// validation AUC, and keeps the full table. Empty grids collapse to the
// config's single value.
inline GridSearchResult grid_search(const std::string& kind, const SequenceDataset& ds,
                                    const TrainConfig& base,
                                    const std::vector<double>& lambda_grid = {},
                                    const std::vector<double>& alpha_grid = {},
                                    bool bprmf_use_bias = true) {
    const std::vector<double> alphas =
        kind == "prme" ? (alpha_grid.empty() ? std::vector<double>{0.2, 0.5, 0.8} : alpha_grid)
                       : std::vector<double>{0.0};
    return detail::grid_search_impl(
        base, lambda_grid, alphas,
        [&](double alpha, const TrainConfig& cfg, Rng& rng) {
            return make_sequential_model(kind, ds, cfg.k, alpha, bprmf_use_bias, rng);
        },
        [&](RankingModel&) { return SequentialTask(ds, base.eval_threads); });
}

inline GridSearchResult grid_search_i2i(const std::string& kind,
                                        std::shared_ptr<const FeatureMatrix> features,
                                        const EdgeDataset& edges, const TrainConfig& base,
                                        const std::vector<double>& lambda_grid = {}) {
    return detail::grid_search_impl(
        base, lambda_grid, {},
        [&](double, const TrainConfig& cfg, Rng& rng) -> std::unique_ptr<RankingModel> {
            return make_i2i_model(kind, features, cfg.k, rng);
        },
        [&](RankingModel&) { return EdgeTask(edges, 10, base.eval_threads); });
}

} // namespace transrec
