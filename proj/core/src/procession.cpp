#include "catsr/procession.hpp"

#include <algorithm>
#include <numeric>

#include "catsr/identifiability.hpp"

namespace catsr {

std::vector<ProcessionRow> run_processions(const ProcessionOptions& options) {
    if (options.processions < 1) throw std::invalid_argument("processions must be >= 1");
    if (options.points_per_cell < 1) throw std::invalid_argument("points_per_cell must be >= 1");

    auto benchmark = quartic_benchmark();
    Expression expression = options.expression ? *options.expression : benchmark.expression;
    const CategorySchema& schema = benchmark.schema;
    const BindingLayout layout(expression, schema);

    std::mt19937_64 rng(options.seed);
    ParameterBinding truth =
        options.expression ? ParameterBinding::random(layout, rng, 0.5, 1.5) : benchmark.truth;

    const Dataset full =
        sample_dataset(schema, expression, truth, options.points_per_cell, options.sample_lo,
                       options.sample_hi, rng);
    const auto demand = param_demand(expression, schema);

    std::vector<ProcessionRow> log;
    for (int p = 1; p <= options.processions; ++p) {
        std::seed_seq seq{options.seed, static_cast<uint64_t>(p)};
        std::mt19937_64 prng(seq);

        std::vector<int> train(full.n_rows());
        std::iota(train.begin(), train.end(), 0);
        std::vector<int> test;

        ProcessionRow first;
        first.procession = p;
        first.n_train = full.n_rows();
        first.cell_counts = cell_counts(full);
        first.requirements_met = check_identifiability(demand, schema, first.cell_counts).feasible;
        first.fit_converged = true;  // nothing to refit yet
        log.push_back(std::move(first));

        while (!train.empty()) {
            std::uniform_int_distribution<int> pick(0, static_cast<int>(train.size()) - 1);
            const int slot = pick(prng);
            test.push_back(train[slot]);
            train.erase(train.begin() + slot);

            const Dataset train_ds = full.subset(train);
            const Dataset test_ds = full.subset(test);

            ProcessionRow row;
            row.procession = p;
            row.n_train = train_ds.n_rows();
            row.cell_counts = cell_counts(train_ds);
            row.requirements_met = check_identifiability(demand, schema, row.cell_counts).feasible;

            FitResult best;
            for (int attempt = 0; attempt <= options.refit_restarts; ++attempt) {
                const auto start = perturb(truth, options.perturb_scale, prng);
                auto fit = fit_parameters(expression, train_ds, start, options.fit, prng);
                if (fit.sse < best.sse) best = std::move(fit);
                if (best.converged && best.sse < 1e-10) break;  // noise-free data, exact fit found
            }
            row.fit_converged = best.converged;
            if (!best.failed) {
                const auto pred = predict(expression, best.binding, test_ds);
                row.mse_test = mse(test_ds.targets(), pred);
            }

            const bool stop = !row.requirements_met;
            log.push_back(std::move(row));
            if (stop) break;
        }
    }
    return log;
}

}  // namespace catsr
