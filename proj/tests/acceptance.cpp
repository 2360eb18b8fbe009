// Acceptance gate: one line per criterion, PASS/FAIL/SKIP, nonzero exit on
// any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>

#include "catsr/fit.hpp"
#include "catsr/identifiability.hpp"
#include "catsr/procession.hpp"
#include "catsr/search.hpp"
#include "catsr/synthetic.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace catsr;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << ": " << name << std::endl;
    if (!ok) ++failures;
}

void skip(const std::string& name, const std::string& why) {
    std::cout << "SKIP: " << name << " (" << why << ")" << std::endl;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void identifiability_golden() {
    const auto start = Clock::now();
    const auto bench = quartic_benchmark();
    const auto demand = param_demand(bench.expression, bench.schema);
    bool ok = true;
    for (const auto& c : fixtures::requirement_cases()) {
        ok = ok && check_identifiability(demand, bench.schema, c.counts).feasible == c.feasible;
    }
    report("identifiability verdicts match all 12 golden cell-count cases in < 1 s",
           ok && seconds_since(start) < 1.0);
}

void evaluation_golden() {
    const auto start = Clock::now();
    const auto bench = quartic_benchmark();
    const auto ds = dataset_from_cells(bench.schema, std::vector<std::vector<double>>(12, {1.0}),
                                       bench.expression, bench.truth);
    const auto y = predict(bench.expression, bench.truth, ds);
    bool ok = y.size() == 12;
    for (int i = 0; ok && i < 12; ++i) {
        ok = std::abs(y[i] - fixtures::quartic_csv_targets()[i]) < 1e-9;
    }
    report("benchmark predictions reproduce the 12 reference values to 1e-9 in < 1 s",
           ok && seconds_since(start) < 1.0);
}

void parameter_accounting() {
    const auto bench = quartic_benchmark();
    report("benchmark expression expands to k = 20 individual parameters over m = 4 terminals",
           count_individual_parameters(bench.expression, bench.schema) == 20 &&
               bench.expression.terminal_count() == 4);
}

void jacobian_sparsity() {
    const auto bench = quartic_benchmark();
    bool ok = true;

    const auto ds = dataset_from_cells(bench.schema, std::vector<std::vector<double>>(12, {1.0}),
                                       bench.expression, bench.truth);
    const auto jac = sparse_jacobian(bench.expression, bench.truth, ds);
    ok = ok && jac.entries_per_row == 4 && jac.col.size() == 48 && jac.n_cols == 20;
    for (int row = 0; ok && row < 12; ++row) {
        ok = jac.col_at(row, 0) == 0 && jac.col_at(row, 1) == 1 + row / 3 &&
             jac.col_at(row, 2) == 5 + row % 3 && jac.col_at(row, 3) == 8 + row;
    }

    size_t previous = 0;
    for (int per_cell : {1, 10, 100}) {
        const auto scaled = dataset_from_cells(
            bench.schema, std::vector<std::vector<double>>(12, std::vector<double>(per_cell, 1.0)),
            bench.expression, bench.truth);
        const auto j = sparse_jacobian(bench.expression, bench.truth, scaled);
        const size_t stored = j.col.size() + j.val.size();
        ok = ok && stored == static_cast<size_t>(scaled.n_rows()) * 4 * 2;
        if (previous > 0) ok = ok && stored == previous * 10;
        previous = stored;
    }
    report("jacobian keeps 4 nonzeros per row (48 on the 12-row table) and scales linearly in n",
           ok);
}

void jacobian_correctness() {
    const auto bench = quartic_benchmark();
    std::mt19937_64 rng(424242);
    int tested = 0;
    double worst = 0.0;
    while (tested < 200) {
        const auto e = random_expression(bench.schema, 1, 11, rng);
        if (e.terminal_count() == 0) continue;
        const BindingLayout layout(e, bench.schema);
        const auto binding = ParameterBinding::random(layout, rng, 0.5, 1.5);
        std::uniform_real_distribution<double> v1(0.5, 2.0);
        std::vector<std::vector<double>> cells(12);
        for (auto& cell : cells) cell = {v1(rng), v1(rng)};
        std::optional<Dataset> ds;
        try {
            ds = dataset_from_cells(bench.schema, cells, e, binding);
        } catch (const DataError&) {
            continue;
        }
        // extreme magnitudes starve the finite-difference oracle of precision
        bool moderate = true;
        for (double y : ds->targets()) moderate = moderate && std::abs(y) < 1e3;
        if (!moderate) continue;
        const auto jac = sparse_jacobian(e, binding, *ds);
        bool finite = true;
        for (double v : jac.val) finite = finite && std::isfinite(v) && std::abs(v) < 1e3;
        if (!finite) continue;

        const auto fd = oracles::finite_difference_jacobian(e, binding, *ds);
        for (int row = 0; row < ds->n_rows(); ++row) {
            std::vector<double> dense(jac.n_cols, 0.0);
            for (int slot = 0; slot < jac.entries_per_row; ++slot) {
                dense[jac.col_at(row, slot)] += jac.val_at(row, slot);
            }
            for (int col = 0; col < jac.n_cols; ++col) {
                const double rel = std::abs(dense[col] - fd[row][col]) /
                                   std::max({1.0, std::abs(dense[col]), std::abs(fd[row][col])});
                worst = std::max(worst, rel);
            }
        }
        ++tested;
    }
    report("jacobian matches central finite differences to 1e-6 over 200 random cases",
           worst < 1e-6);
}

void procession_property() {
    const auto start = Clock::now();
    ProcessionOptions options;
    options.processions = 20;
    options.seed = 9001;
    const auto rows = run_processions(options);

    int fitted = 0, accurate = 0;
    bool finals_detected = true;
    int current = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.requirements_met && row.mse_test) {
            ++fitted;
            if (*row.mse_test < 1e-6) ++accurate;
        }
        const bool last_of_procession =
            i + 1 == rows.size() || rows[i + 1].procession != row.procession;
        if (last_of_procession) {
            ++current;
            // the verdict precedes the refit, so the stop is a detection
            finals_detected = finals_detected && !row.requirements_met;
        }
    }
    const bool ok = current == 20 && fitted > 0 &&
                    accurate >= static_cast<int>(std::ceil(0.95 * fitted)) && finals_detected &&
                    seconds_since(start) < 300.0;
    report("20 processions: 95% of feasible refits reach mse < 1e-6, all 20 stops are "
           "detected before fitting, < 5 min",
           ok);
}

void recovery_property() {
    const auto start = Clock::now();
    const auto bench = quartic_benchmark();
    const auto model = parse("CS1 * v1 + C1_1 * square(v1)", bench.schema);
    const BindingLayout layout(model, bench.schema);
    auto truth = ParameterBinding::zeros(layout);
    truth.shared[0] = 100.0;
    truth.partial[0][0] = {10.0, 20.0, 30.0, 40.0};

    int recovered = 0;
    for (uint64_t seed = 0; seed < 5; ++seed) {
        std::mt19937_64 rng(seed);
        const auto ds = sample_dataset(bench.schema, model, truth, 8, -20, 20, rng);
        SearchConfig config;
        config.population_size = 200;
        config.generations = 50;
        config.max_complexity = 15;
        config.seed = seed;
        const auto result = run_search(ds, config);
        for (const auto& c : result.archive) {
            if (c.fit.r_squared && *c.fit.r_squared >= 0.999 &&
                c.objectives.individual_parameters <= 20) {
                ++recovered;
                break;
            }
        }
    }
    report("search recovers the shared/partial quadratic law (R^2 >= 0.999, k <= 20) on >= 3 "
           "of 5 seeds, < 10 min",
           recovered >= 3 && seconds_since(start) < 600.0);
}

void pareto_correctness() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> loss(0.0, 1.0);
    std::uniform_int_distribution<int> small(1, 8);
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
        std::vector<Objectives> objs(50);
        for (auto& o : objs) o = {loss(rng), small(rng), small(rng)};
        const auto fast = pareto_rank(objs);
        auto expected = oracles::pareto_fronts_by_enumeration(objs);
        ok = fast.size() == expected.size();
        for (size_t f = 0; ok && f < fast.size(); ++f) {
            auto got = fast[f];
            std::sort(got.begin(), got.end());
            std::sort(expected[f].begin(), expected[f].end());
            ok = got == expected[f];
        }
    }
    report("non-dominated sorting equals the brute-force oracle on 50 candidates x 100 trials",
           ok);
}

void supernovae_parity() {
    const std::string name =
        "supernovae parity: one of 5 seeded runs reaches R^2 >= 0.98, complexity <= 12, k <= 12";
    const char* path = std::getenv("CATSR_SUPERNOVAE_CSV");
    if (path == nullptr) {
        skip(name, "set CATSR_SUPERNOVAE_CSV to a csv with columns dataset,band,v1,y");
        return;
    }
    Dataset ds = [&] {
        try {
            return load_csv(path, {"v1"}, {"dataset", "band"}, "y");
        } catch (const DataError& err) {
            std::cout << "SKIP: " << name << " (" << err.what() << ")" << std::endl;
            std::exit(failures == 0 ? 0 : 1);
        }
    }();
    bool found = false;
    for (uint64_t seed = 0; seed < 5 && !found; ++seed) {
        SearchConfig config;
        config.max_complexity = 15;
        config.seed = seed;
        const auto result = run_search(ds, config);
        for (const auto& c : result.archive) {
            if (c.fit.r_squared && *c.fit.r_squared >= 0.98 && c.objectives.complexity <= 12 &&
                c.objectives.individual_parameters <= 12) {
                found = true;
                break;
            }
        }
    }
    report(name, found);
}

}  // namespace

int main() {
    identifiability_golden();
    evaluation_golden();
    parameter_accounting();
    jacobian_sparsity();
    jacobian_correctness();
    procession_property();
    recovery_property();
    pareto_correctness();
    supernovae_parity();
    return failures == 0 ? 0 : 1;
}
