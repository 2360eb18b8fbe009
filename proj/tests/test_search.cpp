#include <algorithm>
#include <cmath>
#include <set>

#include "catsr/search.hpp"
#include "catsr/synthetic.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace catsr;

namespace {

Dataset line_dataset(const CategorySchema& schema, int points_per_cell, std::mt19937_64& rng) {
    const auto e = parse("CS1 * v1", schema);
    const BindingLayout layout(e, schema);
    auto truth = ParameterBinding::zeros(layout);
    truth.shared[0] = 2.5;
    return sample_dataset(schema, e, truth, points_per_cell, -5, 5, rng);
}

std::vector<Objectives> random_objectives(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> loss(0.0, 1.0);
    std::uniform_int_distribution<int> small(1, 6);
    std::vector<Objectives> out(n);
    for (auto& o : out) o = {loss(rng), small(rng), small(rng)};
    return out;
}

}  // namespace

TEST_CASE("dominates is a strict partial order") {
    const Objectives a{0.1, 3, 2};
    const Objectives b{0.2, 3, 2};
    const Objectives c{0.2, 2, 2};
    CHECK(dominates(a, b));
    CHECK_FALSE(dominates(b, a));
    CHECK_FALSE(dominates(a, a));
    CHECK_FALSE(dominates(a, c));  // trade-off, incomparable
    CHECK_FALSE(dominates(c, a));

    std::mt19937_64 rng(1);
    const auto objs = random_objectives(60, rng);
    for (const auto& x : objs) {
        for (const auto& y : objs) {
            CHECK_FALSE((dominates(x, y) && dominates(y, x)));
        }
    }
}

TEST_CASE("pareto_rank matches front peeling by enumeration") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto objs = random_objectives(50, rng);
        const auto fast = pareto_rank(objs);
        auto expected = oracles::pareto_fronts_by_enumeration(objs);
        REQUIRE(fast.size() == expected.size());
        for (size_t f = 0; f < fast.size(); ++f) {
            auto got = fast[f];
            std::sort(got.begin(), got.end());
            std::sort(expected[f].begin(), expected[f].end());
            CHECK(got == expected[f]);
        }
    }
}

TEST_CASE("crowding distance is infinite at the extremes") {
    const std::vector<Objectives> objs = {
        {0.1, 5, 5}, {0.2, 4, 4}, {0.3, 3, 3}, {0.4, 2, 2}, {0.5, 1, 1}};
    std::vector<int> front = {0, 1, 2, 3, 4};
    const auto d = crowding_distance(front, objs);
    REQUIRE(d.size() == 5);
    CHECK(std::isinf(d[0]));
    CHECK(std::isinf(d[4]));
    for (int i = 1; i < 4; ++i) {
        CHECK(std::isfinite(d[i]));
        CHECK(d[i] > 0.0);
    }
    // interior spacing is uniform here
    CHECK(d[1] == doctest::Approx(d[2]));
    CHECK(d[2] == doctest::Approx(d[3]));
}

TEST_CASE("point mutation keeps the tree shape") {
    const auto bench = quartic_benchmark();
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        const auto e = random_expression(bench.schema, 1, 13, rng);
        const auto mutated = point_mutation(e, bench.schema, 1, rng);
        CHECK(mutated.node_count() == e.node_count());
        CHECK(complexity(mutated) == complexity(e));
    }
}

TEST_CASE("point mutation changes something eventually") {
    const auto bench = quartic_benchmark();
    std::mt19937_64 rng(4);
    const auto e = parse("CS1 * v1 + C1_1", bench.schema);
    int changed = 0;
    for (int trial = 0; trial < 100; ++trial) {
        if (!structurally_equal(point_mutation(e, bench.schema, 1, rng), e)) ++changed;
    }
    CHECK(changed > 90);
}

TEST_CASE("subtree mutation and crossover respect the complexity budget") {
    const auto bench = quartic_benchmark();
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = random_expression(bench.schema, 1, 15, rng);
        const auto b = random_expression(bench.schema, 1, 15, rng);
        const auto m = subtree_mutation(a, bench.schema, 1, 15, rng);
        CHECK(complexity(m) <= 15);
        const auto x = subtree_crossover(a, b, 15, rng);
        CHECK(complexity(x) <= 15);
        // densification invariant survives surgery
        CHECK(m.terminal_count() >= 0);
        for (int t = 0; t < x.terminal_count(); ++t) {
            (void)x.terminal_kind(t);  // must not throw / read out of range
        }
    }
}

TEST_CASE("crossover material comes from the parents") {
    const auto bench = quartic_benchmark();
    std::mt19937_64 rng(6);
    const auto a = parse("v1 + v1", bench.schema);
    const auto b = parse("v1 * v1", bench.schema);
    for (int trial = 0; trial < 200; ++trial) {
        const auto child = subtree_crossover(a, b, 15, rng);
        // only Add, Mul, and v1 exist in either parent
        for (int i = 0; i < child.node_count(); ++i) {
            const auto sub = subtree_at(child.root(), i);
            if (const auto* bin = std::get_if<Node::Binary>(&sub->value)) {
                CHECK((bin->op == BinaryOp::Add || bin->op == BinaryOp::Mul));
            } else {
                const auto* var = std::get_if<Node::Variable>(&sub->value);
                REQUIRE(var != nullptr);
                CHECK(var->index == 0);
            }
        }
    }
}

TEST_CASE("initialize_population yields evaluated candidates within budget") {
    const auto bench = quartic_benchmark();
    std::mt19937_64 rng(7);
    const auto ds = line_dataset(bench.schema, 3, rng);
    SearchConfig config;
    config.population_size = 60;
    config.max_complexity = 11;
    const auto pop = initialize_population(config, ds, rng);
    REQUIRE(static_cast<int>(pop.size()) == 60);
    for (const auto& c : pop) {
        CHECK(complexity(c.expression) <= 11);
        CHECK(c.objectives.complexity == complexity(c.expression));
        CHECK(c.objectives.individual_parameters ==
              count_individual_parameters(c.expression, bench.schema));
    }
    const int finite = static_cast<int>(
        std::count_if(pop.begin(), pop.end(), [](const auto& c) { return c.objectives.finite(); }));
    CHECK(finite > 30);
}

TEST_CASE("evaluate_candidate scores match a recomputation") {
    const auto bench = quartic_benchmark();
    std::mt19937_64 rng(8);
    const auto ds = line_dataset(bench.schema, 3, rng);
    SearchConfig config;
    config.fit.restarts = 2;
    for (int trial = 0; trial < 40; ++trial) {
        const auto e = random_expression(bench.schema, 1, 11, rng);
        const auto cand = evaluate_candidate(e, ds, config, nullptr, rng);
        CHECK(cand.objectives.complexity == complexity(cand.expression));
        CHECK(cand.objectives.individual_parameters ==
              count_individual_parameters(cand.expression, bench.schema));
        if (cand.fit.r_squared) {
            CHECK(cand.objectives.loss == doctest::Approx(1.0 - *cand.fit.r_squared));
            const auto yhat = predict(cand.expression, cand.fit.binding, ds);
            const auto rsq = r_squared(ds.targets(), yhat);
            REQUIRE(rsq.has_value());
            CHECK(*rsq == doctest::Approx(*cand.fit.r_squared));
        }
    }
}

TEST_CASE("warm start never hurts the fitted loss on the same expression") {
    const auto bench = quartic_benchmark();
    std::mt19937_64 rng(9);
    const auto ds = sample_dataset(bench.schema, bench.expression, bench.truth, 8, -20, 20, rng);
    SearchConfig config;
    const auto cold = evaluate_candidate(bench.expression, ds, config, nullptr, rng);
    const auto warm = evaluate_candidate(bench.expression, ds, config, &bench.truth, rng);
    CHECK(warm.fit.sse <= 1e-10);
    CHECK(warm.fit.sse <= cold.fit.sse + 1e-12);
}

TEST_CASE("search recovers a one-parameter law on most seeds") {
    CategorySchema schema(std::vector<CategorySchema::Category>{{"g", {"p", "q"}}});
    int recovered = 0;
    for (uint64_t seed = 0; seed < 5; ++seed) {
        std::mt19937_64 rng(seed + 100);
        const auto ds = line_dataset(schema, 10, rng);
        SearchConfig config;
        config.population_size = 100;
        config.generations = 20;
        config.max_complexity = 9;
        config.seed = seed;
        const auto report = run_search(ds, config);
        for (const auto& c : report.archive) {
            if (c.objectives.finite() && c.objectives.loss < 1e-9 &&
                c.objectives.complexity <= 3) {
                ++recovered;
                break;
            }
        }
    }
    CHECK(recovered >= 4);
}

TEST_CASE("the archive is mutually non-dominated and sorted by complexity") {
    const auto bench = quartic_benchmark();
    std::mt19937_64 rng(10);
    const auto ds = sample_dataset(bench.schema, bench.expression, bench.truth, 4, -10, 10, rng);
    SearchConfig config;
    config.population_size = 60;
    config.generations = 8;
    config.seed = 17;
    const auto report = run_search(ds, config);
    REQUIRE_FALSE(report.archive.empty());
    for (size_t i = 0; i < report.archive.size(); ++i) {
        CHECK(report.archive[i].objectives.finite());
        if (i > 0) {
            CHECK(report.archive[i - 1].objectives.complexity <=
                  report.archive[i].objectives.complexity);
        }
        for (size_t j = 0; j < report.archive.size(); ++j) {
            if (i == j) continue;
            CHECK_FALSE(dominates(report.archive[j].objectives, report.archive[i].objectives));
        }
    }
}

TEST_CASE("run_search is deterministic for a fixed seed") {
    CategorySchema schema(std::vector<CategorySchema::Category>{{"g", {"p", "q"}}});
    std::mt19937_64 rng(11);
    const auto ds = line_dataset(schema, 5, rng);
    SearchConfig config;
    config.population_size = 40;
    config.generations = 5;
    config.seed = 7;
    const auto a = run_search(ds, config);
    const auto b = run_search(ds, config);
    REQUIRE(a.archive.size() == b.archive.size());
    for (size_t i = 0; i < a.archive.size(); ++i) {
        CHECK(to_string(a.archive[i].expression) == to_string(b.archive[i].expression));
        CHECK(a.archive[i].objectives.loss == b.archive[i].objectives.loss);
    }
}

TEST_CASE("dropping the parameter-count objective biases toward more sharing") {
    // Target uses one shared slope; with the k objective active the archive
    // should keep models at least as lean in k as without it, on average.
    CategorySchema schema(std::vector<CategorySchema::Category>{{"g", {"p", "q", "r"}}});
    double with_k = 0.0, without_k = 0.0;
    int seeds = 0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(seed + 500);
        const auto ds = line_dataset(schema, 6, rng);
        SearchConfig config;
        config.population_size = 50;
        config.generations = 10;
        config.max_complexity = 9;
        config.seed = seed;

        config.use_param_count_objective = true;
        const auto a = run_search(ds, config);
        config.use_param_count_objective = false;
        const auto b = run_search(ds, config);
        if (a.archive.empty() || b.archive.empty()) continue;

        auto best_k = [](const ParetoReport& r) {
            int k = std::numeric_limits<int>::max();
            for (const auto& c : r.archive) {
                if (c.objectives.loss < 1e-6) k = std::min(k, c.objectives.individual_parameters);
            }
            return k;
        };
        const int ka = best_k(a);
        const int kb = best_k(b);
        if (ka == std::numeric_limits<int>::max() || kb == std::numeric_limits<int>::max()) {
            continue;
        }
        with_k += ka;
        without_k += kb;
        ++seeds;
    }
    REQUIRE(seeds >= 10);
    CHECK(with_k / seeds <= without_k / seeds + 1e-9);
}
