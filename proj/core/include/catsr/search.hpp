#ifndef CATSR_SEARCH_HPP
#define CATSR_SEARCH_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "catsr/dataset.hpp"
#include "catsr/expr.hpp"
#include "catsr/fit.hpp"

namespace catsr {

/// Minimization objectives of one candidate.
struct Objectives {
    double loss = std::numeric_limits<double>::infinity();  // 1 - R^2
    int complexity = 0;
    int individual_parameters = 0;  // k

    bool finite() const { return std::isfinite(loss); }
};

/// True when `a` is no worse in every objective and strictly better in one.
bool dominates(const Objectives& a, const Objectives& b);

struct Candidate {
    Expression expression;
    FitResult fit;
    Objectives objectives;
};

struct SearchConfig {
    int population_size = 200;
    int generations = 100;
    int max_complexity = 15;
    int tournament_arity = 2;
    double crossover_prob = 0.5;
    double subtree_mutation_prob = 0.3;
    double point_mutation_prob = 0.2;
    /// When false the individual-parameter count is dropped from selection
    /// (it is still reported on candidates).
    bool use_param_count_objective = true;
    FitOptions fit;
    uint64_t seed = 0;
};

/// Non-dominated sorting; fronts hold indices into `objectives`.
std::vector<std::vector<int>> pareto_rank(std::span<const Objectives> objectives);

/// Crowding distance per front member, aligned with `front`.
std::vector<double> crowding_distance(const std::vector<int>& front,
                                      std::span<const Objectives> objectives);

Expression point_mutation(const Expression& e, const CategorySchema& schema, int n_features,
                          std::mt19937_64& rng);
Expression subtree_mutation(const Expression& e, const CategorySchema& schema, int n_features,
                            int max_complexity, std::mt19937_64& rng);
Expression subtree_crossover(const Expression& a, const Expression& b, int max_complexity,
                             std::mt19937_64& rng);

/// Simplifies, fits (optionally warm-started), and scores an expression.
Candidate evaluate_candidate(Expression e, const Dataset& ds, const SearchConfig& config,
                             const ParameterBinding* warm_start, std::mt19937_64& rng);

std::vector<Candidate> initialize_population(const SearchConfig& config, const Dataset& ds,
                                             std::mt19937_64& rng);

struct ParetoReport {
    std::vector<Candidate> archive;  // all-time non-dominated set
    SearchConfig config;
};

/// Generational multi-objective GP loop. Deterministic for a fixed seed.
ParetoReport run_search(const Dataset& ds, const SearchConfig& config);

}  // namespace catsr

#endif
