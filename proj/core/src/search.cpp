#include "catsr/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace catsr {

bool dominates(const Objectives& a, const Objectives& b) {
    const bool no_worse = a.loss <= b.loss && a.complexity <= b.complexity &&
                          a.individual_parameters <= b.individual_parameters;
    const bool better = a.loss < b.loss || a.complexity < b.complexity ||
                        a.individual_parameters < b.individual_parameters;
    return no_worse && better;
}

std::vector<std::vector<int>> pareto_rank(std::span<const Objectives> objectives) {
    const int n = static_cast<int>(objectives.size());
    std::vector<int> domination_count(n, 0);
    std::vector<std::vector<int>> dominated_by(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && dominates(objectives[i], objectives[j])) {
                dominated_by[i].push_back(j);
                ++domination_count[j];
            }
        }
    }
    std::vector<std::vector<int>> fronts;
    std::vector<int> current;
    for (int i = 0; i < n; ++i) {
        if (domination_count[i] == 0) current.push_back(i);
    }
    while (!current.empty()) {
        fronts.push_back(current);
        std::vector<int> next;
        for (int i : current) {
            for (int j : dominated_by[i]) {
                if (--domination_count[j] == 0) next.push_back(j);
            }
        }
        std::sort(next.begin(), next.end());
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<int>& front,
                                      std::span<const Objectives> objectives) {
    const size_t n = front.size();
    std::vector<double> distance(n, 0.0);
    if (n <= 2) {
        std::fill(distance.begin(), distance.end(), std::numeric_limits<double>::infinity());
        return distance;
    }
    auto objective = [&](int idx, int dim) -> double {
        const auto& o = objectives[idx];
        if (dim == 0) return o.loss;
        if (dim == 1) return o.complexity;
        return o.individual_parameters;
    };
    std::vector<int> order(n);
    for (int dim = 0; dim < 3; ++dim) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return objective(front[a], dim) < objective(front[b], dim);
        });
        const double lo = objective(front[order.front()], dim);
        const double hi = objective(front[order.back()], dim);
        distance[order.front()] = std::numeric_limits<double>::infinity();
        distance[order.back()] = std::numeric_limits<double>::infinity();
        if (hi <= lo) continue;
        for (size_t i = 1; i + 1 < n; ++i) {
            distance[order[i]] +=
                (objective(front[order[i + 1]], dim) - objective(front[order[i - 1]], dim)) / (hi - lo);
        }
    }
    return distance;
}

namespace {

NodePtr random_terminal(const CategorySchema& schema, int n_features, std::mt19937_64& rng) {
    // Full adapted terminal set, uniform over node types.
    const int n_options = (n_features > 0 ? 1 : 0) + 1 + 2 + schema.category_count();
    std::uniform_int_distribution<int> pick(0, n_options - 1);
    int choice = pick(rng);
    if (n_features > 0) {
        if (choice == 0) {
            std::uniform_int_distribution<int> var(0, n_features - 1);
            return make_variable(var(rng));
        }
        --choice;
    }
    if (choice == 0) {
        std::uniform_real_distribution<double> value(-5.0, 5.0);
        return make_literal(value(rng));
    }
    if (choice == 1) return make_param(ParamKind::shared());
    if (choice == 2) return make_param(ParamKind::non_shared());
    return make_param(ParamKind::partial(choice - 3));
}

bool same_leaf(const NodePtr& a, const NodePtr& b) {
    if (a->value.index() != b->value.index()) return false;
    if (const auto* av = std::get_if<Node::Variable>(&a->value)) {
        return av->index == std::get<Node::Variable>(b->value).index;
    }
    if (std::holds_alternative<Node::Literal>(a->value)) return false;  // fresh value differs
    return std::get<Node::Param>(a->value).kind == std::get<Node::Param>(b->value).kind;
}

}  // namespace

Expression point_mutation(const Expression& e, const CategorySchema& schema, int n_features,
                          std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, e.node_count() - 1);
    const int target = pick(rng);
    const auto old = subtree_at(e.root(), target);

    NodePtr replacement;
    if (const auto* b = std::get_if<Node::Binary>(&old->value)) {
        std::uniform_int_distribution<int> op(0, 4);
        BinaryOp next;
        do {
            next = static_cast<BinaryOp>(op(rng));
        } while (next == b->op);
        replacement = make_binary(next, b->lhs, b->rhs);
    } else if (const auto* u = std::get_if<Node::Unary>(&old->value)) {
        std::uniform_int_distribution<int> op(0, 3);
        UnaryOp next;
        do {
            next = static_cast<UnaryOp>(op(rng));
        } while (next == u->op);
        replacement = make_unary(next, u->child);
    } else {
        do {
            replacement = random_terminal(schema, n_features, rng);
        } while (same_leaf(replacement, old));
    }
    return Expression(replace_at(e.root(), target, replacement));
}

Expression subtree_mutation(const Expression& e, const CategorySchema& schema, int n_features,
                            int max_complexity, std::mt19937_64& rng) {
    for (int attempt = 0; attempt < 10; ++attempt) {
        std::uniform_int_distribution<int> pick(0, e.node_count() - 1);
        const int target = pick(rng);
        const int removed = node_count(subtree_at(e.root(), target));
        const int budget = std::max(1, max_complexity - (e.node_count() - removed));
        const auto fresh = random_expression(schema, n_features, budget, rng);
        Expression offspring(replace_at(e.root(), target, fresh.root()));
        if (offspring.node_count() <= max_complexity) return offspring;
    }
    return e;
}

Expression subtree_crossover(const Expression& a, const Expression& b, int max_complexity,
                             std::mt19937_64& rng) {
    for (int attempt = 0; attempt < 10; ++attempt) {
        std::uniform_int_distribution<int> pick_a(0, a.node_count() - 1);
        std::uniform_int_distribution<int> pick_b(0, b.node_count() - 1);
        const auto donor = subtree_at(b.root(), pick_b(rng));
        Expression offspring(replace_at(a.root(), pick_a(rng), donor));
        if (offspring.node_count() <= max_complexity) return offspring;
    }
    return a;
}

namespace {

// Warm start: copy parent values for terminals that line up by kind and
// per-kind position; everything else starts fresh.
ParameterBinding align_binding(const BindingLayout& layout, const ParameterBinding& parent,
                               std::mt19937_64& rng) {
    auto out = ParameterBinding::random(layout, rng);
    const size_t n_shared = std::min(out.shared.size(), parent.shared.size());
    std::copy_n(parent.shared.begin(), n_shared, out.shared.begin());
    const size_t n_cats = std::min(out.partial.size(), parent.partial.size());
    for (size_t c = 0; c < n_cats; ++c) {
        const size_t n_terms = std::min(out.partial[c].size(), parent.partial[c].size());
        for (size_t t = 0; t < n_terms; ++t) {
            if (out.partial[c][t].size() == parent.partial[c][t].size()) {
                out.partial[c][t] = parent.partial[c][t];
            }
        }
    }
    const size_t n_non = std::min(out.nonshared.size(), parent.nonshared.size());
    for (size_t t = 0; t < n_non; ++t) {
        if (out.nonshared[t].size() == parent.nonshared[t].size()) {
            out.nonshared[t] = parent.nonshared[t];
        }
    }
    return out;
}

Objectives score(const Expression& e, const FitResult& fit, const CategorySchema& schema) {
    Objectives o;
    o.complexity = complexity(e);
    o.individual_parameters = count_individual_parameters(e, schema);
    if (!fit.failed && fit.r_squared && std::isfinite(*fit.r_squared)) {
        o.loss = 1.0 - *fit.r_squared;
    }
    return o;
}

}  // namespace

Candidate evaluate_candidate(Expression e, const Dataset& ds, const SearchConfig& config,
                             const ParameterBinding* warm_start, std::mt19937_64& rng) {
    Expression simplified = simplify(e);
    std::optional<ParameterBinding> init;
    if (warm_start) {
        const BindingLayout layout(simplified, ds.schema());
        init = align_binding(layout, *warm_start, rng);
    }
    FitResult fit = fit_parameters(simplified, ds, init, config.fit, rng);
    Objectives objectives = score(simplified, fit, ds.schema());
    return Candidate{std::move(simplified), std::move(fit), objectives};
}

std::vector<Candidate> initialize_population(const SearchConfig& config, const Dataset& ds,
                                             std::mt19937_64& rng) {
    std::vector<Candidate> population;
    population.reserve(config.population_size);
    for (int i = 0; i < config.population_size; ++i) {
        Candidate best = evaluate_candidate(
            random_expression(ds.schema(), ds.n_features(), config.max_complexity, rng), ds, config,
            nullptr, rng);
        for (int retry = 0; retry < 10 && !best.objectives.finite(); ++retry) {
            best = evaluate_candidate(
                random_expression(ds.schema(), ds.n_features(), config.max_complexity, rng), ds,
                config, nullptr, rng);
        }
        population.push_back(std::move(best));
    }
    return population;
}

namespace {

struct RankInfo {
    std::vector<int> rank;         // front index; INT_MAX for non-finite loss
    std::vector<double> crowding;  // 0 for non-finite loss
};

RankInfo rank_population(const std::vector<Candidate>& population, bool use_k) {
    std::vector<Objectives> objs;
    std::vector<int> finite_idx;
    for (size_t i = 0; i < population.size(); ++i) {
        if (population[i].objectives.finite()) {
            auto o = population[i].objectives;
            if (!use_k) o.individual_parameters = 0;
            objs.push_back(o);
            finite_idx.push_back(static_cast<int>(i));
        }
    }
    RankInfo info;
    info.rank.assign(population.size(), std::numeric_limits<int>::max());
    info.crowding.assign(population.size(), 0.0);
    const auto fronts = pareto_rank(objs);
    for (size_t f = 0; f < fronts.size(); ++f) {
        const auto dist = crowding_distance(fronts[f], objs);
        for (size_t i = 0; i < fronts[f].size(); ++i) {
            info.rank[finite_idx[fronts[f][i]]] = static_cast<int>(f);
            info.crowding[finite_idx[fronts[f][i]]] = dist[i];
        }
    }
    return info;
}

// Selection order: front rank, then crowding, then lower k, lower
// complexity, insertion order.
bool selection_better(const std::vector<Candidate>& pop, const RankInfo& info, int a, int b) {
    if (info.rank[a] != info.rank[b]) return info.rank[a] < info.rank[b];
    if (info.crowding[a] != info.crowding[b]) return info.crowding[a] > info.crowding[b];
    const auto& oa = pop[a].objectives;
    const auto& ob = pop[b].objectives;
    if (oa.individual_parameters != ob.individual_parameters) {
        return oa.individual_parameters < ob.individual_parameters;
    }
    if (oa.complexity != ob.complexity) return oa.complexity < ob.complexity;
    return a < b;
}

int tournament(const std::vector<Candidate>& pop, const RankInfo& info, int arity,
               std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(pop.size()) - 1);
    int best = pick(rng);
    for (int i = 1; i < arity; ++i) {
        const int challenger = pick(rng);
        if (selection_better(pop, info, challenger, best)) best = challenger;
    }
    return best;
}

void update_archive(std::vector<Candidate>& archive, const Candidate& candidate) {
    if (!candidate.objectives.finite()) return;
    for (const auto& member : archive) {
        if (dominates(member.objectives, candidate.objectives)) return;
        if (member.objectives.loss == candidate.objectives.loss &&
            member.objectives.complexity == candidate.objectives.complexity &&
            member.objectives.individual_parameters == candidate.objectives.individual_parameters) {
            return;  // duplicate objective triple, keep the earlier find
        }
    }
    std::erase_if(archive, [&](const Candidate& member) {
        return dominates(candidate.objectives, member.objectives);
    });
    archive.push_back(candidate);
}

std::vector<Candidate> environmental_selection(std::vector<Candidate> merged, int population_size,
                                               bool use_k) {
    const auto info = rank_population(merged, use_k);
    std::vector<int> order(merged.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return selection_better(merged, info, a, b); });
    std::vector<Candidate> next;
    next.reserve(population_size);
    for (int i = 0; i < population_size && i < static_cast<int>(order.size()); ++i) {
        next.push_back(std::move(merged[order[i]]));
    }
    return next;
}

}  // namespace

ParetoReport run_search(const Dataset& ds, const SearchConfig& config) {
    if (ds.n_rows() == 0) throw std::invalid_argument("cannot search on an empty dataset");
    if (config.population_size < 2) throw std::invalid_argument("population_size must be >= 2");
    if (config.max_complexity < 1) throw std::invalid_argument("max_complexity must be >= 1");

    std::mt19937_64 rng(config.seed);
    auto population = initialize_population(config, ds, rng);

    std::vector<Candidate> archive;
    for (const auto& c : population) update_archive(archive, c);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int gen = 0; gen < config.generations; ++gen) {
        const auto info = rank_population(population, config.use_param_count_objective);
        std::vector<Candidate> offspring;
        offspring.reserve(config.population_size);
        for (int i = 0; i < config.population_size; ++i) {
            const int parent = tournament(population, info, config.tournament_arity, rng);
            Expression expr = population[parent].expression;
            if (unit(rng) < config.crossover_prob) {
                const int mate = tournament(population, info, config.tournament_arity, rng);
                expr = subtree_crossover(expr, population[mate].expression, config.max_complexity, rng);
            }
            if (unit(rng) < config.subtree_mutation_prob) {
                expr = subtree_mutation(expr, ds.schema(), ds.n_features(), config.max_complexity, rng);
            }
            if (unit(rng) < config.point_mutation_prob) {
                expr = point_mutation(expr, ds.schema(), ds.n_features(), rng);
            }
            const ParameterBinding* warm =
                population[parent].fit.failed ? nullptr : &population[parent].fit.binding;
            offspring.push_back(evaluate_candidate(std::move(expr), ds, config, warm, rng));
            update_archive(archive, offspring.back());
        }
        for (auto& c : offspring) population.push_back(std::move(c));
        population = environmental_selection(std::move(population), config.population_size,
                                             config.use_param_count_objective);
    }

    std::sort(archive.begin(), archive.end(), [](const Candidate& a, const Candidate& b) {
        if (a.objectives.complexity != b.objectives.complexity) {
            return a.objectives.complexity < b.objectives.complexity;
        }
        return a.objectives.loss < b.objectives.loss;
    });
    return ParetoReport{std::move(archive), config};
}

}  // namespace catsr
