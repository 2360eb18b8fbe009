// catsr: symbolic regression with category-aware parameter sharing.
//
// Subcommands: fit, search, check, procession. Exit codes: 0 success,
// 1 fit failure, 2 input/config error, 3 unmet data requirements.
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "catsr/identifiability.hpp"
#include "catsr/procession.hpp"
#include "catsr/search.hpp"
#include "catsr/synthetic.hpp"
#include "json.hpp"
#include "run_config.hpp"

using namespace catsr;
using catsr::tools::ConfigError;
using catsr::tools::RunConfig;
using nlohmann::json;

namespace {

constexpr int kExitFitFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitInfeasible = 3;

Dataset load_dataset(const RunConfig& config) {
    if (config.data.empty()) throw ConfigError("missing input: --data");
    if (config.features.empty()) throw ConfigError("missing input: --features");
    if (config.categories.empty()) throw ConfigError("missing input: --categories");
    if (config.target.empty()) throw ConfigError("missing input: --target");
    return load_csv(config.data, config.features, config.categories, config.target);
}

Expression parse_expression(const std::string& text, const CategorySchema& schema) {
    try {
        return parse(text, schema);
    } catch (const ParseError& err) {
        throw ConfigError(std::string("cannot parse expression: ") + err.what());
    }
}

/// Individual-parameter names in flat (layout) order, matching the labels
/// used by the fit report, e.g. CS1, C1_1[B], CI1[Dc].
std::vector<std::string> flat_parameter_names(const BindingLayout& layout) {
    const auto& schema = layout.schema();
    std::vector<std::string> names(layout.individual_count());
    std::vector<int> per_kind_terminal(layout.terminal_count());
    for (int t = 0; t < layout.terminal_count(); ++t) {
        const auto kind = layout.terminal_kind(t);
        const int j = layout.per_kind_index(t) + 1;
        std::vector<int> no_values(schema.category_count(), 0);
        switch (kind.sharing) {
            case Sharing::Shared:
                names[layout.column(t, no_values, 0)] = "CS" + std::to_string(j);
                break;
            case Sharing::Partial: {
                const auto& cat = schema.category(kind.category);
                for (int v = 0; v < schema.value_count(kind.category); ++v) {
                    auto values = no_values;
                    values[kind.category] = v;
                    names[layout.column(t, values, 0)] = "C" + std::to_string(kind.category + 1) +
                                                         "_" + std::to_string(j) + "[" +
                                                         cat.values[v] + "]";
                }
                break;
            }
            case Sharing::NonShared:
                for (int combo = 0; combo < schema.combination_count(); ++combo) {
                    names[layout.column(t, no_values, combo)] =
                        "CI" + std::to_string(j) + "[" + schema.combination_label(combo) + "]";
                }
                break;
        }
    }
    return names;
}

/// Reads `name = value` lines in the format printed by the fit report.
ParameterBinding read_init_file(const std::string& path, const BindingLayout& layout) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open init file: " + path);
    const auto names = flat_parameter_names(layout);
    std::vector<double> flat(names.size(), 0.0);

    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        std::string name, eq;
        double value;
        if (!(row >> name)) continue;
        if (!(row >> eq >> value) || eq != "=") {
            throw ConfigError("init file line " + std::to_string(n) + ": expected 'name = value'");
        }
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            throw ConfigError("init file line " + std::to_string(n) + ": unknown parameter '" +
                              name + "'");
        }
        flat[it - names.begin()] = value;
    }
    return ParameterBinding::unflatten(layout, flat);
}

json parameters_json(const BindingLayout& layout, const ParameterBinding& binding) {
    const auto names = flat_parameter_names(layout);
    const auto flat = binding.flatten(layout);
    json out = json::object();
    for (size_t i = 0; i < names.size(); ++i) out[names[i]] = flat[i];
    return out;
}

json config_json(const RunConfig& config) {
    return json{{"data", config.data},
                {"features", config.features},
                {"categories", config.categories},
                {"target", config.target},
                {"population_size", config.search.population_size},
                {"generations", config.search.generations},
                {"max_complexity", config.search.max_complexity},
                {"tournament_arity", config.search.tournament_arity},
                {"crossover_prob", config.search.crossover_prob},
                {"subtree_mutation_prob", config.search.subtree_mutation_prob},
                {"point_mutation_prob", config.search.point_mutation_prob},
                {"use_param_count_objective", config.search.use_param_count_objective},
                {"max_iterations", config.search.fit.max_iterations},
                {"gradient_tol", config.search.fit.gradient_tol},
                {"step_tol", config.search.fit.step_tol},
                {"restarts", config.search.fit.restarts},
                {"seed", config.search.seed}};
}

void print_cell_table(const CategorySchema& schema, const std::vector<int>& counts,
                      std::ostream& out) {
    out << "cell counts:\n";
    for (int combo = 0; combo < schema.combination_count(); ++combo) {
        out << "  " << std::left << std::setw(12) << schema.combination_label(combo)
            << counts[combo] << "\n";
    }
}

int cmd_fit(const RunConfig& config, const std::string& expr_text, const std::string& init_path,
            const std::string& out_path) {
    const auto ds = load_dataset(config);
    const auto e = parse_expression(expr_text, ds.schema());
    const BindingLayout layout(e, ds.schema());

    const auto requirement = check_identifiability(e, ds);
    if (!requirement.feasible) {
        std::cerr << "warning: minimum data requirements not met; the fit may be degenerate\n";
        for (const auto& s : requirement.shortfalls) std::cerr << "warning:   " << s << "\n";
    }

    std::optional<ParameterBinding> init;
    if (!init_path.empty()) init = read_init_file(init_path, layout);

    std::mt19937_64 rng(config.search.seed);
    const auto fit = fit_parameters(e, ds, init, config.search.fit, rng);
    if (fit.failed) {
        std::cerr << "error: no initialization produced finite residuals\n";
        return kExitFitFailure;
    }

    std::cout << "expression:  " << to_string(e) << "\n";
    std::cout << "rows:        " << ds.n_rows() << "\n";
    std::cout << "sse:         " << format_real(fit.sse) << "\n";
    std::cout << "r_squared:   "
              << (fit.r_squared ? format_real(*fit.r_squared)
                                : std::string("undefined (zero target variance)"))
              << "\n";
    std::cout << "converged:   " << (fit.converged ? "yes" : "no") << "\n";
    std::cout << "iterations:  " << fit.n_iterations << "\n";
    std::cout << "parameters (k = " << layout.individual_count() << ", m = "
              << layout.terminal_count() << "):\n";
    for (const auto& line : describe_parameters(layout, fit.binding)) {
        std::cout << "  " << line << "\n";
    }

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw ConfigError("cannot open output file: " + out_path);
        json record{{"expression", to_string(e)},
                    {"rows", ds.n_rows()},
                    {"sse", fit.sse},
                    {"converged", fit.converged},
                    {"iterations", fit.n_iterations},
                    {"requirements_met", requirement.feasible},
                    {"parameters", parameters_json(layout, fit.binding)},
                    {"config", config_json(config)}};
        if (fit.r_squared) record["r_squared"] = *fit.r_squared;
        out << record.dump() << "\n";
    }
    return 0;
}

int cmd_search(const RunConfig& config, const std::string& out_path) {
    const auto ds = load_dataset(config);
    const auto report = run_search(ds, config.search);

    std::cout << std::left << std::setw(48) << "expression" << std::setw(12) << "r_squared"
              << std::setw(12) << "complexity" << "k\n";
    for (const auto& c : report.archive) {
        std::string rsq = "undefined";
        if (c.fit.r_squared) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6g", *c.fit.r_squared);
            rsq = buf;
        }
        std::cout << std::left << std::setw(48) << to_string(c.expression) << std::setw(12) << rsq
                  << std::setw(12) << c.objectives.complexity
                  << c.objectives.individual_parameters << "\n";
    }

    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot open output file: " + out_path);
    for (const auto& c : report.archive) {
        const BindingLayout layout(c.expression, ds.schema());
        json record{{"expression", to_string(c.expression)},
                    {"loss", c.objectives.loss},
                    {"complexity", c.objectives.complexity},
                    {"individual_parameters", c.objectives.individual_parameters},
                    {"sse", c.fit.sse},
                    {"parameters", parameters_json(layout, c.fit.binding)},
                    {"seed", config.search.seed},
                    {"config", config_json(config)}};
        if (c.fit.r_squared) record["r_squared"] = *c.fit.r_squared;
        out << record.dump() << "\n";
    }
    std::cerr << "archive: " << report.archive.size() << " candidates -> " << out_path << "\n";
    return 0;
}

int cmd_check(const RunConfig& config, const std::string& expr_text) {
    const auto ds = load_dataset(config);
    const auto e = parse_expression(expr_text, ds.schema());
    const auto demand = param_demand(e, ds.schema());

    print_cell_table(ds.schema(), cell_counts(ds), std::cout);
    std::cout << "demand: shared " << demand.shared;
    for (int c = 0; c < ds.schema().category_count(); ++c) {
        std::cout << ", partial(" << ds.schema().category(c).name << ") " << demand.partial[c];
    }
    std::cout << ", non-shared " << demand.non_shared << "\n";

    const auto report = check_identifiability(e, ds);
    for (const auto& s : report.shortfalls) std::cout << "shortfall: " << s << "\n";
    std::cout << "requirements met: " << (report.feasible ? "yes" : "no") << "\n";
    return report.feasible ? 0 : kExitInfeasible;
}

int cmd_procession(const ProcessionOptions& options, const CategorySchema& schema,
                   const std::string& out_path) {
    const auto rows = run_processions(options);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw ConfigError("cannot open output file: " + out_path);
        out = &file;
    }

    *out << "ID";
    for (int combo = 0; combo < schema.combination_count(); ++combo) {
        *out << "," << schema.combination_label(combo);
    }
    *out << ",mse_test,req\n";
    for (const auto& row : rows) {
        *out << row.procession << ":" << row.n_train;
        for (int count : row.cell_counts) *out << "," << count;
        *out << "," << (row.mse_test ? format_real(*row.mse_test) : std::string("N/A")) << ","
             << (row.requirements_met ? "yes" : "no") << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic regression with category-aware parameter sharing"};
    app.require_subcommand(1);

    RunConfig config;
    std::string config_path, expr_text, init_path, out_path;
    std::string features_csv, categories_csv;

    auto add_data_flags = [&](CLI::App* cmd) {
        cmd->add_option("--data", config.data, "input CSV path");
        cmd->add_option("--features", features_csv,
                        "comma-separated numeric feature columns (v1, v2, ...)");
        cmd->add_option("--categories", categories_csv, "comma-separated category columns");
        cmd->add_option("--target", config.target, "target column");
    };

    auto* fit_cmd = app.add_subcommand("fit", "fit a fixed expression to a dataset");
    add_data_flags(fit_cmd);
    fit_cmd->add_option("--expr", expr_text, "expression text")->required();
    fit_cmd->add_option("--init", init_path, "initial parameter values (name = value lines)");
    fit_cmd->add_option("--restarts", config.search.fit.restarts, "extra random starts");
    fit_cmd->add_option("--max-iterations", config.search.fit.max_iterations, "solver iterations");
    fit_cmd->add_option("--seed", config.search.seed, "random seed");
    fit_cmd->add_option("--out", out_path, "structured report path (one record)");

    auto* search_cmd = app.add_subcommand("search", "multi-objective expression search");
    add_data_flags(search_cmd);
    search_cmd->add_option("--config", config_path, "run configuration file (key = value)");
    search_cmd->add_option("--population", config.search.population_size, "population size");
    search_cmd->add_option("--generations", config.search.generations, "generations");
    search_cmd->add_option("--max-complexity", config.search.max_complexity, "complexity cap");
    search_cmd->add_option("--tournament-arity", config.search.tournament_arity,
                           "tournament size");
    search_cmd->add_option("--crossover-prob", config.search.crossover_prob,
                           "crossover probability");
    search_cmd->add_option("--subtree-mutation-prob", config.search.subtree_mutation_prob,
                           "subtree mutation probability");
    search_cmd->add_option("--point-mutation-prob", config.search.point_mutation_prob,
                           "point mutation probability");
    search_cmd->add_flag_function(
        "--no-param-count-objective",
        [&](int64_t) { config.search.use_param_count_objective = false; },
        "drop the individual-parameter objective from selection");
    search_cmd->add_option("--restarts", config.search.fit.restarts, "fit restarts per candidate");
    search_cmd->add_option("--seed", config.search.seed, "random seed");
    std::string search_out = "pareto.jsonl";
    search_cmd->add_option("--out", search_out, "structured report path");

    auto* check_cmd = app.add_subcommand("check", "minimum data requirement verdict");
    add_data_flags(check_cmd);
    check_cmd->add_option("--expr", expr_text, "expression text")->required();

    auto* procession_cmd =
        app.add_subcommand("procession", "data-sufficiency experiment on synthetic data");
    ProcessionOptions procession;
    procession_cmd->add_option("--processions", procession.processions, "number of processions");
    procession_cmd->add_option("--seed", procession.seed, "random seed");
    procession_cmd->add_option("--perturb-scale", procession.perturb_scale,
                               "parameter jitter scale");
    procession_cmd->add_option("--points-per-cell", procession.points_per_cell,
                               "samples per combination");
    procession_cmd->add_option("--refit-restarts", procession.refit_restarts,
                               "extra starts per refit");
    std::string procession_expr;
    procession_cmd->add_option("--expr", procession_expr,
                               "expression under study (default: built-in benchmark)");
    procession_cmd->add_option("--out", out_path, "log path (default: stdout)");

    // Parse flags first; a config file fills only the knobs no flag touched.
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        return app.exit(err) == 0 ? 0 : kExitInputError;
    }
    if (!features_csv.empty()) config.features = catsr::tools::split_list(features_csv);
    if (!categories_csv.empty()) config.categories = catsr::tools::split_list(categories_csv);

    try {
        if (!config_path.empty()) {
            RunConfig from_file = config;
            apply_config_file(config_path, from_file);
            // flags win: re-apply any explicitly set values
            RunConfig flags = config;
            config = from_file;
            auto keep = [](const CLI::App* cmd, const std::string& name) {
                return cmd->count(name) > 0;
            };
            if (keep(search_cmd, "--data")) config.data = flags.data;
            if (keep(search_cmd, "--features")) config.features = flags.features;
            if (keep(search_cmd, "--categories")) config.categories = flags.categories;
            if (keep(search_cmd, "--target")) config.target = flags.target;
            if (keep(search_cmd, "--population"))
                config.search.population_size = flags.search.population_size;
            if (keep(search_cmd, "--generations"))
                config.search.generations = flags.search.generations;
            if (keep(search_cmd, "--max-complexity"))
                config.search.max_complexity = flags.search.max_complexity;
            if (keep(search_cmd, "--tournament-arity"))
                config.search.tournament_arity = flags.search.tournament_arity;
            if (keep(search_cmd, "--crossover-prob"))
                config.search.crossover_prob = flags.search.crossover_prob;
            if (keep(search_cmd, "--subtree-mutation-prob"))
                config.search.subtree_mutation_prob = flags.search.subtree_mutation_prob;
            if (keep(search_cmd, "--point-mutation-prob"))
                config.search.point_mutation_prob = flags.search.point_mutation_prob;
            if (keep(search_cmd, "--no-param-count-objective"))
                config.search.use_param_count_objective = false;
            if (keep(search_cmd, "--restarts"))
                config.search.fit.restarts = flags.search.fit.restarts;
            if (keep(search_cmd, "--seed")) config.search.seed = flags.search.seed;
        }

        if (fit_cmd->parsed()) return cmd_fit(config, expr_text, init_path, out_path);
        if (search_cmd->parsed()) return cmd_search(config, search_out);
        if (check_cmd->parsed()) return cmd_check(config, expr_text);
        if (procession_cmd->parsed()) {
            const auto bench = quartic_benchmark();
            if (!procession_expr.empty()) {
                procession.expression = parse_expression(procession_expr, bench.schema);
            }
            return cmd_procession(procession, bench.schema, out_path);
        }
    } catch (const ConfigError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitInputError;
    } catch (const DataError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitInputError;
    }
    return 0;
}
