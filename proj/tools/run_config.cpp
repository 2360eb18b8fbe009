#include "run_config.hpp"

#include <charconv>
#include <fstream>

namespace catsr::tools {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& value, const std::string& key, int line) {
    T out{};
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    const auto result = std::from_chars(first, last, out);
    if (result.ec != std::errc{} || result.ptr != last) {
        throw ConfigError("config line " + std::to_string(line) + ": bad value for '" + key +
                          "': " + value);
    }
    return out;
}

bool parse_bool(const std::string& value, const std::string& key, int line) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config line " + std::to_string(line) + ": bad value for '" + key +
                      "': " + value);
}

}  // namespace

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= csv.size()) {
        const auto comma = csv.find(',', start);
        const auto end = comma == std::string::npos ? csv.size() : comma;
        const auto item = trim(csv.substr(start, end - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

void apply_config_file(const std::string& path, RunConfig& config) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);

    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const auto text = trim(raw);
        if (text.empty()) continue;

        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line) + ": expected 'key = value'");
        }
        const auto key = trim(text.substr(0, eq));
        const auto value = trim(text.substr(eq + 1));

        if (key == "data") {
            config.data = value;
        } else if (key == "features") {
            config.features = split_list(value);
        } else if (key == "categories") {
            config.categories = split_list(value);
        } else if (key == "target") {
            config.target = value;
        } else if (key == "population_size") {
            config.search.population_size = parse_number<int>(value, key, line);
        } else if (key == "generations") {
            config.search.generations = parse_number<int>(value, key, line);
        } else if (key == "max_complexity") {
            config.search.max_complexity = parse_number<int>(value, key, line);
        } else if (key == "tournament_arity") {
            config.search.tournament_arity = parse_number<int>(value, key, line);
        } else if (key == "crossover_prob") {
            config.search.crossover_prob = parse_number<double>(value, key, line);
        } else if (key == "subtree_mutation_prob") {
            config.search.subtree_mutation_prob = parse_number<double>(value, key, line);
        } else if (key == "point_mutation_prob") {
            config.search.point_mutation_prob = parse_number<double>(value, key, line);
        } else if (key == "use_param_count_objective") {
            config.search.use_param_count_objective = parse_bool(value, key, line);
        } else if (key == "max_iterations") {
            config.search.fit.max_iterations = parse_number<int>(value, key, line);
        } else if (key == "gradient_tol") {
            config.search.fit.gradient_tol = parse_number<double>(value, key, line);
        } else if (key == "step_tol") {
            config.search.fit.step_tol = parse_number<double>(value, key, line);
        } else if (key == "restarts") {
            config.search.fit.restarts = parse_number<int>(value, key, line);
        } else if (key == "seed") {
            config.search.seed = parse_number<uint64_t>(value, key, line);
        } else {
            throw ConfigError("config line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }
}

}  // namespace catsr::tools
