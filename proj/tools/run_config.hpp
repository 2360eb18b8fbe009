// Flat key = value run configuration shared by the CLI subcommands.
#ifndef CATSR_TOOLS_RUN_CONFIG_HPP
#define CATSR_TOOLS_RUN_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "catsr/search.hpp"

namespace catsr::tools {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything a run needs: input columns, search knobs, fit knobs, seed.
struct RunConfig {
    std::string data;
    std::vector<std::string> features;
    std::vector<std::string> categories;
    std::string target;
    SearchConfig search;
};

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
/// Unknown keys throw ConfigError naming the key and line.
void apply_config_file(const std::string& path, RunConfig& config);

std::vector<std::string> split_list(const std::string& csv);

}  // namespace catsr::tools

#endif
