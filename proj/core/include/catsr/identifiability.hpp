#ifndef CATSR_IDENTIFIABILITY_HPP
#define CATSR_IDENTIFIABILITY_HPP

#include <string>
#include <vector>

#include "catsr/dataset.hpp"
#include "catsr/expr.hpp"

namespace catsr {

/// Data demand of an expression, as parameter terminal counts by kind.
struct ParamDemand {
    int shared = 0;                 // n_s
    std::vector<int> partial;       // n_p(c) per category
    int non_shared = 0;             // n_n

    int total(const CategorySchema& schema) const;  // = k
};

ParamDemand param_demand(const Expression& e, const CategorySchema& schema);

struct IdentifiabilityReport {
    bool feasible = false;
    /// Human-readable shortfall per unmet requirement; empty when feasible.
    std::vector<std::string> shortfalls;
};

/// Minimum-data-requirement check. Every combination cell must hold at
/// least n_n points; the surplus must cover one point per partial terminal
/// per category value plus one point per shared terminal, where each
/// surplus point serves exactly one requirement. Decided by integer
/// max-flow on the cell/requirement transportation graph.
IdentifiabilityReport check_identifiability(const ParamDemand& demand, const CategorySchema& schema,
                                            const std::vector<int>& counts);

IdentifiabilityReport check_identifiability(const Expression& e, const Dataset& ds);

}  // namespace catsr

#endif
