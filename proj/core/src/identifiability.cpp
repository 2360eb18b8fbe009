#include "catsr/identifiability.hpp"

#include <limits>
#include <numeric>
#include <queue>

namespace catsr {

int ParamDemand::total(const CategorySchema& schema) const {
    int k = shared;
    for (int c = 0; c < schema.category_count(); ++c) {
        k += partial[c] * schema.value_count(c);
    }
    return k + non_shared * schema.combination_count();
}

ParamDemand param_demand(const Expression& e, const CategorySchema& schema) {
    ParamDemand d;
    d.partial.assign(schema.category_count(), 0);
    for (const auto& kind : e.terminal_kinds()) {
        switch (kind.sharing) {
            case Sharing::Shared: ++d.shared; break;
            case Sharing::Partial:
                if (kind.category >= schema.category_count()) {
                    throw std::out_of_range("parameter category index beyond schema");
                }
                ++d.partial[kind.category];
                break;
            case Sharing::NonShared: ++d.non_shared; break;
        }
    }
    return d;
}

namespace {

// Dense-capacity Edmonds-Karp; the graphs here have at most a few dozen nodes.
class MaxFlow {
public:
    explicit MaxFlow(int n) : n_(n), cap_(n, std::vector<int>(n, 0)) {}

    void add_edge(int from, int to, int capacity) { cap_[from][to] += capacity; }

    int run(int source, int sink) {
        int total = 0;
        while (true) {
            std::vector<int> parent(n_, -1);
            parent[source] = source;
            std::queue<int> frontier;
            frontier.push(source);
            while (!frontier.empty() && parent[sink] < 0) {
                const int u = frontier.front();
                frontier.pop();
                for (int v = 0; v < n_; ++v) {
                    if (parent[v] < 0 && cap_[u][v] > 0) {
                        parent[v] = u;
                        frontier.push(v);
                    }
                }
            }
            if (parent[sink] < 0) break;
            int bottleneck = std::numeric_limits<int>::max();
            for (int v = sink; v != source; v = parent[v]) {
                bottleneck = std::min(bottleneck, cap_[parent[v]][v]);
            }
            for (int v = sink; v != source; v = parent[v]) {
                cap_[parent[v]][v] -= bottleneck;
                cap_[v][parent[v]] += bottleneck;
            }
            total += bottleneck;
        }
        return total;
    }

    int residual(int from, int to) const { return cap_[from][to]; }

private:
    int n_;
    std::vector<std::vector<int>> cap_;
};

}  // namespace

IdentifiabilityReport check_identifiability(const ParamDemand& demand, const CategorySchema& schema,
                                            const std::vector<int>& counts) {
    if (static_cast<int>(counts.size()) != schema.combination_count()) {
        throw std::invalid_argument("cell count vector does not match schema");
    }
    IdentifiabilityReport report;

    const int n_cells = schema.combination_count();
    for (int cell = 0; cell < n_cells; ++cell) {
        if (counts[cell] < demand.non_shared) {
            report.shortfalls.push_back("combination " + schema.combination_label(cell) + " has " +
                                        std::to_string(counts[cell]) + " points, non-shared terminals need " +
                                        std::to_string(demand.non_shared));
        }
    }

    // Nodes: source, cells, one node per (category, value), one shared node, sink.
    int n_value_nodes = 0;
    std::vector<int> value_node_base(schema.category_count());
    for (int c = 0; c < schema.category_count(); ++c) {
        value_node_base[c] = n_value_nodes;
        n_value_nodes += schema.value_count(c);
    }
    const int source = 0;
    const int cell_base = 1;
    const int value_base = cell_base + n_cells;
    const int shared_node = value_base + n_value_nodes;
    const int sink = shared_node + 1;
    MaxFlow flow(sink + 1);

    const int big = std::numeric_limits<int>::max() / 4;
    for (int cell = 0; cell < n_cells; ++cell) {
        const int surplus = counts[cell] - demand.non_shared;
        if (surplus > 0) flow.add_edge(source, cell_base + cell, surplus);
        const auto values = schema.combination_values(cell);
        for (int c = 0; c < schema.category_count(); ++c) {
            flow.add_edge(cell_base + cell, value_base + value_node_base[c] + values[c], big);
        }
        flow.add_edge(cell_base + cell, shared_node, big);
    }
    int required = 0;
    for (int c = 0; c < schema.category_count(); ++c) {
        for (int v = 0; v < schema.value_count(c); ++v) {
            flow.add_edge(value_base + value_node_base[c] + v, sink, demand.partial[c]);
            required += demand.partial[c];
        }
    }
    flow.add_edge(shared_node, sink, demand.shared);
    required += demand.shared;

    const int served = flow.run(source, sink);
    if (served < required) {
        for (int c = 0; c < schema.category_count(); ++c) {
            for (int v = 0; v < schema.value_count(c); ++v) {
                const int missing = flow.residual(value_base + value_node_base[c] + v, sink);
                if (missing > 0) {
                    report.shortfalls.push_back("category " + schema.category(c).name + " value " +
                                                schema.category(c).values[v] + ": " + std::to_string(missing) +
                                                " more point(s) needed for partially-shared terminals");
                }
            }
        }
        const int missing_shared = flow.residual(shared_node, sink);
        if (missing_shared > 0) {
            report.shortfalls.push_back("shared terminals: " + std::to_string(missing_shared) +
                                        " more surplus point(s) needed");
        }
    }

    report.feasible = report.shortfalls.empty();
    return report;
}

IdentifiabilityReport check_identifiability(const Expression& e, const Dataset& ds) {
    return check_identifiability(param_demand(e, ds.schema()), ds.schema(), cell_counts(ds));
}

}  // namespace catsr
