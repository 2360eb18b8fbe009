#ifndef CATSR_BINDING_HPP
#define CATSR_BINDING_HPP

#include <random>
#include <span>
#include <string>
#include <vector>

#include "catsr/expr.hpp"
#include "catsr/schema.hpp"

namespace catsr {

/// Maps the parameter terminals of an expression onto the flat vector of
/// individual parameters, for a concrete schema.
///
/// Flattening order: all shared terminals, then per-category partial
/// terminals (category order, terminal order, value order), then non-shared
/// terminals (terminal order, combination order).
class BindingLayout {
public:
    BindingLayout(const Expression& e, const CategorySchema& schema);

    int individual_count() const { return k_; }  // k
    int terminal_count() const { return m_; }    // m

    int n_shared() const { return n_shared_; }
    int n_partial(int category) const { return n_partial_[category]; }
    int n_non_shared() const { return n_non_shared_; }

    ParamKind terminal_kind(int t) const { return kinds_[t]; }
    int per_kind_index(int t) const { return per_kind_[t]; }

    /// Flat column of terminal `t` for a row with the given per-category
    /// value indices and combination index.
    int column(int t, std::span<const int> value_indices, int combination) const;

    const CategorySchema& schema() const { return schema_; }

private:
    CategorySchema schema_;
    std::vector<ParamKind> kinds_;
    std::vector<int> per_kind_;
    std::vector<int> base_;  // flat offset of each terminal's first value
    int n_shared_ = 0;
    std::vector<int> n_partial_;
    int n_non_shared_ = 0;
    int k_ = 0;
    int m_ = 0;
};

/// Concrete real values behind every parameter terminal of one expression.
struct ParameterBinding {
    std::vector<double> shared;                             // [shared terminal]
    std::vector<std::vector<std::vector<double>>> partial;  // [category][terminal][value]
    std::vector<std::vector<double>> nonshared;             // [terminal][combination]

    static ParameterBinding zeros(const BindingLayout& layout);
    static ParameterBinding random(const BindingLayout& layout, std::mt19937_64& rng,
                                   double lo = -1.0, double hi = 1.0);

    bool matches(const BindingLayout& layout) const;

    std::vector<double> flatten(const BindingLayout& layout) const;
    static ParameterBinding unflatten(const BindingLayout& layout, std::span<const double> flat);

    /// Value of terminal `t` for a row.
    double value_for(const BindingLayout& layout, int t, std::span<const int> value_indices,
                     int combination) const;
};

/// Multiplicative Gaussian jitter: p -> p + scale * p * r, r ~ N(0,1),
/// drawn fresh per individual parameter.
ParameterBinding perturb(const ParameterBinding& binding, double scale, std::mt19937_64& rng);

/// One line per individual parameter, e.g. "C1_1[B] = 20".
std::vector<std::string> describe_parameters(const BindingLayout& layout,
                                             const ParameterBinding& binding);

}  // namespace catsr

#endif
