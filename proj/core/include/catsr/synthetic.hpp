#ifndef CATSR_SYNTHETIC_HPP
#define CATSR_SYNTHETIC_HPP

#include <random>

#include "catsr/binding.hpp"
#include "catsr/dataset.hpp"
#include "catsr/expr.hpp"

namespace catsr {

/// The built-in two-category benchmark:
///   y = CS1*v1 + C1_1*square(v1) + C2_1*(v1^3) + CI1*(v1^4)
/// over categories U = {A,B,C,D} and L = {a,b,c}, with reference values
/// CS1 = 100, C1_1 = 10..40, C2_1 = 1..3, CI1 = 0.01..0.12.
struct QuarticBenchmark {
    CategorySchema schema;
    Expression expression;
    ParameterBinding truth;
};

QuarticBenchmark quartic_benchmark();

/// Noise-free dataset for a known model: one row per listed v1 value per
/// cell, targets evaluated from the binding.
Dataset dataset_from_cells(const CategorySchema& schema,
                           const std::vector<std::vector<double>>& v1_by_cell,
                           const Expression& model, const ParameterBinding& binding);

/// `points_per_cell` rows per combination with v1 uniform in [lo, hi].
Dataset sample_dataset(const CategorySchema& schema, const Expression& model,
                       const ParameterBinding& binding, int points_per_cell, double lo, double hi,
                       std::mt19937_64& rng);

}  // namespace catsr

#endif
