#include "catsr/synthetic.hpp"

#include "catsr/fit.hpp"

namespace catsr {

QuarticBenchmark quartic_benchmark() {
    CategorySchema schema({{"U", {"A", "B", "C", "D"}}, {"L", {"a", "b", "c"}}});

    const auto v1 = make_variable(0);
    auto term1 = make_binary(BinaryOp::Mul, make_param(ParamKind::shared(), 0), v1);
    auto term2 = make_binary(BinaryOp::Mul, make_param(ParamKind::partial(0), 1),
                             make_unary(UnaryOp::Square, v1));
    auto term3 = make_binary(BinaryOp::Mul, make_param(ParamKind::partial(1), 2),
                             make_binary(BinaryOp::Pow, v1, make_literal(3.0)));
    auto term4 = make_binary(BinaryOp::Mul, make_param(ParamKind::non_shared(), 3),
                             make_binary(BinaryOp::Pow, v1, make_literal(4.0)));
    Expression expression(make_binary(
        BinaryOp::Add,
        make_binary(BinaryOp::Add, make_binary(BinaryOp::Add, std::move(term1), std::move(term2)),
                    std::move(term3)),
        std::move(term4)));

    const BindingLayout layout(expression, schema);
    auto truth = ParameterBinding::zeros(layout);
    truth.shared[0] = 100.0;
    truth.partial[0][0] = {10.0, 20.0, 30.0, 40.0};
    truth.partial[1][0] = {1.0, 2.0, 3.0};
    truth.nonshared[0] = {0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10, 0.11, 0.12};

    return QuarticBenchmark{std::move(schema), std::move(expression), std::move(truth)};
}

Dataset dataset_from_cells(const CategorySchema& schema,
                           const std::vector<std::vector<double>>& v1_by_cell,
                           const Expression& model, const ParameterBinding& binding) {
    if (static_cast<int>(v1_by_cell.size()) != schema.combination_count()) {
        throw std::invalid_argument("one v1 list per combination required");
    }
    std::vector<double> features;
    std::vector<int> values;
    std::vector<double> target;
    for (int cell = 0; cell < schema.combination_count(); ++cell) {
        const auto cell_values = schema.combination_values(cell);
        for (double v1 : v1_by_cell[cell]) {
            features.push_back(v1);
            values.insert(values.end(), cell_values.begin(), cell_values.end());
            target.push_back(0.0);
        }
    }
    Dataset blank(schema, features, 1, values, target);
    auto y = predict(model, binding, blank);
    return Dataset(schema, std::move(features), 1, std::move(values), std::move(y));
}

Dataset sample_dataset(const CategorySchema& schema, const Expression& model,
                       const ParameterBinding& binding, int points_per_cell, double lo, double hi,
                       std::mt19937_64& rng) {
    std::uniform_real_distribution<double> v1(lo, hi);
    std::vector<std::vector<double>> cells(schema.combination_count());
    for (auto& cell : cells) {
        cell.resize(points_per_cell);
        for (auto& v : cell) v = v1(rng);
    }
    return dataset_from_cells(schema, cells, model, binding);
}

}  // namespace catsr
