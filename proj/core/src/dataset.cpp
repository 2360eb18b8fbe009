#include "catsr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace catsr {

Dataset::Dataset(CategorySchema schema, std::vector<double> features, int n_features,
                 std::vector<int> value_indices, std::vector<double> target)
    : schema_(std::move(schema)),
      features_(std::move(features)),
      n_features_(n_features),
      value_indices_(std::move(value_indices)),
      target_(std::move(target)) {
    const size_t n = target_.size();
    if (n_features_ < 0 || features_.size() != n * n_features_) {
        throw DataError("feature matrix shape does not match row count");
    }
    const int n_cats = schema_.category_count();
    if (value_indices_.size() != n * n_cats) {
        throw DataError("category index matrix shape does not match row count");
    }
    for (double v : features_) {
        if (!std::isfinite(v)) throw DataError("non-finite feature value");
    }
    for (double v : target_) {
        if (!std::isfinite(v)) throw DataError("non-finite target value");
    }
    combination_.resize(n);
    cells_.assign(schema_.combination_count(), {});
    for (size_t i = 0; i < n; ++i) {
        combination_[i] = schema_.combination_index(this->value_indices(static_cast<int>(i)));
        cells_[combination_[i]].push_back(static_cast<int>(i));
    }
}

Dataset Dataset::subset(std::span<const int> rows) const {
    std::vector<double> features;
    std::vector<int> values;
    std::vector<double> target;
    features.reserve(rows.size() * n_features_);
    values.reserve(rows.size() * schema_.category_count());
    target.reserve(rows.size());
    for (int r : rows) {
        const auto f = feature_row(r);
        features.insert(features.end(), f.begin(), f.end());
        const auto v = value_indices(r);
        values.insert(values.end(), v.begin(), v.end());
        target.push_back(target_[r]);
    }
    return Dataset(schema_, std::move(features), n_features_, std::move(values), std::move(target));
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        const auto begin = field.find_first_not_of(" \t\r");
        const auto end = field.find_last_not_of(" \t\r");
        fields.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_numeric(const std::string& cell, int row, const std::string& column) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr != end || cell.empty()) {
        throw DataError("cannot parse numeric value '" + cell + "' at row " + std::to_string(row) +
                        ", column '" + column + "'");
    }
    return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::vector<std::string>& feature_columns,
                 const std::vector<std::string>& category_columns, const std::string& target_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file '" + path + "'");
    const auto header = split_line(line);

    auto column_of = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw DataError("missing column '" + name + "' in '" + path + "'");
        return static_cast<int>(it - header.begin());
    };

    std::vector<int> feature_cols, category_cols;
    for (const auto& name : feature_columns) feature_cols.push_back(column_of(name));
    for (const auto& name : category_columns) category_cols.push_back(column_of(name));
    const int target_col = column_of(target_column);

    // Value labels in first-appearance order.
    std::vector<std::vector<std::string>> labels(category_columns.size());
    std::vector<double> features;
    std::vector<int> values;
    std::vector<double> target;

    int row = 1;  // data row number, 1-based, for error messages
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_line(line);
        if (fields.size() != header.size()) {
            throw DataError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(header.size()));
        }
        for (size_t c = 0; c < category_cols.size(); ++c) {
            const auto& label = fields[category_cols[c]];
            auto& known = labels[c];
            auto it = std::find(known.begin(), known.end(), label);
            if (it == known.end()) {
                known.push_back(label);
                it = known.end() - 1;
            }
            values.push_back(static_cast<int>(it - known.begin()));
        }
        for (size_t f = 0; f < feature_cols.size(); ++f) {
            features.push_back(parse_numeric(fields[feature_cols[f]], row, feature_columns[f]));
        }
        target.push_back(parse_numeric(fields[target_col], row, target_column));
        ++row;
    }
    if (target.empty()) throw DataError("no data rows in '" + path + "'");

    std::vector<CategorySchema::Category> cats;
    for (size_t c = 0; c < category_columns.size(); ++c) {
        cats.push_back({category_columns[c], std::move(labels[c])});
    }
    return Dataset(CategorySchema(std::move(cats)), std::move(features),
                   static_cast<int>(feature_columns.size()), std::move(values), std::move(target));
}

std::vector<int> cell_counts(const Dataset& ds) {
    std::vector<int> counts(ds.schema().combination_count(), 0);
    for (int i = 0; i < ds.n_rows(); ++i) ++counts[ds.combination(i)];
    return counts;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double test_fraction,
                                             std::mt19937_64& rng) {
    if (test_fraction < 0.0 || test_fraction >= 1.0) {
        throw std::invalid_argument("test_fraction must be in [0, 1)");
    }
    std::vector<int> train_rows, test_rows;
    for (int cell = 0; cell < ds.schema().combination_count(); ++cell) {
        auto rows = ds.cell_rows(cell);  // copy, shuffled below
        const double want = rows.size() * test_fraction;
        // nearest, ties toward train
        const int n_test = static_cast<int>(std::ceil(want - 0.5));
        std::shuffle(rows.begin(), rows.end(), rng);
        for (size_t i = 0; i < rows.size(); ++i) {
            (static_cast<int>(i) < n_test ? test_rows : train_rows).push_back(rows[i]);
        }
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {ds.subset(train_rows), ds.subset(test_rows)};
}

}  // namespace catsr
