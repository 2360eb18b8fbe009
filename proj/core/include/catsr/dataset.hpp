#ifndef CATSR_DATASET_HPP
#define CATSR_DATASET_HPP

#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "catsr/schema.hpp"

namespace catsr {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Immutable tabular dataset: continuous features, per-row category value
/// indices, and a target. Rows are partitioned into cells by category-value
/// combination at construction.
class Dataset {
public:
    /// `features` is row-major n x d, `value_indices` row-major n x
    /// category_count. All feature and target entries must be finite.
    Dataset(CategorySchema schema, std::vector<double> features, int n_features,
            std::vector<int> value_indices, std::vector<double> target);

    const CategorySchema& schema() const { return schema_; }
    int n_rows() const { return static_cast<int>(target_.size()); }
    int n_features() const { return n_features_; }

    double feature(int row, int j) const { return features_[static_cast<size_t>(row) * n_features_ + j]; }
    std::span<const double> feature_row(int row) const {
        return {features_.data() + static_cast<size_t>(row) * n_features_, static_cast<size_t>(n_features_)};
    }
    double target(int row) const { return target_[row]; }
    std::span<const double> targets() const { return target_; }

    int value_index(int row, int category) const {
        return value_indices_[static_cast<size_t>(row) * schema_.category_count() + category];
    }
    std::span<const int> value_indices(int row) const {
        return {value_indices_.data() + static_cast<size_t>(row) * schema_.category_count(),
                static_cast<size_t>(schema_.category_count())};
    }

    /// Combination cell of a row.
    int combination(int row) const { return combination_[row]; }

    const std::vector<int>& cell_rows(int combination) const { return cells_[combination]; }

    /// Subset with the same schema; rows keep their combination indices.
    Dataset subset(std::span<const int> rows) const;

private:
    CategorySchema schema_;
    std::vector<double> features_;
    int n_features_ = 0;
    std::vector<int> value_indices_;
    std::vector<double> target_;
    std::vector<int> combination_;
    std::vector<std::vector<int>> cells_;  // rows by combination index
};

/// Loads a CSV with a header row. Category value sets are inferred from the
/// distinct entries of each category column in first-appearance order.
Dataset load_csv(const std::string& path, const std::vector<std::string>& feature_columns,
                 const std::vector<std::string>& category_columns, const std::string& target_column);

/// Row counts per combination index; combinations without rows report 0.
std::vector<int> cell_counts(const Dataset& ds);

/// Per-cell split: round(count * test_fraction) rows (ties toward train) go
/// to test, chosen uniformly without replacement.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double test_fraction,
                                             std::mt19937_64& rng);

}  // namespace catsr

#endif
