#ifndef CATSR_SCHEMA_HPP
#define CATSR_SCHEMA_HPP

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace catsr {

/// The categorical variables of a problem and their value labels.
///
/// Category order and value order are fixed at construction and define the
/// combination index: a mixed-radix encoding of per-category value indices
/// with the last category varying fastest. For categories U={A,B,C,D} and
/// L={a,b,c} the combinations enumerate as Aa, Ab, Ac, Ba, ..., Dc.
class CategorySchema {
public:
    struct Category {
        std::string name;
        std::vector<std::string> values;
    };

    CategorySchema() = default;
    explicit CategorySchema(std::vector<Category> categories);

    int category_count() const { return static_cast<int>(categories_.size()); }
    const Category& category(int c) const { return categories_[c]; }
    int value_count(int c) const { return static_cast<int>(categories_[c].values.size()); }

    /// Product of all per-category value counts.
    int combination_count() const { return combination_count_; }

    int combination_index(std::span<const int> value_indices) const;
    std::vector<int> combination_values(int combination) const;

    /// Concatenated value labels, e.g. "Aa".
    std::string combination_label(int combination) const;

    /// Index of `label` within category `c`, or -1 when absent.
    int value_index(int c, std::string_view label) const;

    bool operator==(const CategorySchema&) const = default;

private:
    std::vector<Category> categories_;
    int combination_count_ = 0;
};

}  // namespace catsr

#endif
