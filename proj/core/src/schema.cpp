#include "catsr/schema.hpp"

#include <stdexcept>
#include <unordered_set>

namespace catsr {

CategorySchema::CategorySchema(std::vector<Category> categories)
    : categories_(std::move(categories)) {
    if (categories_.empty()) {
        throw std::invalid_argument("schema requires at least one category");
    }
    combination_count_ = 1;
    for (const auto& cat : categories_) {
        if (cat.values.empty()) {
            throw std::invalid_argument("category '" + cat.name + "' has no values");
        }
        std::unordered_set<std::string_view> seen;
        for (const auto& v : cat.values) {
            if (!seen.insert(v).second) {
                throw std::invalid_argument("duplicate value '" + v + "' in category '" + cat.name + "'");
            }
        }
        combination_count_ *= static_cast<int>(cat.values.size());
    }
}

int CategorySchema::combination_index(std::span<const int> value_indices) const {
    if (value_indices.size() != categories_.size()) {
        throw std::invalid_argument("value index count does not match category count");
    }
    int idx = 0;
    for (size_t c = 0; c < categories_.size(); ++c) {
        const int n = static_cast<int>(categories_[c].values.size());
        if (value_indices[c] < 0 || value_indices[c] >= n) {
            throw std::out_of_range("value index out of range for category '" + categories_[c].name + "'");
        }
        idx = idx * n + value_indices[c];
    }
    return idx;
}

std::vector<int> CategorySchema::combination_values(int combination) const {
    if (combination < 0 || combination >= combination_count_) {
        throw std::out_of_range("combination index out of range");
    }
    std::vector<int> out(categories_.size());
    for (int c = static_cast<int>(categories_.size()) - 1; c >= 0; --c) {
        const int n = static_cast<int>(categories_[c].values.size());
        out[c] = combination % n;
        combination /= n;
    }
    return out;
}

std::string CategorySchema::combination_label(int combination) const {
    const auto values = combination_values(combination);
    std::string label;
    for (size_t c = 0; c < categories_.size(); ++c) {
        label += categories_[c].values[values[c]];
    }
    return label;
}

int CategorySchema::value_index(int c, std::string_view label) const {
    const auto& values = categories_[c].values;
    for (size_t i = 0; i < values.size(); ++i) {
        if (values[i] == label) return static_cast<int>(i);
    }
    return -1;
}

}  // namespace catsr
