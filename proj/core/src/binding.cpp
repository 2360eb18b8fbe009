#include "catsr/binding.hpp"

#include <stdexcept>

namespace catsr {

BindingLayout::BindingLayout(const Expression& e, const CategorySchema& schema)
    : schema_(schema), kinds_(e.terminal_kinds()), m_(e.terminal_count()) {
    n_partial_.assign(schema.category_count(), 0);
    per_kind_.resize(m_);
    for (int t = 0; t < m_; ++t) {
        const auto& kind = kinds_[t];
        switch (kind.sharing) {
            case Sharing::Shared: per_kind_[t] = n_shared_++; break;
            case Sharing::Partial:
                if (kind.category >= schema.category_count()) {
                    throw std::out_of_range("parameter category index beyond schema");
                }
                per_kind_[t] = n_partial_[kind.category]++;
                break;
            case Sharing::NonShared: per_kind_[t] = n_non_shared_++; break;
        }
    }
    // Flat offsets: shared block, per-category partial blocks, non-shared block.
    int partial_block = 0;
    std::vector<int> partial_base(schema.category_count());
    for (int c = 0; c < schema.category_count(); ++c) {
        partial_base[c] = n_shared_ + partial_block;
        partial_block += n_partial_[c] * schema.value_count(c);
    }
    const int nonshared_base = n_shared_ + partial_block;
    k_ = nonshared_base + n_non_shared_ * schema.combination_count();

    base_.resize(m_);
    for (int t = 0; t < m_; ++t) {
        const auto& kind = kinds_[t];
        switch (kind.sharing) {
            case Sharing::Shared:
                base_[t] = per_kind_[t];
                break;
            case Sharing::Partial:
                base_[t] = partial_base[kind.category] + per_kind_[t] * schema.value_count(kind.category);
                break;
            case Sharing::NonShared:
                base_[t] = nonshared_base + per_kind_[t] * schema.combination_count();
                break;
        }
    }
}

int BindingLayout::column(int t, std::span<const int> value_indices, int combination) const {
    const auto& kind = kinds_[t];
    switch (kind.sharing) {
        case Sharing::Shared: return base_[t];
        case Sharing::Partial: return base_[t] + value_indices[kind.category];
        case Sharing::NonShared: return base_[t] + combination;
    }
    return -1;
}

ParameterBinding ParameterBinding::zeros(const BindingLayout& layout) {
    const auto& schema = layout.schema();
    ParameterBinding b;
    b.shared.assign(layout.n_shared(), 0.0);
    b.partial.resize(schema.category_count());
    for (int c = 0; c < schema.category_count(); ++c) {
        b.partial[c].assign(layout.n_partial(c), std::vector<double>(schema.value_count(c), 0.0));
    }
    b.nonshared.assign(layout.n_non_shared(), std::vector<double>(schema.combination_count(), 0.0));
    return b;
}

ParameterBinding ParameterBinding::random(const BindingLayout& layout, std::mt19937_64& rng,
                                          double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    auto b = zeros(layout);
    for (auto& v : b.shared) v = dist(rng);
    for (auto& cat : b.partial) {
        for (auto& term : cat) {
            for (auto& v : term) v = dist(rng);
        }
    }
    for (auto& term : b.nonshared) {
        for (auto& v : term) v = dist(rng);
    }
    return b;
}

bool ParameterBinding::matches(const BindingLayout& layout) const {
    const auto& schema = layout.schema();
    if (static_cast<int>(shared.size()) != layout.n_shared()) return false;
    if (static_cast<int>(partial.size()) != schema.category_count()) return false;
    for (int c = 0; c < schema.category_count(); ++c) {
        if (static_cast<int>(partial[c].size()) != layout.n_partial(c)) return false;
        for (const auto& term : partial[c]) {
            if (static_cast<int>(term.size()) != schema.value_count(c)) return false;
        }
    }
    if (static_cast<int>(nonshared.size()) != layout.n_non_shared()) return false;
    for (const auto& term : nonshared) {
        if (static_cast<int>(term.size()) != schema.combination_count()) return false;
    }
    return true;
}

std::vector<double> ParameterBinding::flatten(const BindingLayout& layout) const {
    if (!matches(layout)) throw std::invalid_argument("binding does not match layout");
    std::vector<double> flat;
    flat.reserve(layout.individual_count());
    flat.insert(flat.end(), shared.begin(), shared.end());
    for (const auto& cat : partial) {
        for (const auto& term : cat) flat.insert(flat.end(), term.begin(), term.end());
    }
    for (const auto& term : nonshared) flat.insert(flat.end(), term.begin(), term.end());
    return flat;
}

ParameterBinding ParameterBinding::unflatten(const BindingLayout& layout, std::span<const double> flat) {
    if (static_cast<int>(flat.size()) != layout.individual_count()) {
        throw std::invalid_argument("flat vector length does not match layout");
    }
    auto b = zeros(layout);
    size_t i = 0;
    for (auto& v : b.shared) v = flat[i++];
    for (auto& cat : b.partial) {
        for (auto& term : cat) {
            for (auto& v : term) v = flat[i++];
        }
    }
    for (auto& term : b.nonshared) {
        for (auto& v : term) v = flat[i++];
    }
    return b;
}

double ParameterBinding::value_for(const BindingLayout& layout, int t,
                                   std::span<const int> value_indices, int combination) const {
    const auto kind = layout.terminal_kind(t);
    const int j = layout.per_kind_index(t);
    switch (kind.sharing) {
        case Sharing::Shared: return shared[j];
        case Sharing::Partial: return partial[kind.category][j][value_indices[kind.category]];
        case Sharing::NonShared: return nonshared[j][combination];
    }
    return 0.0;
}

ParameterBinding perturb(const ParameterBinding& binding, double scale, std::mt19937_64& rng) {
    if (scale < 0.0) throw std::invalid_argument("perturbation scale must be >= 0");
    std::normal_distribution<double> normal(0.0, 1.0);
    auto out = binding;
    auto jitter = [&](double& p) { p += scale * p * normal(rng); };
    for (auto& v : out.shared) jitter(v);
    for (auto& cat : out.partial) {
        for (auto& term : cat) {
            for (auto& v : term) jitter(v);
        }
    }
    for (auto& term : out.nonshared) {
        for (auto& v : term) jitter(v);
    }
    return out;
}

std::vector<std::string> describe_parameters(const BindingLayout& layout,
                                             const ParameterBinding& binding) {
    const auto& schema = layout.schema();
    std::vector<std::string> lines;
    for (int t = 0; t < layout.terminal_count(); ++t) {
        const auto kind = layout.terminal_kind(t);
        const int j = layout.per_kind_index(t);
        switch (kind.sharing) {
            case Sharing::Shared:
                lines.push_back("CS" + std::to_string(j + 1) + " = " + format_real(binding.shared[j]));
                break;
            case Sharing::Partial: {
                const auto& cat = schema.category(kind.category);
                for (int v = 0; v < schema.value_count(kind.category); ++v) {
                    lines.push_back("C" + std::to_string(kind.category + 1) + "_" + std::to_string(j + 1) +
                                    "[" + cat.values[v] + "] = " + format_real(binding.partial[kind.category][j][v]));
                }
                break;
            }
            case Sharing::NonShared:
                for (int combo = 0; combo < schema.combination_count(); ++combo) {
                    lines.push_back("CI" + std::to_string(j + 1) + "[" + schema.combination_label(combo) +
                                    "] = " + format_real(binding.nonshared[j][combo]));
                }
                break;
        }
    }
    return lines;
}

}  // namespace catsr
