#include "catsr/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <system_error>

namespace catsr {

NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
    return std::make_shared<const Node>(Node{Node::Binary{op, std::move(lhs), std::move(rhs)}});
}

NodePtr make_unary(UnaryOp op, NodePtr child) {
    return std::make_shared<const Node>(Node{Node::Unary{op, std::move(child)}});
}

NodePtr make_variable(int index) {
    if (index < 0) throw std::invalid_argument("negative variable index");
    return std::make_shared<const Node>(Node{Node::Variable{index}});
}

NodePtr make_literal(double value) {
    return std::make_shared<const Node>(Node{Node::Literal{value}});
}

NodePtr make_param(ParamKind kind, int terminal) {
    if (kind.sharing == Sharing::Partial && kind.category < 0) {
        throw std::invalid_argument("partial parameter requires a category index");
    }
    return std::make_shared<const Node>(Node{Node::Param{kind, terminal}});
}

namespace {

struct DensifyState {
    std::map<int, int> remap;           // incoming id -> dense id
    std::vector<ParamKind> kinds;       // by dense id
    int nodes = 0;
    int max_var = -1;
};

NodePtr densify(const NodePtr& n, DensifyState& st) {
    ++st.nodes;
    if (const auto* b = std::get_if<Node::Binary>(&n->value)) {
        auto lhs = densify(b->lhs, st);
        auto rhs = densify(b->rhs, st);
        if (lhs == b->lhs && rhs == b->rhs) return n;
        return make_binary(b->op, std::move(lhs), std::move(rhs));
    }
    if (const auto* u = std::get_if<Node::Unary>(&n->value)) {
        auto child = densify(u->child, st);
        if (child == u->child) return n;
        return make_unary(u->op, std::move(child));
    }
    if (const auto* v = std::get_if<Node::Variable>(&n->value)) {
        st.max_var = std::max(st.max_var, v->index);
        return n;
    }
    if (const auto* p = std::get_if<Node::Param>(&n->value)) {
        int dense;
        if (p->terminal >= 0) {
            auto [it, inserted] = st.remap.try_emplace(p->terminal, static_cast<int>(st.kinds.size()));
            dense = it->second;
            if (inserted) {
                st.kinds.push_back(p->kind);
            } else if (!(st.kinds[dense] == p->kind)) {
                throw std::invalid_argument("aliased parameter terminals disagree on kind");
            }
        } else {
            dense = static_cast<int>(st.kinds.size());
            st.kinds.push_back(p->kind);
        }
        if (dense == p->terminal) return n;
        return make_param(p->kind, dense);
    }
    return n;  // literal
}

}  // namespace

Expression::Expression(NodePtr root) {
    if (!root) throw std::invalid_argument("null expression root");
    DensifyState st;
    root_ = densify(root, st);
    terminal_kinds_ = std::move(st.kinds);
    node_count_ = st.nodes;
    min_feature_count_ = st.max_var + 1;

    per_kind_index_.resize(terminal_kinds_.size());
    std::map<std::pair<int, int>, int> counters;  // (sharing, category) -> next index
    for (size_t t = 0; t < terminal_kinds_.size(); ++t) {
        const auto& k = terminal_kinds_[t];
        const std::pair<int, int> key{static_cast<int>(k.sharing),
                                      k.sharing == Sharing::Partial ? k.category : -1};
        per_kind_index_[t] = counters[key]++;
    }
}

int complexity(const Expression& e) { return e.node_count(); }

int count_individual_parameters(const Expression& e, const CategorySchema& schema) {
    int k = 0;
    for (const auto& kind : e.terminal_kinds()) {
        switch (kind.sharing) {
            case Sharing::Shared:
                k += 1;
                break;
            case Sharing::Partial:
                if (kind.category >= schema.category_count()) {
                    throw std::out_of_range("parameter category index beyond schema");
                }
                k += schema.value_count(kind.category);
                break;
            case Sharing::NonShared:
                k += schema.combination_count();
                break;
        }
    }
    return k;
}

namespace {

NodePtr random_leaf(const CategorySchema& schema, int n_features, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double roll = unit(rng);
    const double var_p = n_features > 0 ? 0.4 : 0.0;
    const double lit_p = 0.2;
    if (roll < var_p) {
        std::uniform_int_distribution<int> pick(0, n_features - 1);
        return make_variable(pick(rng));
    }
    if (roll < var_p + lit_p) {
        std::uniform_real_distribution<double> value(-5.0, 5.0);
        return make_literal(value(rng));
    }
    // Parameter terminal; every sharing level and every category reachable.
    std::uniform_int_distribution<int> pick(0, schema.category_count() + 1);
    const int choice = pick(rng);
    if (choice == 0) return make_param(ParamKind::shared());
    if (choice == schema.category_count() + 1) return make_param(ParamKind::non_shared());
    return make_param(ParamKind::partial(choice - 1));
}

NodePtr grow(const CategorySchema& schema, int n_features, int budget, std::mt19937_64& rng,
             double terminal_probability) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (budget <= 1 || unit(rng) < terminal_probability) {
        return random_leaf(schema, n_features, rng);
    }
    // Uniform pick over all operators whose arity fits the remaining budget.
    constexpr int kBinaryOps = 5;
    constexpr int kUnaryOps = 4;
    const int n_ops = budget >= 3 ? kBinaryOps + kUnaryOps : kUnaryOps;
    std::uniform_int_distribution<int> pick(0, n_ops - 1);
    int choice = pick(rng);
    if (budget < 3) choice += kBinaryOps;
    if (choice < kBinaryOps) {
        std::uniform_int_distribution<int> split(1, budget - 2);
        const int left_budget = split(rng);
        auto lhs = grow(schema, n_features, left_budget, rng, terminal_probability);
        auto rhs = grow(schema, n_features, budget - 1 - left_budget, rng, terminal_probability);
        return make_binary(static_cast<BinaryOp>(choice), std::move(lhs), std::move(rhs));
    }
    auto child = grow(schema, n_features, budget - 1, rng, terminal_probability);
    return make_unary(static_cast<UnaryOp>(choice - kBinaryOps), std::move(child));
}

}  // namespace

Expression random_expression(const CategorySchema& schema, int n_features, int max_complexity,
                             std::mt19937_64& rng, double terminal_probability) {
    if (max_complexity < 1) throw std::invalid_argument("max_complexity must be >= 1");
    return Expression(grow(schema, n_features, max_complexity, rng, terminal_probability));
}

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
    if (a == b) return true;
    if (a->value.index() != b->value.index()) return false;
    if (const auto* ab = std::get_if<Node::Binary>(&a->value)) {
        const auto& bb = std::get<Node::Binary>(b->value);
        return ab->op == bb.op && structurally_equal(ab->lhs, bb.lhs) && structurally_equal(ab->rhs, bb.rhs);
    }
    if (const auto* au = std::get_if<Node::Unary>(&a->value)) {
        const auto& bu = std::get<Node::Unary>(b->value);
        return au->op == bu.op && structurally_equal(au->child, bu.child);
    }
    if (const auto* av = std::get_if<Node::Variable>(&a->value)) {
        return av->index == std::get<Node::Variable>(b->value).index;
    }
    if (const auto* al = std::get_if<Node::Literal>(&a->value)) {
        return al->value == std::get<Node::Literal>(b->value).value;
    }
    const auto& ap = std::get<Node::Param>(a->value);
    const auto& bp = std::get<Node::Param>(b->value);
    return ap.kind == bp.kind && ap.terminal == bp.terminal;
}

bool structurally_equal(const Expression& a, const Expression& b) {
    return structurally_equal(a.root(), b.root());
}

int node_count(const NodePtr& n) {
    if (const auto* b = std::get_if<Node::Binary>(&n->value)) {
        return 1 + node_count(b->lhs) + node_count(b->rhs);
    }
    if (const auto* u = std::get_if<Node::Unary>(&n->value)) {
        return 1 + node_count(u->child);
    }
    return 1;
}

namespace {

NodePtr find_subtree(const NodePtr& n, int& remaining) {
    if (remaining == 0) return n;
    --remaining;
    if (const auto* b = std::get_if<Node::Binary>(&n->value)) {
        if (auto hit = find_subtree(b->lhs, remaining)) return hit;
        return find_subtree(b->rhs, remaining);
    }
    if (const auto* u = std::get_if<Node::Unary>(&n->value)) {
        return find_subtree(u->child, remaining);
    }
    return nullptr;
}

int max_terminal_id(const NodePtr& n) {
    if (const auto* b = std::get_if<Node::Binary>(&n->value)) {
        return std::max(max_terminal_id(b->lhs), max_terminal_id(b->rhs));
    }
    if (const auto* u = std::get_if<Node::Unary>(&n->value)) {
        return max_terminal_id(u->child);
    }
    if (const auto* p = std::get_if<Node::Param>(&n->value)) {
        return p->terminal;
    }
    return -1;
}

NodePtr offset_terminals(const NodePtr& n, int offset) {
    if (offset == 0) return n;
    if (const auto* b = std::get_if<Node::Binary>(&n->value)) {
        return make_binary(b->op, offset_terminals(b->lhs, offset), offset_terminals(b->rhs, offset));
    }
    if (const auto* u = std::get_if<Node::Unary>(&n->value)) {
        return make_unary(u->op, offset_terminals(u->child, offset));
    }
    if (const auto* p = std::get_if<Node::Param>(&n->value)) {
        return make_param(p->kind, p->terminal >= 0 ? p->terminal + offset : -1);
    }
    return n;
}

NodePtr rebuild_replaced(const NodePtr& n, int& remaining, const NodePtr& replacement) {
    if (remaining == 0) {
        --remaining;
        return replacement;
    }
    --remaining;
    if (const auto* b = std::get_if<Node::Binary>(&n->value)) {
        auto lhs = remaining >= 0 ? rebuild_replaced(b->lhs, remaining, replacement) : b->lhs;
        auto rhs = remaining >= 0 ? rebuild_replaced(b->rhs, remaining, replacement) : b->rhs;
        return make_binary(b->op, std::move(lhs), std::move(rhs));
    }
    if (const auto* u = std::get_if<Node::Unary>(&n->value)) {
        auto child = remaining >= 0 ? rebuild_replaced(u->child, remaining, replacement) : u->child;
        return make_unary(u->op, std::move(child));
    }
    return n;
}

}  // namespace

NodePtr subtree_at(const NodePtr& root, int preorder_index) {
    int remaining = preorder_index;
    auto hit = find_subtree(root, remaining);
    if (!hit) throw std::out_of_range("preorder index beyond tree");
    return hit;
}

NodePtr replace_at(const NodePtr& root, int preorder_index, const NodePtr& replacement) {
    if (preorder_index < 0 || preorder_index >= node_count(root)) {
        throw std::out_of_range("preorder index beyond tree");
    }
    auto shifted = offset_terminals(replacement, max_terminal_id(root) + 1);
    int remaining = preorder_index;
    return rebuild_replaced(root, remaining, shifted);
}

std::string format_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace catsr
