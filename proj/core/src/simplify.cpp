#include <cmath>
#include <limits>
#include <map>

#include "catsr/expr.hpp"

namespace catsr {

namespace {

double apply(BinaryOp op, double a, double b) {
    switch (op) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div: return a / b;
        case BinaryOp::Pow: return std::pow(a, b);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double apply(UnaryOp op, double x) {
    switch (op) {
        case UnaryOp::Exp: return std::exp(x);
        case UnaryOp::Log: return std::log(x);
        case UnaryOp::Square: return x * x;
        case UnaryOp::Sqrt: return std::sqrt(x);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

void count_terminal_uses(const NodePtr& n, std::map<int, int>& uses) {
    if (const auto* b = std::get_if<Node::Binary>(&n->value)) {
        count_terminal_uses(b->lhs, uses);
        count_terminal_uses(b->rhs, uses);
    } else if (const auto* u = std::get_if<Node::Unary>(&n->value)) {
        count_terminal_uses(u->child, uses);
    } else if (const auto* p = std::get_if<Node::Param>(&n->value)) {
        ++uses[p->terminal];
    }
}

const Node::Param* as_param(const NodePtr& n) { return std::get_if<Node::Param>(&n->value); }
const Node::Literal* as_literal(const NodePtr& n) { return std::get_if<Node::Literal>(&n->value); }

// One bottom-up pass. `uses` holds leaf occurrence counts from the start of
// the pass; counts only shrink during a pass, so stale counts merely skip a
// fold that the next pass will pick up.
NodePtr rewrite(const NodePtr& n, const std::map<int, int>& uses) {
    if (const auto* u = std::get_if<Node::Unary>(&n->value)) {
        auto child = rewrite(u->child, uses);
        if (const auto* lit = as_literal(child)) {
            const double folded = apply(u->op, lit->value);
            if (std::isfinite(folded)) return make_literal(folded);
        }
        return child == u->child ? n : make_unary(u->op, std::move(child));
    }
    const auto* b = std::get_if<Node::Binary>(&n->value);
    if (!b) return n;

    auto lhs = rewrite(b->lhs, uses);
    auto rhs = rewrite(b->rhs, uses);

    const auto* llit = as_literal(lhs);
    const auto* rlit = as_literal(rhs);
    if (llit && rlit) {
        const double folded = apply(b->op, llit->value, rlit->value);
        if (std::isfinite(folded)) return make_literal(folded);
    }

    if (b->op == BinaryOp::Add || b->op == BinaryOp::Mul) {
        const auto* lp = as_param(lhs);
        const auto* rp = as_param(rhs);
        const auto unique = [&uses](const Node::Param& p) {
            auto it = uses.find(p.terminal);
            return it != uses.end() && it->second == 1;
        };
        if (lp && rp && lp->kind == rp->kind) {
            if (lp->terminal == rp->terminal) {
                // p + p = 2p stays one free value; p * p does not.
                auto it = uses.find(lp->terminal);
                if (b->op == BinaryOp::Add && it != uses.end() && it->second == 2) return lhs;
            } else if (unique(*lp) && unique(*rp)) {
                return lhs;
            }
        }
        if (lp && rlit && unique(*lp)) {
            if (b->op == BinaryOp::Mul && rlit->value == 0.0) return make_literal(0.0);
            return lhs;
        }
        if (rp && llit && unique(*rp)) {
            if (b->op == BinaryOp::Mul && llit->value == 0.0) return make_literal(0.0);
            return rhs;
        }
    }

    if (lhs == b->lhs && rhs == b->rhs) return n;
    return make_binary(b->op, std::move(lhs), std::move(rhs));
}

}  // namespace

Expression simplify(const Expression& e) {
    Expression current = e;
    for (int pass = 0; pass < 64; ++pass) {
        std::map<int, int> uses;
        count_terminal_uses(current.root(), uses);
        Expression next(rewrite(current.root(), uses));
        if (structurally_equal(next, current)) break;
        current = std::move(next);
    }
    return current;
}

}  // namespace catsr
