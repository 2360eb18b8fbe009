#include <functional>
#include <limits>
#include <optional>
#include <set>

#include "catsr/expr.hpp"
#include "catsr/fit.hpp"
#include "catsr/synthetic.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace catsr;

namespace {

CategorySchema two_cats() {
    return CategorySchema({{"U", {"A", "B", "C", "D"}}, {"L", {"a", "b", "c"}}});
}

}  // namespace

TEST_CASE("complexity counts every operator and operand") {
    const auto schema = two_cats();
    CHECK(complexity(Expression(make_literal(3.0))) == 1);
    CHECK(complexity(parse("C1_1 * v1 + CS1", schema)) == 5);
    CHECK(complexity(parse("exp(v1)", schema)) == 2);
}

TEST_CASE("individual parameter accounting") {
    const auto bench = quartic_benchmark();
    CHECK(count_individual_parameters(bench.expression, bench.schema) == 20);  // 1 + 4 + 3 + 12
    CHECK(bench.expression.terminal_count() == 4);
    CHECK(count_individual_parameters(parse("v1 + 1", bench.schema), bench.schema) == 0);
}

TEST_CASE("individual parameter count is invariant under sibling swaps") {
    const auto schema = two_cats();
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto e = random_expression(schema, 2, 11, rng);
        // swap children of the first commutative operator, if any
        for (int node = 0; node < e.node_count(); ++node) {
            const auto sub = subtree_at(e.root(), node);
            const auto* b = std::get_if<Node::Binary>(&sub->value);
            if (b && (b->op == BinaryOp::Add || b->op == BinaryOp::Mul)) {
                Expression swapped(replace_at(e.root(), node, make_binary(b->op, b->rhs, b->lhs)));
                CHECK(count_individual_parameters(swapped, schema) ==
                      count_individual_parameters(e, schema));
                break;
            }
        }
    }
}

TEST_CASE("simplify folds literal subtrees") {
    const auto schema = two_cats();
    const auto e = simplify(parse("1 * 1", schema));
    REQUIRE(e.node_count() == 1);
    CHECK(std::get<Node::Literal>(e.root()->value).value == 1.0);
}

TEST_CASE("simplify never folds across kinds or categories") {
    const auto schema = two_cats();
    for (const char* text : {"C1_1 * C2_1", "C1_1 + C2_1", "CS1 * CI1", "C1_1 + CI1"}) {
        const auto e = parse(text, schema);
        CHECK(structurally_equal(simplify(e), e));
    }
}

TEST_CASE("simplify merges same-kind parameter pairs") {
    const auto schema = two_cats();
    const auto sum = simplify(parse("CS1 + CS2", schema));
    REQUIRE(sum.node_count() == 1);
    CHECK(std::get<Node::Param>(sum.root()->value).kind == ParamKind::shared());

    const auto absorbed = simplify(parse("C1_1 * 3 + 2", schema));
    REQUIRE(absorbed.node_count() == 1);
    CHECK(std::get<Node::Param>(absorbed.root()->value).kind == ParamKind::partial(0));

    // p * 0 is identically zero, not a free parameter
    const auto zero = simplify(parse("CS1 * 0", schema));
    REQUIRE(zero.node_count() == 1);
    CHECK(std::get<Node::Literal>(zero.root()->value).value == 0.0);

    // p * p spans only half the reals; must not merge
    const auto square = parse("CS1 * CS1", schema);
    CHECK(structurally_equal(simplify(square), square));

    // aliased parameter used elsewhere must not be absorbed
    const auto aliased = parse("CS1 + 3 + exp(CS1)", schema);
    CHECK(complexity(simplify(aliased)) == complexity(aliased));
}

TEST_CASE("simplify is idempotent and never grows the tree") {
    const auto schema = two_cats();
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        const auto e = random_expression(schema, 2, 13, rng);
        const auto once = simplify(e);
        CHECK(once.node_count() <= e.node_count());
        CHECK(structurally_equal(simplify(once), once));
    }
}

TEST_CASE("simplify preserves the reachable set of predictions") {
    const auto schema = two_cats();
    std::mt19937_64 rng(23);
    int tested = 0;
    for (int i = 0; i < 400 && tested < 30; ++i) {
        const auto e = random_expression(schema, 1, 7, rng);
        const auto s = simplify(e);
        if (structurally_equal(s, e) || e.terminal_count() == 0) continue;

        const BindingLayout layout(e, schema);
        const auto truth = ParameterBinding::random(layout, rng, 0.5, 1.5);
        std::vector<std::vector<double>> cells(12, std::vector<double>{1.0, 1.25, 1.5});
        std::optional<Dataset> ds;
        try {
            ds = dataset_from_cells(schema, cells, e, truth);
        } catch (const DataError&) {
            continue;  // non-finite targets, draw another expression
        }

        double scale = 0.0;
        for (double v : ds->targets()) scale += v * v;

        FitOptions options;
        options.restarts = 2;
        // start in the truth's range: random starts in [-1, 1] may sit
        // outside the domain of log/sqrt subtrees
        const BindingLayout slayout(s, schema);
        double best = std::numeric_limits<double>::infinity();
        bool any = false;
        for (int start = 0; start < 8 && best > 1e-8 * (1.0 + scale); ++start) {
            const auto init = ParameterBinding::random(slayout, rng, 0.5, 1.5);
            const auto fit = fit_parameters(s, *ds, init, options, rng);
            if (fit.failed) continue;
            any = true;
            best = std::min(best, fit.sse);
        }
        if (!any) continue;
        CHECK(best <= 1e-8 * (1.0 + scale));
        ++tested;
    }
    CHECK(tested > 0);
}

TEST_CASE("to_string renders the worked example exactly") {
    const auto bench = quartic_benchmark();
    CHECK(to_string(bench.expression) ==
          "CS1 * v1 + C1_1 * square(v1) + C2_1 * (v1 ^ 3) + CI1 * (v1 ^ 4)");
}

TEST_CASE("parse rejects bad input with a position") {
    const auto schema = two_cats();
    CHECK_THROWS_AS(parse("C3_1 * v1", schema), ParseError);  // only two categories
    CHECK_THROWS_AS(parse("frob(v1)", schema), ParseError);
    CHECK_THROWS_AS(parse("v1 + ", schema), ParseError);
    CHECK_THROWS_AS(parse("exp(v1", schema), ParseError);
    try {
        parse("v1 * wat", schema);
        FAIL("expected ParseError");
    } catch (const ParseError& err) {
        CHECK(err.position == 5);
    }
}

TEST_CASE("parse aliases identical parameter tokens") {
    const auto schema = two_cats();
    const auto e = parse("CS1 * v1 + CS1", schema);
    CHECK(e.terminal_count() == 1);
    CHECK(complexity(e) == 5);
    const auto distinct = parse("CS1 * v1 + CS2", schema);
    CHECK(distinct.terminal_count() == 2);
}

TEST_CASE("parse/to_string round trip") {
    const auto schema = two_cats();
    std::mt19937_64 rng(99);
    for (int seed = 0; seed < 1000; ++seed) {
        const auto e = random_expression(schema, 3, 15, rng);
        const auto text = to_string(e);
        INFO("text: " << text);
        CHECK(structurally_equal(parse(text, schema), e));
    }
}

TEST_CASE("random_expression respects the complexity bound") {
    const auto schema = two_cats();
    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
        CHECK(random_expression(schema, 1, 15, rng).node_count() <= 15);
    }
    CHECK(random_expression(schema, 1, 1, rng).node_count() == 1);
}

TEST_CASE("random_expression reaches every parameter kind") {
    const auto schema = two_cats();
    std::mt19937_64 rng(17);
    std::set<std::pair<int, int>> seen;  // (sharing, category)
    for (int i = 0; i < 10000; ++i) {
        const auto e = random_expression(schema, 1, 15, rng);
        for (const auto& kind : e.terminal_kinds()) {
            seen.insert({static_cast<int>(kind.sharing), kind.category});
        }
    }
    CHECK(seen.count({static_cast<int>(Sharing::Shared), -1}) == 1);
    CHECK(seen.count({static_cast<int>(Sharing::Partial), 0}) == 1);
    CHECK(seen.count({static_cast<int>(Sharing::Partial), 1}) == 1);
    CHECK(seen.count({static_cast<int>(Sharing::NonShared), -1}) == 1);
}

TEST_CASE("terminal ids are dense in leaf order") {
    const auto schema = two_cats();
    std::mt19937_64 rng(31);
    for (int i = 0; i < 500; ++i) {
        const auto e = random_expression(schema, 2, 15, rng);
        // walk leaves left to right, expect first appearances 0,1,2,...
        int next = 0;
        std::set<int> seen;
        const std::function<void(const NodePtr&)> walk = [&](const NodePtr& n) {
            if (const auto* b = std::get_if<Node::Binary>(&n->value)) {
                walk(b->lhs);
                walk(b->rhs);
            } else if (const auto* u = std::get_if<Node::Unary>(&n->value)) {
                walk(u->child);
            } else if (const auto* p = std::get_if<Node::Param>(&n->value)) {
                if (!seen.count(p->terminal)) {
                    CHECK(p->terminal == next);
                    seen.insert(next++);
                }
            }
        };
        walk(e.root());
        CHECK(next == e.terminal_count());
    }
}
