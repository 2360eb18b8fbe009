#ifndef CATSR_EXPR_HPP
#define CATSR_EXPR_HPP

#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "catsr/schema.hpp"

namespace catsr {

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class UnaryOp { Exp, Log, Square, Sqrt };

/// Sharing level of a parameter terminal.
///
/// Shared terminals hold one value for the whole dataset, Partial terminals
/// one value per value of a single category, NonShared terminals one value
/// per category-value combination.
enum class Sharing { Shared, Partial, NonShared };

struct ParamKind {
    Sharing sharing = Sharing::Shared;
    int category = -1;  // meaningful only when sharing == Partial

    static ParamKind shared() { return {Sharing::Shared, -1}; }
    static ParamKind partial(int category) { return {Sharing::Partial, category}; }
    static ParamKind non_shared() { return {Sharing::NonShared, -1}; }

    bool operator==(const ParamKind&) const = default;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    struct Binary {
        BinaryOp op;
        NodePtr lhs, rhs;
    };
    struct Unary {
        UnaryOp op;
        NodePtr child;
    };
    struct Variable {
        int index;  // 0-based continuous feature index
    };
    struct Literal {
        double value;
    };
    struct Param {
        ParamKind kind;
        int terminal;  // dense id within the owning Expression; -1 = assign fresh
    };

    std::variant<Binary, Unary, Variable, Literal, Param> value;
};

NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs);
NodePtr make_unary(UnaryOp op, NodePtr child);
NodePtr make_variable(int index);
NodePtr make_literal(double value);
NodePtr make_param(ParamKind kind, int terminal = -1);

/// Immutable expression tree.
///
/// Construction re-densifies parameter terminal ids to 0..m-1 in order of
/// first appearance over a left-to-right leaf traversal. Leaves carrying the
/// same incoming id stay aliased to one terminal (they must agree on kind);
/// leaves with id -1 each become a fresh terminal.
class Expression {
public:
    explicit Expression(NodePtr root);

    const NodePtr& root() const { return root_; }

    /// Number of distinct parameter terminals (m).
    int terminal_count() const { return static_cast<int>(terminal_kinds_.size()); }
    const std::vector<ParamKind>& terminal_kinds() const { return terminal_kinds_; }
    ParamKind terminal_kind(int t) const { return terminal_kinds_[t]; }

    /// 0-based position of terminal `t` among terminals of the same kind.
    int per_kind_index(int t) const { return per_kind_index_[t]; }

    int node_count() const { return node_count_; }

    /// Largest referenced feature index plus one; 0 when no variables occur.
    int min_feature_count() const { return min_feature_count_; }

private:
    NodePtr root_;
    std::vector<ParamKind> terminal_kinds_;
    std::vector<int> per_kind_index_;
    int node_count_ = 0;
    int min_feature_count_ = 0;
};

/// Number of nodes: every operator, variable, literal, and parameter
/// terminal occurrence counts one.
int complexity(const Expression& e);

/// Total real values behind all parameter terminals (k):
/// n_shared + sum_c n_partial(c)*|values(c)| + n_nonshared*prod_c |values(c)|.
int count_individual_parameters(const Expression& e, const CategorySchema& schema);

/// Fixed-point rewrite with sharing-aware rules. Folds literal-only
/// subtrees, absorbs literals into parameters under + and *, and merges
/// parameter pairs of identical kind under + and * when the merge preserves
/// the reachable set of predictions. Cross-kind and cross-category pairs
/// never fold.
Expression simplify(const Expression& e);

std::string to_string(const Expression& e);

struct ParseError : std::runtime_error {
    ParseError(std::string message, size_t position)
        : std::runtime_error(std::move(message)), position(position) {}
    size_t position;  // byte offset into the input
};

/// Parses the infix grammar emitted by to_string. Identical parameter
/// tokens alias to one terminal. Throws ParseError with the offending
/// position on malformed input or a category index beyond the schema.
Expression parse(std::string_view text, const CategorySchema& schema);

/// Grow-style random tree with complexity <= max_complexity. All three
/// sharing levels (and every category for Partial) are reachable.
Expression random_expression(const CategorySchema& schema, int n_features, int max_complexity,
                             std::mt19937_64& rng, double terminal_probability = 0.3);

bool structurally_equal(const Expression& a, const Expression& b);
bool structurally_equal(const NodePtr& a, const NodePtr& b);

// Tree surgery on raw nodes; preorder indices address nodes 0..count-1.
int node_count(const NodePtr& n);
NodePtr subtree_at(const NodePtr& root, int preorder_index);
/// Replaces the subtree at `preorder_index`. Terminal ids inside
/// `replacement` are shifted past the host's ids so no accidental aliasing
/// occurs; wrap the result in Expression to re-densify.
NodePtr replace_at(const NodePtr& root, int preorder_index, const NodePtr& replacement);

/// Shortest round-trip decimal rendering of a double.
std::string format_real(double v);

}  // namespace catsr

#endif
