#include <cctype>
#include <charconv>
#include <map>
#include <string>
#include <vector>

#include "catsr/expr.hpp"

namespace catsr {

namespace {

int precedence(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add:
        case BinaryOp::Sub:
            return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div:
            return 2;
        case BinaryOp::Pow:
            return 3;
    }
    return 0;
}

const char* op_token(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Pow: return "^";
    }
    return "?";
}

const char* fn_name(UnaryOp op) {
    switch (op) {
        case UnaryOp::Exp: return "exp";
        case UnaryOp::Log: return "log";
        case UnaryOp::Square: return "square";
        case UnaryOp::Sqrt: return "sqrt";
    }
    return "?";
}

std::string param_token(const Expression& e, int terminal) {
    const auto kind = e.terminal_kind(terminal);
    const int j = e.per_kind_index(terminal) + 1;
    switch (kind.sharing) {
        case Sharing::Shared: return "CS" + std::to_string(j);
        case Sharing::Partial:
            return "C" + std::to_string(kind.category + 1) + "_" + std::to_string(j);
        case Sharing::NonShared: return "CI" + std::to_string(j);
    }
    return "?";
}

void print(const Expression& e, const NodePtr& n, std::string& out, int parent_prec,
           bool right_side, bool is_root) {
    if (const auto* b = std::get_if<Node::Binary>(&n->value)) {
        const int prec = precedence(b->op);
        const bool parens = b->op == BinaryOp::Pow
                                ? !is_root
                                : (prec < parent_prec || (prec == parent_prec && right_side));
        if (parens) out += "(";
        print(e, b->lhs, out, prec, false, false);
        out += " ";
        out += op_token(b->op);
        out += " ";
        print(e, b->rhs, out, prec, true, false);
        if (parens) out += ")";
        return;
    }
    if (const auto* u = std::get_if<Node::Unary>(&n->value)) {
        out += fn_name(u->op);
        out += "(";
        print(e, u->child, out, 0, false, true);
        out += ")";
        return;
    }
    if (const auto* v = std::get_if<Node::Variable>(&n->value)) {
        out += "v" + std::to_string(v->index + 1);
        return;
    }
    if (const auto* l = std::get_if<Node::Literal>(&n->value)) {
        out += format_real(l->value);
        return;
    }
    out += param_token(e, std::get<Node::Param>(n->value).terminal);
}

}  // namespace

std::string to_string(const Expression& e) {
    std::string out;
    print(e, e.root(), out, 0, false, true);
    return out;
}

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::string text;
    double number = 0.0;
    size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            double value = 0.0;
            auto res = std::from_chars(text.data() + i, text.data() + text.size(), value);
            if (res.ec != std::errc{}) throw ParseError("malformed number", i);
            out.push_back({Tok::Number, std::string(text.substr(i, res.ptr - (text.data() + i))), value, i});
            i = res.ptr - text.data();
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
                ++j;
            }
            out.push_back({Tok::Ident, std::string(text.substr(i, j - i)), 0.0, i});
            i = j;
            continue;
        }
        Tok kind;
        switch (c) {
            case '+': kind = Tok::Plus; break;
            case '-': kind = Tok::Minus; break;
            case '*': kind = Tok::Star; break;
            case '/': kind = Tok::Slash; break;
            case '^': kind = Tok::Caret; break;
            case '(': kind = Tok::LParen; break;
            case ')': kind = Tok::RParen; break;
            default:
                throw ParseError(std::string("unknown character '") + c + "'", i);
        }
        out.push_back({kind, std::string(1, c), 0.0, i});
        ++i;
    }
    out.push_back({Tok::End, "", 0.0, text.size()});
    return out;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

struct Parser {
    const CategorySchema& schema;
    std::vector<Token> tokens;
    size_t cursor = 0;
    std::map<std::string, int> terminal_ids;  // token text -> incoming id

    const Token& peek() const { return tokens[cursor]; }
    Token eat() { return tokens[cursor++]; }

    [[noreturn]] void fail(const std::string& msg, const Token& tok) const {
        throw ParseError(msg + " at position " + std::to_string(tok.pos), tok.pos);
    }

    void expect(Tok kind, const char* what) {
        if (peek().kind != kind) fail(std::string("expected ") + what, peek());
        ++cursor;
    }

    NodePtr parse_expr() {
        auto lhs = parse_term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const auto op = eat().kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
            lhs = make_binary(op, std::move(lhs), parse_term());
        }
        return lhs;
    }

    NodePtr parse_term() {
        auto lhs = parse_factor();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const auto op = eat().kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
            lhs = make_binary(op, std::move(lhs), parse_factor());
        }
        return lhs;
    }

    NodePtr parse_factor() {
        auto base = parse_unary();
        if (peek().kind == Tok::Caret) {
            ++cursor;
            return make_binary(BinaryOp::Pow, std::move(base), parse_factor());  // right assoc
        }
        return base;
    }

    NodePtr parse_unary() {
        if (peek().kind == Tok::Minus) {
            const auto minus = eat();
            auto operand = parse_unary();
            if (const auto* lit = std::get_if<Node::Literal>(&operand->value)) {
                return make_literal(-lit->value);
            }
            (void)minus;
            return make_binary(BinaryOp::Sub, make_literal(0.0), std::move(operand));
        }
        return parse_primary();
    }

    NodePtr parse_primary() {
        const Token tok = eat();
        if (tok.kind == Tok::Number) return make_literal(tok.number);
        if (tok.kind == Tok::LParen) {
            auto inner = parse_expr();
            expect(Tok::RParen, "')'");
            return inner;
        }
        if (tok.kind != Tok::Ident) fail("unexpected token '" + tok.text + "'", tok);
        return parse_ident(tok);
    }

    NodePtr parse_ident(const Token& tok) {
        const std::string& s = tok.text;
        for (UnaryOp op : {UnaryOp::Exp, UnaryOp::Log, UnaryOp::Square, UnaryOp::Sqrt}) {
            if (s == fn_name(op)) {
                expect(Tok::LParen, "'(' after function name");
                auto arg = parse_expr();
                expect(Tok::RParen, "')'");
                return make_unary(op, std::move(arg));
            }
        }
        if (s.size() > 1 && s[0] == 'v' && all_digits(s.substr(1))) {
            const int n = std::stoi(s.substr(1));
            if (n < 1) fail("variable index must be >= 1", tok);
            return make_variable(n - 1);
        }
        if (s.size() > 2 && s.compare(0, 2, "CS") == 0 && all_digits(s.substr(2))) {
            return param_leaf(s, ParamKind::shared());
        }
        if (s.size() > 2 && s.compare(0, 2, "CI") == 0 && all_digits(s.substr(2))) {
            return param_leaf(s, ParamKind::non_shared());
        }
        if (s.size() > 1 && s[0] == 'C') {
            const auto underscore = s.find('_');
            if (underscore != std::string::npos && underscore > 1 &&
                all_digits(s.substr(1, underscore - 1)) && all_digits(s.substr(underscore + 1))) {
                const int category = std::stoi(s.substr(1, underscore - 1)) - 1;
                if (category < 0 || category >= schema.category_count()) {
                    fail("category index " + std::to_string(category + 1) + " beyond schema", tok);
                }
                return param_leaf(s, ParamKind::partial(category));
            }
        }
        fail("unknown token '" + s + "'", tok);
    }

    NodePtr param_leaf(const std::string& token_text, ParamKind kind) {
        // Identical tokens alias to one terminal.
        auto [it, _] = terminal_ids.try_emplace(token_text, static_cast<int>(terminal_ids.size()));
        return make_param(kind, it->second);
    }
};

}  // namespace

Expression parse(std::string_view text, const CategorySchema& schema) {
    Parser parser{schema, tokenize(text)};
    auto root = parser.parse_expr();
    if (parser.peek().kind != Tok::End) {
        parser.fail("trailing input '" + parser.peek().text + "'", parser.peek());
    }
    return Expression(std::move(root));
}

}  // namespace catsr
