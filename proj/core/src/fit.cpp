#include "catsr/fit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace catsr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Flat postorder program for one expression; instruction index doubles as
// the slot in the per-row value/adjoint arrays. The root is the last
// instruction.
struct Instr {
    enum class Op { Add, Sub, Mul, Div, Pow, Exp, Log, Square, Sqrt, Var, Lit, Param };
    Op op;
    int a = -1, b = -1;  // operand slots
    double lit = 0.0;
    int index = -1;  // variable index or terminal id
};

struct Tape {
    std::vector<Instr> code;
    int n_terminals = 0;
};

int emit(const NodePtr& n, Tape& tape) {
    if (const auto* b = std::get_if<Node::Binary>(&n->value)) {
        const int lhs = emit(b->lhs, tape);
        const int rhs = emit(b->rhs, tape);
        Instr::Op op;
        switch (b->op) {
            case BinaryOp::Add: op = Instr::Op::Add; break;
            case BinaryOp::Sub: op = Instr::Op::Sub; break;
            case BinaryOp::Mul: op = Instr::Op::Mul; break;
            case BinaryOp::Div: op = Instr::Op::Div; break;
            case BinaryOp::Pow: op = Instr::Op::Pow; break;
        }
        tape.code.push_back({op, lhs, rhs, 0.0, -1});
    } else if (const auto* u = std::get_if<Node::Unary>(&n->value)) {
        const int child = emit(u->child, tape);
        Instr::Op op;
        switch (u->op) {
            case UnaryOp::Exp: op = Instr::Op::Exp; break;
            case UnaryOp::Log: op = Instr::Op::Log; break;
            case UnaryOp::Square: op = Instr::Op::Square; break;
            case UnaryOp::Sqrt: op = Instr::Op::Sqrt; break;
        }
        tape.code.push_back({op, child, -1, 0.0, -1});
    } else if (const auto* v = std::get_if<Node::Variable>(&n->value)) {
        tape.code.push_back({Instr::Op::Var, -1, -1, 0.0, v->index});
    } else if (const auto* l = std::get_if<Node::Literal>(&n->value)) {
        tape.code.push_back({Instr::Op::Lit, -1, -1, l->value, -1});
    } else {
        const auto& p = std::get<Node::Param>(n->value);
        tape.code.push_back({Instr::Op::Param, -1, -1, 0.0, p.terminal});
    }
    return static_cast<int>(tape.code.size()) - 1;
}

Tape compile(const Expression& e) {
    Tape tape;
    tape.n_terminals = e.terminal_count();
    emit(e.root(), tape);
    return tape;
}

// Per-row flat Jacobian columns; depend only on the row's category values.
std::vector<int> row_columns(const BindingLayout& layout, const Dataset& ds) {
    const int m = layout.terminal_count();
    std::vector<int> cols(static_cast<size_t>(ds.n_rows()) * m);
    for (int row = 0; row < ds.n_rows(); ++row) {
        const auto values = ds.value_indices(row);
        const int combo = ds.combination(row);
        for (int t = 0; t < m; ++t) {
            cols[static_cast<size_t>(row) * m + t] = layout.column(t, values, combo);
        }
    }
    return cols;
}

double eval_forward(const Tape& tape, std::span<const double> features,
                    std::span<const double> params, std::vector<double>& values) {
    values.resize(tape.code.size());
    for (size_t i = 0; i < tape.code.size(); ++i) {
        const auto& in = tape.code[i];
        double v;
        switch (in.op) {
            case Instr::Op::Add: v = values[in.a] + values[in.b]; break;
            case Instr::Op::Sub: v = values[in.a] - values[in.b]; break;
            case Instr::Op::Mul: v = values[in.a] * values[in.b]; break;
            case Instr::Op::Div: v = values[in.a] / values[in.b]; break;
            case Instr::Op::Pow: v = std::pow(values[in.a], values[in.b]); break;
            case Instr::Op::Exp: v = std::exp(values[in.a]); break;
            case Instr::Op::Log: v = std::log(values[in.a]); break;
            case Instr::Op::Square: v = values[in.a] * values[in.a]; break;
            case Instr::Op::Sqrt: v = std::sqrt(values[in.a]); break;
            case Instr::Op::Var: v = features[in.index]; break;
            case Instr::Op::Lit: v = in.lit; break;
            case Instr::Op::Param: v = params[in.index]; break;
        }
        values[i] = v;
    }
    return values.back();
}

// Reverse sweep accumulating d(root)/d(terminal) into `dterm`.
void eval_reverse(const Tape& tape, const std::vector<double>& values, std::vector<double>& adj,
                  std::span<double> dterm) {
    adj.assign(tape.code.size(), 0.0);
    adj.back() = 1.0;
    for (double& d : dterm) d = 0.0;
    for (int i = static_cast<int>(tape.code.size()) - 1; i >= 0; --i) {
        const auto& in = tape.code[i];
        const double a = adj[i];
        if (a == 0.0) continue;
        switch (in.op) {
            case Instr::Op::Add:
                adj[in.a] += a;
                adj[in.b] += a;
                break;
            case Instr::Op::Sub:
                adj[in.a] += a;
                adj[in.b] -= a;
                break;
            case Instr::Op::Mul:
                adj[in.a] += a * values[in.b];
                adj[in.b] += a * values[in.a];
                break;
            case Instr::Op::Div:
                adj[in.a] += a / values[in.b];
                adj[in.b] -= a * values[in.a] / (values[in.b] * values[in.b]);
                break;
            case Instr::Op::Pow: {
                const double base = values[in.a];
                const double expn = values[in.b];
                adj[in.a] += a * expn * std::pow(base, expn - 1.0);
                adj[in.b] += a * values[i] * std::log(base);
                break;
            }
            case Instr::Op::Exp: adj[in.a] += a * values[i]; break;
            case Instr::Op::Log: adj[in.a] += a / values[in.a]; break;
            case Instr::Op::Square: adj[in.a] += a * 2.0 * values[in.a]; break;
            case Instr::Op::Sqrt: adj[in.a] += a * 0.5 / values[i]; break;
            case Instr::Op::Var:
            case Instr::Op::Lit:
                break;
            case Instr::Op::Param: dterm[in.index] += a; break;
        }
    }
}

void check_inputs(const Expression& e, const BindingLayout& layout, const ParameterBinding& binding,
                  const Dataset& ds) {
    if (!binding.matches(layout)) {
        throw std::invalid_argument("binding dimensions do not match expression and schema");
    }
    if (e.min_feature_count() > ds.n_features()) {
        throw std::invalid_argument("expression references feature beyond dataset");
    }
}

std::vector<double> predict_flat(const Tape& tape, const std::vector<int>& cols,
                                 std::span<const double> flat, const Dataset& ds, int m) {
    std::vector<double> out(ds.n_rows());
    std::vector<double> values;
    std::vector<double> params(m);
    for (int row = 0; row < ds.n_rows(); ++row) {
        for (int t = 0; t < m; ++t) params[t] = flat[cols[static_cast<size_t>(row) * m + t]];
        out[row] = eval_forward(tape, ds.feature_row(row), params, values);
    }
    return out;
}

}  // namespace

std::vector<double> predict(const Expression& e, const ParameterBinding& binding, const Dataset& ds) {
    const BindingLayout layout(e, ds.schema());
    check_inputs(e, layout, binding, ds);
    const auto tape = compile(e);
    const auto cols = row_columns(layout, ds);
    return predict_flat(tape, cols, binding.flatten(layout), ds, layout.terminal_count());
}

std::vector<double> residuals(const Expression& e, const ParameterBinding& binding, const Dataset& ds) {
    auto out = predict(e, binding, ds);
    for (int i = 0; i < ds.n_rows(); ++i) out[i] = ds.target(i) - out[i];
    return out;
}

SparseJacobian sparse_jacobian(const Expression& e, const ParameterBinding& binding, const Dataset& ds) {
    const BindingLayout layout(e, ds.schema());
    check_inputs(e, layout, binding, ds);
    const auto tape = compile(e);
    const int m = layout.terminal_count();

    SparseJacobian jac;
    jac.n_rows = ds.n_rows();
    jac.n_cols = layout.individual_count();
    jac.entries_per_row = m;
    jac.col = row_columns(layout, ds);
    jac.val.resize(jac.col.size());

    const auto flat = binding.flatten(layout);
    std::vector<double> values, adj, params(m), dterm(m);
    for (int row = 0; row < ds.n_rows(); ++row) {
        for (int t = 0; t < m; ++t) params[t] = flat[jac.col[static_cast<size_t>(row) * m + t]];
        eval_forward(tape, ds.feature_row(row), params, values);
        eval_reverse(tape, values, adj, dterm);
        for (int t = 0; t < m; ++t) jac.val[static_cast<size_t>(row) * m + t] = dterm[t];
    }
    return jac;
}

std::optional<double> r_squared(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size() || y.empty()) {
        throw std::invalid_argument("r_squared requires equal non-empty sequences");
    }
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_tot = 0.0, ss_res = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        ss_tot += (y[i] - mean) * (y[i] - mean);
        ss_res += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
    }
    if (ss_tot == 0.0) return std::nullopt;
    return 1.0 - ss_res / ss_tot;
}

double mse(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size() || y.empty()) {
        throw std::invalid_argument("mse requires equal non-empty sequences");
    }
    double acc = 0.0;
    for (size_t i = 0; i < y.size(); ++i) acc += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
    return acc / static_cast<double>(y.size());
}

namespace {

double sse_of(const std::vector<double>& pred, const Dataset& ds) {
    double acc = 0.0;
    for (int i = 0; i < ds.n_rows(); ++i) {
        const double r = ds.target(i) - pred[i];
        acc += r * r;
    }
    return acc;
}

struct LmAttempt {
    Eigen::VectorXd p;
    double sse = kInf;
    int iterations = 0;
    bool converged = false;
    bool start_finite = false;
};

LmAttempt lm_minimize(const Tape& tape, const std::vector<int>& cols, const Dataset& ds, int m,
                      int k, Eigen::VectorXd p, const FitOptions& options) {
    LmAttempt attempt;
    const int n = ds.n_rows();

    std::vector<double> values, adj, params(m), dterm(m);
    auto predictions = [&](const Eigen::VectorXd& point) {
        return predict_flat(tape, cols, std::span<const double>(point.data(), k), ds, m);
    };

    auto pred = predictions(p);
    double sse = sse_of(pred, ds);
    if (!std::isfinite(sse)) return attempt;  // start_finite stays false
    attempt.start_finite = true;

    if (k == 0) {
        attempt.p = std::move(p);
        attempt.sse = sse;
        attempt.converged = true;
        return attempt;
    }

    double lambda = 1e-3;
    Eigen::MatrixXd jtj(k, k);
    Eigen::VectorXd jtr(k);
    std::vector<double> jrow(m);
    std::vector<int> jcol(m);

    bool converged = false;
    int iter = 0;
    for (; iter < options.max_iterations && !converged; ++iter) {
        // Assemble J^T J and J^T r from the row-sparse Jacobian.
        jtj.setZero();
        jtr.setZero();
        bool jac_finite = true;
        for (int row = 0; row < n && jac_finite; ++row) {
            const int* rc = &cols[static_cast<size_t>(row) * m];
            for (int t = 0; t < m; ++t) params[t] = p[rc[t]];
            const double yhat = eval_forward(tape, ds.feature_row(row), params, values);
            eval_reverse(tape, values, adj, dterm);
            const double r = ds.target(row) - yhat;
            for (int t = 0; t < m; ++t) {
                if (!std::isfinite(dterm[t])) {
                    jac_finite = false;
                    break;
                }
                jrow[t] = dterm[t];
                jcol[t] = rc[t];
            }
            if (!jac_finite) break;
            for (int a = 0; a < m; ++a) {
                jtr[jcol[a]] += jrow[a] * r;
                for (int b = 0; b < m; ++b) jtj(jcol[a], jcol[b]) += jrow[a] * jrow[b];
            }
        }
        if (!jac_finite) break;

        if (jtr.lpNorm<Eigen::Infinity>() < options.gradient_tol) {
            converged = true;
            break;
        }

        bool accepted = false;
        for (int trial = 0; trial < 48; ++trial) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal().array() += lambda;
            const Eigen::VectorXd delta = damped.ldlt().solve(jtr);
            const Eigen::VectorXd p_try = p + delta;
            const auto pred_try = predictions(p_try);
            const double sse_try = sse_of(pred_try, ds);
            if (std::isfinite(sse_try) && sse_try <= sse) {
                const double step = delta.norm();
                p = p_try;
                sse = sse_try;
                lambda = std::max(lambda * 0.1, 1e-15);
                if (step < options.step_tol * (p.norm() + options.step_tol)) converged = true;
                accepted = true;
                break;
            }
            lambda *= 10.0;
            if (lambda > 1e14) break;
        }
        if (!accepted) break;  // damping exhausted
    }

    attempt.p = std::move(p);
    attempt.sse = sse;
    attempt.iterations = iter;
    attempt.converged = converged;
    return attempt;
}

}  // namespace

FitResult fit_parameters(const Expression& e, const Dataset& ds,
                         const std::optional<ParameterBinding>& init, const FitOptions& options,
                         std::mt19937_64& rng) {
    if (ds.n_rows() == 0) throw std::invalid_argument("cannot fit on an empty dataset");
    const BindingLayout layout(e, ds.schema());
    if (e.min_feature_count() > ds.n_features()) {
        throw std::invalid_argument("expression references feature beyond dataset");
    }
    if (init && !init->matches(layout)) {
        throw std::invalid_argument("initial binding dimensions do not match expression and schema");
    }
    const auto tape = compile(e);
    const auto cols = row_columns(layout, ds);
    const int m = layout.terminal_count();
    const int k = layout.individual_count();

    LmAttempt best;
    bool any_start_finite = false;
    const int attempts = 1 + std::max(0, options.restarts);
    for (int a = 0; a < attempts; ++a) {
        Eigen::VectorXd p0(k);
        if (a == 0 && init) {
            const auto flat = init->flatten(layout);
            for (int i = 0; i < k; ++i) p0[i] = flat[i];
        } else {
            std::uniform_real_distribution<double> dist(-1.0, 1.0);
            for (int i = 0; i < k; ++i) p0[i] = dist(rng);
        }
        auto attempt = lm_minimize(tape, cols, ds, m, k, std::move(p0), options);
        any_start_finite = any_start_finite || attempt.start_finite;
        if (attempt.start_finite && attempt.sse < best.sse) best = std::move(attempt);
    }

    FitResult result;
    if (!any_start_finite) {
        result.binding = ParameterBinding::zeros(layout);
        result.failed = true;
        return result;
    }
    result.binding =
        ParameterBinding::unflatten(layout, std::span<const double>(best.p.data(), k));
    result.sse = best.sse;
    result.n_iterations = best.iterations;
    result.converged = best.converged;
    const auto pred = predict_flat(tape, cols, std::span<const double>(best.p.data(), k), ds, m);
    result.r_squared = r_squared(ds.targets(), pred);
    return result;
}

}  // namespace catsr
