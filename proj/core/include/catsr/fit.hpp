#ifndef CATSR_FIT_HPP
#define CATSR_FIT_HPP

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "catsr/binding.hpp"
#include "catsr/dataset.hpp"
#include "catsr/expr.hpp"

namespace catsr {

/// Evaluates the expression per row with Param leaves resolved by kind.
/// Non-finite intermediates propagate; nothing is clamped.
std::vector<double> predict(const Expression& e, const ParameterBinding& binding, const Dataset& ds);

/// r_i = y_i - yhat_i in row order.
std::vector<double> residuals(const Expression& e, const ParameterBinding& binding, const Dataset& ds);

/// Row-compressed n x k Jacobian of predictions with respect to the flat
/// individual-parameter vector. Each row holds exactly m structural
/// nonzeros (one column per parameter terminal), so storage is O(n*m).
struct SparseJacobian {
    int n_rows = 0;
    int n_cols = 0;         // k
    int entries_per_row = 0;  // m
    std::vector<int> col;     // n_rows * m
    std::vector<double> val;  // n_rows * m

    int col_at(int row, int slot) const { return col[static_cast<size_t>(row) * entries_per_row + slot]; }
    double val_at(int row, int slot) const { return val[static_cast<size_t>(row) * entries_per_row + slot]; }
};

SparseJacobian sparse_jacobian(const Expression& e, const ParameterBinding& binding, const Dataset& ds);

struct FitOptions {
    int max_iterations = 200;
    double gradient_tol = 1e-10;
    double step_tol = 1e-12;
    int restarts = 0;
};

struct FitResult {
    ParameterBinding binding;
    double sse = std::numeric_limits<double>::infinity();
    std::optional<double> r_squared;  // empty when the target has zero variance
    int n_iterations = 0;
    bool converged = false;
    /// True when every tried initialization produced non-finite residuals.
    bool failed = false;
};

/// Levenberg-Marquardt least squares over the individual parameters, using
/// the row-sparse Jacobian. With restarts > 0 additional runs start from
/// fresh random bindings (uniform in [-1, 1]) and the best sse wins. Never
/// throws on non-convergence.
FitResult fit_parameters(const Expression& e, const Dataset& ds,
                         const std::optional<ParameterBinding>& init, const FitOptions& options,
                         std::mt19937_64& rng);

/// 1 - SS_res/SS_tot; empty when the target variance is zero.
std::optional<double> r_squared(std::span<const double> y, std::span<const double> y_hat);

double mse(std::span<const double> y, std::span<const double> y_hat);

}  // namespace catsr

#endif
