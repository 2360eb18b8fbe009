#ifndef CATSR_PROCESSION_HPP
#define CATSR_PROCESSION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "catsr/fit.hpp"
#include "catsr/synthetic.hpp"

namespace catsr {

/// The data-sufficiency experiment: starting from the full synthetic
/// training set, repeatedly move one random training point to the test set,
/// perturb the reference parameters, refit on the remaining training data,
/// and record the test error, until the minimum data requirements fail.
struct ProcessionOptions {
    int processions = 100;
    uint64_t seed = 0;
    double perturb_scale = 0.1;
    int points_per_cell = 8;
    double sample_lo = -20.0;
    double sample_hi = 20.0;
    int refit_restarts = 5;  // extra random starts when the warm refit stalls
    FitOptions fit;
    /// Model under study; defaults to the built-in quartic benchmark with
    /// its reference parameter values.
    std::optional<Expression> expression;
};

struct ProcessionRow {
    int procession = 0;   // 1-based
    int n_train = 0;      // total training points, part of the row ID
    std::vector<int> cell_counts;
    std::optional<double> mse_test;  // empty while the test set is empty
    bool requirements_met = false;   // verdict computed before refitting
    bool fit_converged = false;
};

std::vector<ProcessionRow> run_processions(const ProcessionOptions& options);

}  // namespace catsr

#endif
