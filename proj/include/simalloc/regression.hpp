#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "simalloc/grid.hpp"

namespace simalloc {

// One simulation replication as seen by the regression:
// covariates (x1 = Buprenorphine level, x2 = Naloxone level) and outcome y.
struct Observation {
    double x1 = 0.0;
    double x2 = 0.0;
    double y = 0.0;
};

class SingularDesignError : public std::runtime_error {
public:
    explicit SingularDesignError(const std::string& what) : std::runtime_error(what) {}
};

// Design row (1, x1, x2[, x1*x2]).
std::array<double, 4> design_row(double x1, double x2, bool with_interaction);

// Ordinary least squares fit of
//   y = b0 + b1*x1 + b2*x2 + b3*x1*x2   (with_interaction)
//   y = b0 + b1*x1 + b2*x2              (otherwise)
struct RegressionModel {
    bool with_interaction = false;
    bool fitted = false;
    int n_params = 0;                                // 3 or 4
    std::int64_t n_total = 0;                        // observations fitted
    std::array<double, 4> beta{};                    // first n_params entries
    std::array<std::array<double, 4>, 4> xtx_inverse{};
    double sigma2_hat = 0.0;                         // RSS / (n - p); 0 when n == p

    double predict_mean(double x1, double x2) const;
    double predict_mean(const TreatmentCondition& cond) const {
        return predict_mean(cond.x1(), cond.x2());
    }

    // Standard error of the fitted conditional mean at (x1, x2):
    // sqrt(sigma2_hat * x0' (X'X)^-1 x0).
    double mean_standard_error(double x1, double x2) const;
};

struct PredictionInterval {
    double mean = 0.0;
    double ci_width = 0.0;  // full width of the CI on the conditional mean
};

// Solves the normal equations by Cholesky factorization. Requires at least
// p observations and a full-rank design; otherwise throws
// SingularDesignError.
RegressionModel fit_ols(std::span<const Observation> observations, bool with_interaction);

// CI on the regression mean at a condition, full width
// 2 * t_{1-a/2, n-p} * sqrt(sigma2_hat * leverage). Throws std::logic_error
// on an unfitted model.
PredictionInterval predict_with_ci(const RegressionModel& model, const TreatmentCondition& cond,
                                   double confidence);
PredictionInterval predict_with_ci(const RegressionModel& model, double x1, double x2,
                                   double confidence);

} // namespace simalloc
