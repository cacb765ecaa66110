#include "simalloc/regression.hpp"

#include <algorithm>
#include <cmath>

#include "simalloc/stats.hpp"

namespace simalloc {

namespace {

using Mat4 = std::array<std::array<double, 4>, 4>;

// Cholesky factorization A = L L' for the leading p x p block.
// Returns false if a pivot falls below the rank tolerance.
bool cholesky(const Mat4& a, int p, Mat4& lower) {
    double max_diag = 0.0;
    for (int i = 0; i < p; ++i) max_diag = std::max(max_diag, a[i][i]);
    const double tol = 1e-12 * std::max(max_diag, 1.0);

    lower = {};
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= lower[i][k] * lower[j][k];
            if (i == j) {
                if (s <= tol) return false;
                lower[i][i] = std::sqrt(s);
            } else {
                lower[i][j] = s / lower[j][j];
            }
        }
    }
    return true;
}

// Inverse of A from its Cholesky factor: A^-1 = L^-T L^-1.
Mat4 invert_from_cholesky(const Mat4& lower, int p) {
    Mat4 linv{};
    for (int i = 0; i < p; ++i) {
        linv[i][i] = 1.0 / lower[i][i];
        for (int j = 0; j < i; ++j) {
            double s = 0.0;
            for (int k = j; k < i; ++k) s += lower[i][k] * linv[k][j];
            linv[i][j] = -s / lower[i][i];
        }
    }
    Mat4 inv{};
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = i; k < p; ++k) s += linv[k][i] * linv[k][j];
            inv[i][j] = inv[j][i] = s;
        }
    }
    return inv;
}

} // namespace

std::array<double, 4> design_row(double x1, double x2, bool with_interaction) {
    return {1.0, x1, x2, with_interaction ? x1 * x2 : 0.0};
}

double RegressionModel::predict_mean(double x1, double x2) const {
    if (!fitted) throw std::logic_error("RegressionModel: predict on unfitted model");
    const auto row = design_row(x1, x2, with_interaction);
    double m = 0.0;
    for (int i = 0; i < n_params; ++i) m += beta[i] * row[i];
    return m;
}

double RegressionModel::mean_standard_error(double x1, double x2) const {
    if (!fitted) throw std::logic_error("RegressionModel: standard error on unfitted model");
    const auto row = design_row(x1, x2, with_interaction);
    double leverage = 0.0;
    for (int i = 0; i < n_params; ++i)
        for (int j = 0; j < n_params; ++j) leverage += row[i] * xtx_inverse[i][j] * row[j];
    return std::sqrt(std::max(sigma2_hat * leverage, 0.0));
}

RegressionModel fit_ols(std::span<const Observation> observations, bool with_interaction) {
    const int p = with_interaction ? 4 : 3;
    const auto n = static_cast<std::int64_t>(observations.size());
    if (n < p) {
        throw SingularDesignError("fit_ols: need at least " + std::to_string(p) +
                                  " observations, got " + std::to_string(n));
    }

    Mat4 xtx{};
    std::array<double, 4> xty{};
    for (const auto& obs : observations) {
        const auto row = design_row(obs.x1, obs.x2, with_interaction);
        for (int i = 0; i < p; ++i) {
            xty[i] += row[i] * obs.y;
            for (int j = 0; j <= i; ++j) xtx[i][j] += row[i] * row[j];
        }
    }
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) xtx[i][j] = xtx[j][i];

    Mat4 lower;
    if (!cholesky(xtx, p, lower)) {
        throw SingularDesignError("fit_ols: design matrix is rank deficient");
    }

    RegressionModel model;
    model.with_interaction = with_interaction;
    model.n_params = p;
    model.n_total = n;
    model.xtx_inverse = invert_from_cholesky(lower, p);

    // beta = (X'X)^-1 X'y via the two triangular solves.
    std::array<double, 4> z{};
    for (int i = 0; i < p; ++i) {
        double s = xty[i];
        for (int k = 0; k < i; ++k) s -= lower[i][k] * z[k];
        z[i] = s / lower[i][i];
    }
    for (int i = p - 1; i >= 0; --i) {
        double s = z[i];
        for (int k = i + 1; k < p; ++k) s -= lower[k][i] * model.beta[k];
        model.beta[i] = s / lower[i][i];
    }
    model.fitted = true;

    // Explicit residual pass; avoids the cancellation in y'y - b'X'y.
    double rss = 0.0;
    for (const auto& obs : observations) {
        const double r = obs.y - model.predict_mean(obs.x1, obs.x2);
        rss += r * r;
    }
    model.sigma2_hat = n > p ? rss / static_cast<double>(n - p) : 0.0;
    return model;
}

PredictionInterval predict_with_ci(const RegressionModel& model, double x1, double x2,
                                   double confidence) {
    if (!model.fitted) throw std::logic_error("predict_with_ci: unfitted model");
    PredictionInterval out;
    out.mean = model.predict_mean(x1, x2);
    const double se = model.mean_standard_error(x1, x2);
    if (se == 0.0 || model.n_total <= model.n_params) {
        out.ci_width = 0.0;
        return out;
    }
    const double t = t_quantile(1.0 - (1.0 - confidence) / 2.0,
                                static_cast<double>(model.n_total - model.n_params));
    out.ci_width = 2.0 * t * se;
    return out;
}

PredictionInterval predict_with_ci(const RegressionModel& model, const TreatmentCondition& cond,
                                   double confidence) {
    return predict_with_ci(model, cond.x1(), cond.x2(), confidence);
}

} // namespace simalloc
