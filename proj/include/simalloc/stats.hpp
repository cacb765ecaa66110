#pragma once

#include <cstdint>
#include <limits>

namespace simalloc {

// Two-sided Student-t quantile, e.g. t_quantile(0.975, 12).
double t_quantile(double prob, double dof);

// Full width of the two-sided CI on a mean: 2 * t * sqrt(variance / n).
// Returns +inf while n < 2 (callers rely on that convention) and exactly 0
// for zero-variance data.
double ci_width(std::int64_t n, double variance, double confidence);

// Streaming sample moments for one treatment condition (Welford update).
struct ConditionEstimate {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;  // sum of squared deviations from the running mean

    void add(double value) noexcept {
        ++n;
        const double d = value - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (value - mean);
    }

    double variance() const noexcept {
        if (n < 2) return std::numeric_limits<double>::quiet_NaN();
        return m2 / static_cast<double>(n - 1);
    }

    double ci_width(double confidence) const;
};

} // namespace simalloc
