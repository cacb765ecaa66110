#include "simalloc/stats.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace simalloc {

double t_quantile(double prob, double dof) {
    if (!(prob > 0.0 && prob < 1.0)) throw std::invalid_argument("t_quantile: prob outside (0,1)");
    if (!(dof >= 1.0)) throw std::invalid_argument("t_quantile: dof must be >= 1");
    return boost::math::quantile(boost::math::students_t_distribution<double>(dof), prob);
}

double ci_width(std::int64_t n, double variance, double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("ci_width: confidence outside (0,1)");
    }
    if (n < 2) return std::numeric_limits<double>::infinity();
    if (variance <= 0.0) return 0.0;
    const double t = t_quantile(1.0 - (1.0 - confidence) / 2.0, static_cast<double>(n - 1));
    return 2.0 * t * std::sqrt(variance / static_cast<double>(n));
}

double ConditionEstimate::ci_width(double confidence) const {
    return simalloc::ci_width(n, n < 2 ? 0.0 : variance(), confidence);
}

} // namespace simalloc
