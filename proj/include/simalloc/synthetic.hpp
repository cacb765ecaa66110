#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

#include "simalloc/rng.hpp"
#include "simalloc/sim.hpp"

namespace simalloc {

// Gaussian outcome whose mean is linear in the coded levels:
//   y ~ Normal(b0 + b1*x1 + b2*x2 + b3*x1*x2, sigma^2).
// Useful as a ground-truth surface when exercising the allocation
// strategies against a known regression model.
class LinearGaussianSimulator final : public Simulator {
public:
    LinearGaussianSimulator(double b0, double b1, double b2, double b3, double sigma)
        : b0_(b0), b1_(b1), b2_(b2), b3_(b3), sigma_(sigma) {
        if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
    }

    double true_mean(const TreatmentCondition& c) const noexcept {
        return b0_ + b1_ * c.x1() + b2_ * c.x2() + b3_ * c.x1() * c.x2();
    }

    double replicate(const TreatmentCondition& cond, std::uint64_t seed) const override {
        rng::SplitMix64 gen(seed);
        return true_mean(cond) + sigma_ * gen.normal();
    }

private:
    double b0_, b1_, b2_, b3_, sigma_;
};

// Gaussian outcome with an explicit (mean, sd) per condition label.
// sd = 0 gives a deterministic simulator.
class TableGaussianSimulator final : public Simulator {
public:
    void set(const std::string& label, double mean, double sd) {
        if (sd < 0.0) throw std::invalid_argument("sd must be >= 0");
        table_[label] = {mean, sd};
    }

    double replicate(const TreatmentCondition& cond, std::uint64_t seed) const override {
        const auto it = table_.find(cond.label);
        if (it == table_.end()) {
            throw std::out_of_range("no entry for condition '" + cond.label + "'");
        }
        const auto [mean, sd] = it->second;
        if (sd == 0.0) return mean;
        rng::SplitMix64 gen(seed);
        return mean + sd * gen.normal();
    }

private:
    std::unordered_map<std::string, std::pair<double, double>> table_;
};

} // namespace simalloc
