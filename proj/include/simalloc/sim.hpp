#pragma once

#include <cstdint>
#include <vector>

#include "simalloc/grid.hpp"

namespace simalloc {

// Daily transition probabilities of the surrogate opioid-use-disorder model.
// States: NoUse, OUD, Treatment, Remission, ODDeath (absorbing).
//
//   NoUse     -> OUD        p_onset
//   OUD       -> ODDeath    p_overdose * p_death_base
//   OUD       -> Treatment  p_treat_base
//   Treatment -> OUD        p_relapse
//   Treatment -> Remission  p_remit
//
// The remainder of each row is a self-loop (geometric dwell). The simulator
// consumes p_treat_base and p_death_base as the effective daily values;
// condition_params() is what folds the factor levels into them. This is a
// structural stand-in, not a calibrated model: defaults were picked to give
// hundreds-scale death counts with visible level effects at desk scale.
struct SimParams {
    std::int64_t population = 10'000;
    int horizon_days = 730;
    double p_onset = 0.0002;
    double p_treat_base = 0.01;
    double p_treat_gain = 0.005;   // added to p_treat_base per Buprenorphine level (x1)
    double p_relapse = 0.002;
    double p_remit = 0.003;
    double p_overdose = 0.004;
    double p_death_base = 0.10;    // death probability given an overdose
    double p_death_drop = 0.015;   // subtracted from p_death_base per Naloxone level (x2)
    double initial_oud_fraction = 0.30;

    // Number of agents starting in OUD; the rest start in NoUse.
    std::int64_t initial_oud_count() const noexcept;

    // Throws std::invalid_argument (naming the offending field) if any
    // probability leaves [0,1] at any grid corner, or if any state's daily
    // outflow can exceed 1.
    void validate(int max_x1, int max_x2) const;
};

struct SimOutcome {
    std::int64_t od_deaths = 0;
    std::int64_t treated_entries = 0;  // cumulative OUD -> Treatment transitions
};

struct DailyCounts {
    std::int64_t no_use = 0;
    std::int64_t oud = 0;
    std::int64_t treatment = 0;
    std::int64_t remission = 0;
    std::int64_t od_deaths = 0;
};

// Resolves the per-condition daily probabilities:
//   p_treat = p_treat_base + p_treat_gain * x1
//   p_death = p_death_base - p_death_drop * x2
// Throws std::invalid_argument if either leaves [0,1].
SimParams condition_params(const SimParams& base, const TreatmentCondition& cond);

// One stochastic replication of the surrogate over the full horizon.
// Agents are independent, so state counts are propagated directly with
// exact multinomial day steps (identical in distribution to simulating
// each agent, and orders of magnitude faster). The sampling path uses no
// libm calls, so identical (params, seed) pairs give bit-identical
// outcomes on any IEEE-754 platform.
SimOutcome simulate_replication(const SimParams& params, std::uint64_t seed);

// As above, also recording the state counts for day 0..horizon_days.
SimOutcome simulate_with_history(const SimParams& params, std::uint64_t seed,
                                 std::vector<DailyCounts>& history);

// Exact expected OD deaths: propagates the state-occupancy distribution
// through the daily transition matrix. Exact for this model because agents
// are independent and identically distributed.
double expected_outcome(const SimParams& params);

// What the allocation strategies see: a black box mapping (condition, seed)
// to one replication of the target metric.
class Simulator {
public:
    virtual ~Simulator() = default;

    // Must be a pure function of (cond, seed) and safe to call concurrently.
    virtual double replicate(const TreatmentCondition& cond, std::uint64_t seed) const = 0;
};

// The surrogate OUD model behind the Simulator interface. Per-condition
// parameters are resolved and validated once at construction; the object is
// immutable afterwards and safe to share across threads.
class OudSimulator final : public Simulator {
public:
    OudSimulator(const SimParams& base, const FactorGrid& grid);

    double replicate(const TreatmentCondition& cond, std::uint64_t seed) const override;

    const SimParams& params_for(const TreatmentCondition& cond) const;

private:
    std::vector<SimParams> by_cell_;  // full grid, row-major
    std::size_t n_buprenorphine_;
    std::size_t n_naloxone_;
};

} // namespace simalloc
