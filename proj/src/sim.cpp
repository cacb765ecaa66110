#include "simalloc/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "simalloc/rng.hpp"

namespace simalloc {

namespace {

void check_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie in [0,1], got " + std::to_string(v));
    }
}

// Conditional probability of the second outflow given the first was drawn
// out already. Clamped against rounding when the two sum to exactly 1.
double conditional_prob(double second, double first) {
    const double rest = 1.0 - first;
    if (rest <= 0.0) return 0.0;
    return std::min(second / rest, 1.0);
}

template <typename Observer>
SimOutcome simulate_impl(const SimParams& p, std::uint64_t seed, Observer&& observe) {
    rng::SplitMix64 gen(seed);

    std::int64_t oud = p.initial_oud_count();
    std::int64_t no_use = p.population - oud;
    std::int64_t treatment = 0;
    std::int64_t remission = 0;
    std::int64_t dead = 0;
    std::int64_t entries = 0;

    const double p_od_death = p.p_overdose * p.p_death_base;
    const double p_treat_given_alive = conditional_prob(p.p_treat_base, p_od_death);
    const double p_remit_given_stay = conditional_prob(p.p_remit, p.p_relapse);

    observe(DailyCounts{no_use, oud, treatment, remission, dead});

    for (int day = 0; day < p.horizon_days; ++day) {
        // All outflows are drawn from the start-of-day counts; the fixed
        // draw order (onset, death, treat, relapse, remit) is part of the
        // reproducibility contract.
        const std::int64_t onset = rng::binomial(gen, no_use, p.p_onset);
        const std::int64_t deaths = rng::binomial(gen, oud, p_od_death);
        const std::int64_t to_treat = rng::binomial(gen, oud - deaths, p_treat_given_alive);
        const std::int64_t relapse = rng::binomial(gen, treatment, p.p_relapse);
        const std::int64_t remit = rng::binomial(gen, treatment - relapse, p_remit_given_stay);

        no_use -= onset;
        oud += onset + relapse - deaths - to_treat;
        treatment += to_treat - relapse - remit;
        remission += remit;
        dead += deaths;
        entries += to_treat;

        observe(DailyCounts{no_use, oud, treatment, remission, dead});
    }
    return {dead, entries};
}

} // namespace

std::int64_t SimParams::initial_oud_count() const noexcept {
    const auto count = std::llround(initial_oud_fraction * static_cast<double>(population));
    return std::clamp<std::int64_t>(count, 0, population);
}

void SimParams::validate(int max_x1, int max_x2) const {
    if (population < 1) throw std::invalid_argument("population must be >= 1");
    if (horizon_days < 0) throw std::invalid_argument("horizon_days must be >= 0");

    check_unit(p_onset, "p_onset");
    check_unit(p_treat_base, "p_treat_base");
    check_unit(p_relapse, "p_relapse");
    check_unit(p_remit, "p_remit");
    check_unit(p_overdose, "p_overdose");
    check_unit(p_death_base, "p_death_base");
    check_unit(initial_oud_fraction, "initial_oud_fraction");
    if (p_treat_gain < 0.0) throw std::invalid_argument("p_treat_gain must be >= 0");
    if (p_death_drop < 0.0) throw std::invalid_argument("p_death_drop must be >= 0");

    const double treat_max = p_treat_base + p_treat_gain * max_x1;
    if (treat_max > 1.0) {
        throw std::invalid_argument(
            "p_treat_base + p_treat_gain * " + std::to_string(max_x1) +
            " exceeds 1 (got " + std::to_string(treat_max) + ")");
    }
    const double death_min = p_death_base - p_death_drop * max_x2;
    if (death_min < 0.0) {
        throw std::invalid_argument(
            "p_death_base - p_death_drop * " + std::to_string(max_x2) +
            " is negative (got " + std::to_string(death_min) + ")");
    }

    // Daily outflow from each state must fit in one day at every corner of
    // the grid; the remainder is the dwell self-loop.
    if (treat_max + p_overdose * p_death_base > 1.0) {
        throw std::invalid_argument("OUD outflow p_treat + p_overdose*p_death exceeds 1");
    }
    if (p_relapse + p_remit > 1.0) {
        throw std::invalid_argument("Treatment outflow p_relapse + p_remit exceeds 1");
    }
}

SimParams condition_params(const SimParams& base, const TreatmentCondition& cond) {
    SimParams out = base;
    out.p_treat_base = base.p_treat_base + base.p_treat_gain * cond.x1();
    out.p_death_base = base.p_death_base - base.p_death_drop * cond.x2();
    if (out.p_treat_base < 0.0 || out.p_treat_base > 1.0) {
        throw std::invalid_argument("condition " + cond.label + ": p_treat " +
                                    std::to_string(out.p_treat_base) + " outside [0,1]");
    }
    if (out.p_death_base < 0.0 || out.p_death_base > 1.0) {
        throw std::invalid_argument("condition " + cond.label + ": p_death " +
                                    std::to_string(out.p_death_base) + " outside [0,1]");
    }
    return out;
}

SimOutcome simulate_replication(const SimParams& params, std::uint64_t seed) {
    return simulate_impl(params, seed, [](const DailyCounts&) {});
}

SimOutcome simulate_with_history(const SimParams& params, std::uint64_t seed,
                                 std::vector<DailyCounts>& history) {
    history.clear();
    history.reserve(static_cast<std::size_t>(params.horizon_days) + 1);
    return simulate_impl(params, seed, [&history](const DailyCounts& c) { history.push_back(c); });
}

double expected_outcome(const SimParams& p) {
    // State order: NoUse, OUD, Treatment, Remission, ODDeath.
    const double p_od_death = p.p_overdose * p.p_death_base;
    std::array<double, 5> occ{};
    const double f = static_cast<double>(p.initial_oud_count()) / static_cast<double>(p.population);
    occ[0] = 1.0 - f;
    occ[1] = f;

    for (int day = 0; day < p.horizon_days; ++day) {
        const std::array<double, 5> prev = occ;
        occ[0] = prev[0] * (1.0 - p.p_onset);
        occ[1] = prev[0] * p.p_onset +
                 prev[1] * (1.0 - p_od_death - p.p_treat_base) +
                 prev[2] * p.p_relapse;
        occ[2] = prev[1] * p.p_treat_base + prev[2] * (1.0 - p.p_relapse - p.p_remit);
        occ[3] = prev[3] + prev[2] * p.p_remit;
        occ[4] = prev[4] + prev[1] * p_od_death;
    }
    return static_cast<double>(p.population) * occ[4];
}

OudSimulator::OudSimulator(const SimParams& base, const FactorGrid& grid)
    : n_buprenorphine_(grid.buprenorphine_levels().size()),
      n_naloxone_(grid.naloxone_levels().size()) {
    base.validate(grid.max_x1(), grid.max_x2());
    by_cell_.reserve(grid.cell_count());
    for (int nal = 0; nal <= grid.max_x2(); ++nal) {
        for (int bup = 0; bup <= grid.max_x1(); ++bup) {
            by_cell_.push_back(condition_params(base, grid.condition(nal, bup)));
        }
    }
}

const SimParams& OudSimulator::params_for(const TreatmentCondition& cond) const {
    if (cond.naloxone_index < 0 || static_cast<std::size_t>(cond.naloxone_index) >= n_naloxone_ ||
        cond.buprenorphine_index < 0 ||
        static_cast<std::size_t>(cond.buprenorphine_index) >= n_buprenorphine_) {
        throw std::out_of_range("condition '" + cond.label + "' outside simulator grid");
    }
    return by_cell_[static_cast<std::size_t>(cond.naloxone_index) * n_buprenorphine_ +
                    static_cast<std::size_t>(cond.buprenorphine_index)];
}

double OudSimulator::replicate(const TreatmentCondition& cond, std::uint64_t seed) const {
    return static_cast<double>(simulate_replication(params_for(cond), seed).od_deaths);
}

} // namespace simalloc
