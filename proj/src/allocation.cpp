#include "simalloc/allocation.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

#include "simalloc/rng.hpp"
#include "simalloc/stats.hpp"

namespace simalloc {

namespace {

// Per-condition accumulation state during one strategy run.
struct ConditionState {
    TreatmentCondition cond;
    std::uint64_t cond_seed = 0;  // substream root for this condition
    ConditionEstimate est;
    std::vector<double> values;   // raw replications in replication order
};

// Runs `count` replications starting at replication index `first_rep`.
// Each replication has its own seed derived from (condition, index), so the
// batch can be executed on any number of threads with identical results;
// values are returned in replication order.
std::vector<double> run_batch(const Simulator& sim, const ConditionState& state,
                              std::int64_t first_rep, int count, int threads) {
    std::vector<double> out(static_cast<std::size_t>(count));
    const auto worker = [&](int offset, int stride) {
        for (int i = offset; i < count; i += stride) {
            const std::uint64_t seed =
                rng::derive_stream(state.cond_seed, static_cast<std::uint64_t>(first_rep + i));
            out[static_cast<std::size_t>(i)] = sim.replicate(state.cond, seed);
        }
    };
    const int n_threads = std::min(threads, count);
    if (n_threads <= 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t, n_threads);
        for (auto& th : pool) th.join();
    }
    return out;
}

void add_replications(ConditionState& state, const std::vector<double>& values) {
    for (double v : values) {
        state.est.add(v);
        state.values.push_back(v);
    }
}

std::vector<ConditionState> initial_sweep(const Simulator& sim, const FactorGrid& grid,
                                          int initial_runs, std::uint64_t strategy_seed,
                                          int threads) {
    std::vector<ConditionState> states;
    states.reserve(grid.active().size());
    for (const auto& cond : grid.active()) {
        ConditionState s;
        s.cond = cond;
        s.cond_seed = rng::derive_stream(strategy_seed, grid.ordinal(cond));
        states.push_back(std::move(s));
    }
    for (auto& s : states) {
        add_replications(s, run_batch(sim, s, 0, initial_runs, threads));
    }
    return states;
}

std::vector<double> sample_widths(const std::vector<ConditionState>& states, double confidence) {
    std::vector<double> w;
    w.reserve(states.size());
    for (const auto& s : states) w.push_back(s.est.ci_width(confidence));
    return w;
}

std::int64_t total_runs(const std::vector<ConditionState>& states) {
    std::int64_t total = 0;
    for (const auto& s : states) total += s.est.n;
    return total;
}

std::vector<Observation> collect_observations(const std::vector<ConditionState>& states) {
    std::vector<Observation> obs;
    obs.reserve(static_cast<std::size_t>(total_runs(states)));
    for (const auto& s : states) {
        for (double v : s.values) obs.push_back({s.cond.x1(), s.cond.x2(), v});
    }
    return obs;
}

void require_covariate_spread(const FactorGrid& grid) {
    std::set<int> x1, x2;
    for (const auto& c : grid.active()) {
        x1.insert(c.buprenorphine_index);
        x2.insert(c.naloxone_index);
    }
    if (x1.size() < 2) {
        throw SingularDesignError(
            "model-based allocation needs >=2 distinct Buprenorphine (x1) levels in the active grid");
    }
    if (x2.size() < 2) {
        throw SingularDesignError(
            "model-based allocation needs >=2 distinct Naloxone (x2) levels in the active grid");
    }
}

} // namespace

std::string to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Converged: return "converged";
        case RunStatus::BudgetExhausted: return "budget_exhausted";
        case RunStatus::Completed: return "completed";
    }
    return "unknown";
}

void AllocationConfig::validate(std::size_t n_conditions) const {
    if (n_conditions == 0) throw std::invalid_argument("no active conditions");
    if (initial_runs < 2) throw std::invalid_argument("initial_runs must be >= 2");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (!(ci_threshold > 0.0)) throw std::invalid_argument("ci_threshold must be > 0");
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("confidence must lie in (0,1)");
    }
    if (budget_cap) {
        const auto sweep = static_cast<std::int64_t>(n_conditions) * initial_runs;
        if (*budget_cap < sweep) {
            throw std::invalid_argument("budget_cap smaller than the initial sweep (" +
                                        std::to_string(sweep) + " runs)");
        }
    }
}

std::size_t select_max_ci(std::span<const double> widths) {
    if (widths.empty()) throw std::invalid_argument("select_max_ci: empty width set");
    std::size_t best = 0;
    for (std::size_t i = 1; i < widths.size(); ++i) {
        if (widths[i] > widths[best]) best = i;
    }
    return best;
}

StrategyReport run_brute_force(const Simulator& sim, const FactorGrid& grid,
                               int runs_per_condition, double confidence, std::uint64_t seed,
                               int threads) {
    if (runs_per_condition < 2) throw std::invalid_argument("runs_per_condition must be >= 2");
    if (grid.active().empty()) throw std::invalid_argument("no active conditions");

    auto states = initial_sweep(sim, grid, runs_per_condition, seed, threads);

    StrategyReport report;
    report.status = RunStatus::Completed;
    for (const auto& s : states) {
        report.rows.push_back({s.cond.label, s.est.mean, s.est.ci_width(confidence), s.est.n});
    }
    report.total_runs = total_runs(states);
    return report;
}

StrategyResult run_greedy(const Simulator& sim, const FactorGrid& grid,
                          const AllocationConfig& config, std::uint64_t seed, int threads) {
    config.validate(grid.active().size());
    auto states = initial_sweep(sim, grid, config.initial_runs, seed, threads);

    StrategyResult result;
    auto& trace = result.trace;
    std::vector<double> widths = sample_widths(states, config.confidence);
    trace.sweep_runs = total_runs(states);
    trace.initial_widths = widths;

    std::int64_t total = trace.sweep_runs;
    for (int iteration = 1;; ++iteration) {
        if (*std::max_element(widths.begin(), widths.end()) < config.ci_threshold) {
            trace.status = RunStatus::Converged;
            break;
        }
        if (config.budget_cap && total + config.batch_size > *config.budget_cap) {
            trace.status = RunStatus::BudgetExhausted;
            break;
        }
        const std::size_t pick = select_max_ci(widths);
        auto& s = states[pick];
        add_replications(s, run_batch(sim, s, s.est.n, config.batch_size, threads));
        total += config.batch_size;

        widths = sample_widths(states, config.confidence);
        trace.records.push_back({iteration, s.cond.label, config.batch_size, widths, total});
    }

    auto& report = result.report;
    report.status = trace.status;
    report.total_runs = total;
    for (std::size_t i = 0; i < states.size(); ++i) {
        report.rows.push_back({states[i].cond.label, states[i].est.mean, widths[i], states[i].est.n});
    }
    return result;
}

StrategyResult run_model_greedy(const Simulator& sim, const FactorGrid& grid,
                                const AllocationConfig& config, std::uint64_t seed, int threads) {
    config.validate(grid.active().size());
    require_covariate_spread(grid);
    auto states = initial_sweep(sim, grid, config.initial_runs, seed, threads);

    const auto model_widths = [&](const RegressionModel& model) {
        std::vector<double> w;
        w.reserve(states.size());
        for (const auto& s : states) {
            w.push_back(predict_with_ci(model, s.cond, config.confidence).ci_width);
        }
        return w;
    };
    const auto refit = [&] {
        const auto obs = collect_observations(states);
        return fit_ols(obs, config.with_interaction);
    };

    RegressionModel model = refit();
    std::vector<double> widths = model_widths(model);

    StrategyResult result;
    auto& trace = result.trace;
    trace.sweep_runs = total_runs(states);
    trace.initial_widths = widths;

    std::int64_t total = trace.sweep_runs;
    for (int iteration = 1;; ++iteration) {
        bool stop = false;
        if (config.model_stop_rule == ModelStopRule::CiWidth) {
            stop = *std::max_element(widths.begin(), widths.end()) < config.ci_threshold;
        } else {
            // Largest gap between the model surface and the raw sample means.
            double err = 0.0;
            for (const auto& s : states) {
                err = std::max(err, std::abs(model.predict_mean(s.cond) - s.est.mean));
            }
            stop = err < config.ci_threshold;
        }
        if (stop) {
            trace.status = RunStatus::Converged;
            break;
        }

        const std::int64_t step = config.batch_all_conditions
                                      ? config.batch_size * static_cast<std::int64_t>(states.size())
                                      : config.batch_size;
        if (config.budget_cap && total + step > *config.budget_cap) {
            trace.status = RunStatus::BudgetExhausted;
            break;
        }

        std::string chosen;
        if (config.batch_all_conditions) {
            for (auto& s : states) {
                add_replications(s, run_batch(sim, s, s.est.n, config.batch_size, threads));
            }
            chosen = "all";
        } else {
            auto& s = states[select_max_ci(widths)];
            add_replications(s, run_batch(sim, s, s.est.n, config.batch_size, threads));
            chosen = s.cond.label;
        }
        total += step;

        model = refit();
        widths = model_widths(model);
        trace.records.push_back({iteration, chosen, step, widths, total});
    }

    auto& report = result.report;
    report.status = trace.status;
    report.total_runs = total;
    for (std::size_t i = 0; i < states.size(); ++i) {
        report.rows.push_back({states[i].cond.label, model.predict_mean(states[i].cond), widths[i],
                               states[i].est.n});
    }
    report.model = model;
    return result;
}

} // namespace simalloc
