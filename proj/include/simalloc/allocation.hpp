#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "simalloc/grid.hpp"
#include "simalloc/regression.hpp"
#include "simalloc/sim.hpp"

namespace simalloc {

enum class RunStatus { Converged, BudgetExhausted, Completed };

std::string to_string(RunStatus status);

// Stopping rule for the model-based strategies. CiWidth stops when every
// condition's model CI is below the threshold; MaxError stops when the
// largest |model prediction - sample mean| falls below it.
enum class ModelStopRule { CiWidth, MaxError };

struct AllocationConfig {
    int initial_runs = 100;   // per-condition sweep before any adaptive step
    int batch_size = 50;
    double ci_threshold = 4.0;
    double confidence = 0.95;
    std::optional<std::int64_t> budget_cap;  // total replications, sweep included
    bool with_interaction = true;            // model-based strategies only
    ModelStopRule model_stop_rule = ModelStopRule::CiWidth;
    bool batch_all_conditions = false;       // add each batch to every condition

    void validate(std::size_t n_conditions) const;
};

// One adaptive step: which condition got the batch and the per-condition
// width snapshot after it landed. Widths are sample CIs for the greedy
// strategy and model CIs for the model-based ones.
struct TraceRecord {
    int iteration = 0;
    std::string condition;  // chosen label; "all" when batching every condition
    std::int64_t batch = 0;
    std::vector<double> widths;
    std::int64_t cumulative_runs = 0;
};

struct AllocationTrace {
    std::int64_t sweep_runs = 0;
    std::vector<double> initial_widths;  // snapshot right after the sweep
    std::vector<TraceRecord> records;
    RunStatus status = RunStatus::Completed;
};

struct ReportRow {
    std::string label;
    double mean = 0.0;
    double ci_width = 0.0;
    std::int64_t runs = 0;
};

struct StrategyReport {
    std::vector<ReportRow> rows;  // active-grid order
    std::int64_t total_runs = 0;
    RunStatus status = RunStatus::Completed;
    std::optional<RegressionModel> model;  // model-based strategies only
};

struct StrategyResult {
    StrategyReport report;
    AllocationTrace trace;
};

// Argmax width, ties broken toward the lowest index. Undefined widths must
// be mapped to +inf by the caller. Throws std::invalid_argument when empty.
std::size_t select_max_ci(std::span<const double> widths);

// Equal allocation: every active condition gets exactly runs_per_condition
// replications. Rows report sample means and sample CI widths.
StrategyReport run_brute_force(const Simulator& sim, const FactorGrid& grid,
                               int runs_per_condition, double confidence, std::uint64_t seed,
                               int threads = 1);

// CI-greedy allocation: after the sweep, each batch goes to the condition
// with the widest sample CI until every width is below the threshold or the
// budget cap is hit.
StrategyResult run_greedy(const Simulator& sim, const FactorGrid& grid,
                          const AllocationConfig& config, std::uint64_t seed, int threads = 1);

// Model-based greedy allocation: a regression over all accumulated
// replications supplies per-condition means and CIs; batches go to the
// condition with the widest model CI. Rows report model predictions and
// model widths; run counts stay per-condition raw counts.
StrategyResult run_model_greedy(const Simulator& sim, const FactorGrid& grid,
                                const AllocationConfig& config, std::uint64_t seed,
                                int threads = 1);

} // namespace simalloc
