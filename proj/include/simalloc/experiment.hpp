#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "simalloc/allocation.hpp"
#include "simalloc/config.hpp"

namespace simalloc {

struct StrategyOutcome {
    std::string name;
    StrategyReport report;
    std::optional<AllocationTrace> trace;  // adaptive strategies only
    double wall_seconds = 0.0;
};

struct ReportBundle {
    std::vector<StrategyOutcome> outcomes;  // config order
};

// Runs every selected strategy on its own derived seed stream and writes
// <strategy>.csv, <strategy>_trace.csv, summary.csv and timings.log under
// config.out_dir. Results are computed fully before any file is written, so
// a failing strategy leaves no partial outputs. Returns the in-memory
// bundle for further emission.
ReportBundle run_experiment(const ExperimentConfig& config);

// Writes plotdata/<strategy>_intervals.csv (per-condition mean and interval
// endpoints) and plotdata/<strategy>_trajectory.csv (max width vs cumulative
// runs, one point for the sweep plus one per batch). An empty bundle writes
// nothing.
void emit_plot_data(const ReportBundle& bundle, const std::filesystem::path& out_dir);

} // namespace simalloc
