#include "simalloc/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <stdexcept>

#include "simalloc/rng.hpp"

namespace simalloc {

namespace {

namespace fs = std::filesystem;

// Fixed two decimal places, matching the precision of the report tables.
std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// Shortest round-trip representation; used everywhere exact replay matters.
std::string fmt_full(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    explicit CsvWriter(const fs::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

// Collects every path it writes so a failure can undo the lot.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    CsvWriter open(const fs::path& relative) {
        const fs::path full = dir_ / relative;
        fs::create_directories(full.parent_path());
        written_.push_back(full);
        return CsvWriter(full);
    }

    void discard_all() noexcept {
        for (const auto& p : written_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
};

StrategyOutcome run_one(const std::string& name, const ExperimentConfig& config,
                        const Simulator& sim, const FactorGrid& grid) {
    const std::uint64_t seed = rng::derive_stream(config.master_seed, rng::hash_name(name));
    const AllocationConfig alloc = config.allocation_for(name);

    StrategyOutcome outcome;
    outcome.name = name;
    const auto start = std::chrono::steady_clock::now();
    if (name == kBruteForce) {
        outcome.report = run_brute_force(sim, grid, config.brute_force_runs, alloc.confidence,
                                         seed, config.threads);
    } else if (name == kGreedy) {
        auto result = run_greedy(sim, grid, alloc, seed, config.threads);
        outcome.report = std::move(result.report);
        outcome.trace = std::move(result.trace);
    } else {
        auto result = run_model_greedy(sim, grid, alloc, seed, config.threads);
        outcome.report = std::move(result.report);
        outcome.trace = std::move(result.trace);
    }
    outcome.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return outcome;
}

void write_report_csv(OutputSet& out, const StrategyOutcome& s) {
    auto csv = out.open(s.name + ".csv");
    csv.row({"TC", "Mean", "CI width", "number of runs"});
    for (const auto& row : s.report.rows) {
        csv.row({row.label, fmt2(row.mean), fmt2(row.ci_width), std::to_string(row.runs)});
    }
    csv.row({"Total", "", "", std::to_string(s.report.total_runs)});
}

void write_trace_csv(OutputSet& out, const StrategyOutcome& s) {
    const auto& trace = *s.trace;
    auto csv = out.open(s.name + "_trace.csv");

    std::vector<std::string> header = {"iteration", "condition", "batch", "cumulative_runs"};
    for (const auto& row : s.report.rows) header.push_back("w_" + row.label);
    csv.row(header);

    const auto width_cells = [](const std::vector<double>& widths) {
        std::vector<std::string> cells;
        cells.reserve(widths.size());
        for (double w : widths) cells.push_back(fmt_full(w));
        return cells;
    };

    std::vector<std::string> sweep = {"0", "sweep", std::to_string(trace.sweep_runs),
                                      std::to_string(trace.sweep_runs)};
    for (auto& c : width_cells(trace.initial_widths)) sweep.push_back(std::move(c));
    csv.row(sweep);

    for (const auto& rec : trace.records) {
        std::vector<std::string> row = {std::to_string(rec.iteration), rec.condition,
                                        std::to_string(rec.batch),
                                        std::to_string(rec.cumulative_runs)};
        for (auto& c : width_cells(rec.widths)) row.push_back(std::move(c));
        csv.row(row);
    }
}

void write_summary_csv(OutputSet& out, const ReportBundle& bundle) {
    auto csv = out.open("summary.csv");
    csv.row({"strategy", "status", "total_runs", "max_ci_width", "mean_ci_width"});
    for (const auto& s : bundle.outcomes) {
        double max_w = 0.0, sum_w = 0.0;
        for (const auto& row : s.report.rows) {
            max_w = std::max(max_w, row.ci_width);
            sum_w += row.ci_width;
        }
        const double mean_w = s.report.rows.empty() ? 0.0 : sum_w / static_cast<double>(s.report.rows.size());
        csv.row({s.name, to_string(s.report.status), std::to_string(s.report.total_runs),
                 fmt2(max_w), fmt2(mean_w)});
    }
}

// Wall times live outside the CSV set: they differ between runs by nature,
// while every CSV is required to be byte-identical for a fixed seed.
void write_timings(const fs::path& dir, const ReportBundle& bundle) {
    std::ofstream out(dir / "timings.log", std::ios::binary);
    double total = 0.0;
    for (const auto& s : bundle.outcomes) {
        out << s.name << ": " << fmt2(s.wall_seconds) << " s\n";
        total += s.wall_seconds;
    }
    out << "total: " << fmt2(total) << " s\n";
}

} // namespace

ReportBundle run_experiment(const ExperimentConfig& config) {
    validate_config(config);
    const FactorGrid grid = build_grid(config.grid);
    const OudSimulator sim(config.sim, grid);

    // All strategy results are computed before the first byte is written, so
    // a strategy failure never leaves partial outputs behind.
    ReportBundle bundle;
    if (config.parallel_strategies) {
        std::vector<std::future<StrategyOutcome>> futures;
        futures.reserve(config.strategies.size());
        for (const auto& name : config.strategies) {
            futures.push_back(std::async(std::launch::async, run_one, name, std::cref(config),
                                         std::cref(sim), std::cref(grid)));
        }
        for (auto& f : futures) bundle.outcomes.push_back(f.get());
    } else {
        for (const auto& name : config.strategies) {
            bundle.outcomes.push_back(run_one(name, config, sim, grid));
        }
    }

    if (bundle.outcomes.empty()) return bundle;

    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    OutputSet out(dir);
    try {
        for (const auto& s : bundle.outcomes) {
            write_report_csv(out, s);
            if (s.trace) write_trace_csv(out, s);
        }
        write_summary_csv(out, bundle);
        write_timings(dir, bundle);
    } catch (...) {
        out.discard_all();
        throw;
    }
    return bundle;
}

void emit_plot_data(const ReportBundle& bundle, const std::filesystem::path& out_dir) {
    if (bundle.outcomes.empty()) return;

    OutputSet out(out_dir);
    try {
        for (const auto& s : bundle.outcomes) {
            auto intervals = out.open(fs::path("plotdata") / (s.name + "_intervals.csv"));
            intervals.row({"TC", "mean", "lower", "upper"});
            for (const auto& row : s.report.rows) {
                const double half = row.ci_width / 2.0;
                intervals.row({row.label, fmt_full(row.mean), fmt_full(row.mean - half),
                               fmt_full(row.mean + half)});
            }

            if (!s.trace) continue;
            const auto& trace = *s.trace;
            auto traj = out.open(fs::path("plotdata") / (s.name + "_trajectory.csv"));
            traj.row({"cumulative_runs", "max_ci_width"});
            const auto max_of = [](const std::vector<double>& w) {
                return *std::max_element(w.begin(), w.end());
            };
            traj.row({std::to_string(trace.sweep_runs), fmt_full(max_of(trace.initial_widths))});
            for (const auto& rec : trace.records) {
                traj.row({std::to_string(rec.cumulative_runs), fmt_full(max_of(rec.widths))});
            }
        }
    } catch (...) {
        out.discard_all();
        throw;
    }
}

} // namespace simalloc
