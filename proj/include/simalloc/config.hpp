#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "simalloc/allocation.hpp"
#include "simalloc/grid.hpp"
#include "simalloc/sim.hpp"

namespace simalloc {

inline constexpr std::string_view kBruteForce = "brute_force";
inline constexpr std::string_view kGreedy = "greedy";
inline constexpr std::string_view kModelGreedy = "model_greedy";
inline constexpr std::string_view kModelGreedyNoInteraction = "model_greedy_no_interaction";

inline constexpr std::array<std::string_view, 4> kStrategyNames = {
    kBruteForce, kGreedy, kModelGreedy, kModelGreedyNoInteraction};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A fully-resolved experiment description. Every field has a documented
// default so a minimal document (a grid alone, even "{}") is valid. The
// master seed defaults to a fixed constant: reproducibility never depends
// on the wall clock.
struct ExperimentConfig {
    GridSpec grid;
    SimParams sim;
    AllocationConfig allocation;  // base settings for the adaptive strategies
    std::map<std::string, AllocationConfig> overrides;  // per-strategy, already merged
    int brute_force_runs = 2000;
    std::vector<std::string> strategies = {std::string(kBruteForce), std::string(kGreedy),
                                           std::string(kModelGreedy),
                                           std::string(kModelGreedyNoInteraction)};
    std::uint64_t master_seed = 20160101;
    std::string out_dir = "results";
    int threads = 1;
    bool parallel_strategies = false;

    // Allocation settings for one strategy: the per-strategy override if
    // present, otherwise the base block, with with_interaction forced to
    // match the strategy name.
    AllocationConfig allocation_for(std::string_view strategy) const;
};

bool is_known_strategy(std::string_view name);

// Parses and validates a configuration document (JSON, // comments allowed).
// Unknown keys are rejected by name; all invariant violations name the
// offending key or bound.
ExperimentConfig parse_config(const std::string& text);

// parse_config over the contents of `path`. Throws ConfigError when the
// file is missing or unreadable.
ExperimentConfig load_config(const std::filesystem::path& path);

// Cross-field validation (grid resolvable, sim bounds at the grid corners,
// allocation invariants, strategy names). parse_config calls this; it is
// exposed for configs edited programmatically.
void validate_config(const ExperimentConfig& config);

} // namespace simalloc
