#include "simalloc/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace simalloc {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& scope,
                  std::initializer_list<std::string_view> known) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown key: " + (scope.empty() ? key : scope + "." + key));
        }
    }
}

template <typename T>
void read(const json& obj, const std::string& scope, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad value type for key: " + (scope.empty() ? key : scope + "." + key));
    }
}

void parse_grid(const json& obj, GridSpec& grid) {
    require_keys(obj, "grid", {"naloxone_levels", "buprenorphine_levels", "active"});
    read(obj, "grid", "naloxone_levels", grid.naloxone_levels);
    read(obj, "grid", "buprenorphine_levels", grid.buprenorphine_levels);
    if (obj.contains("active")) {
        // "active" accepts a label list or the shorthand string "all".
        if (obj.at("active").is_string()) {
            grid.active = {obj.at("active").get<std::string>()};
        } else {
            read(obj, "grid", "active", grid.active);
        }
    }
}

void parse_sim(const json& obj, SimParams& sim) {
    require_keys(obj, "sim",
                 {"population", "horizon_days", "p_onset", "p_treat_base", "p_treat_gain",
                  "p_relapse", "p_remit", "p_overdose", "p_death_base", "p_death_drop",
                  "initial_oud_fraction"});
    read(obj, "sim", "population", sim.population);
    read(obj, "sim", "horizon_days", sim.horizon_days);
    read(obj, "sim", "p_onset", sim.p_onset);
    read(obj, "sim", "p_treat_base", sim.p_treat_base);
    read(obj, "sim", "p_treat_gain", sim.p_treat_gain);
    read(obj, "sim", "p_relapse", sim.p_relapse);
    read(obj, "sim", "p_remit", sim.p_remit);
    read(obj, "sim", "p_overdose", sim.p_overdose);
    read(obj, "sim", "p_death_base", sim.p_death_base);
    read(obj, "sim", "p_death_drop", sim.p_death_drop);
    read(obj, "sim", "initial_oud_fraction", sim.initial_oud_fraction);
}

void parse_allocation(const json& obj, const std::string& scope, AllocationConfig& alloc) {
    require_keys(obj, scope,
                 {"initial_runs", "batch_size", "ci_threshold", "confidence", "budget_cap",
                  "model_stop_rule", "batch_all_conditions"});
    read(obj, scope, "initial_runs", alloc.initial_runs);
    read(obj, scope, "batch_size", alloc.batch_size);
    read(obj, scope, "ci_threshold", alloc.ci_threshold);
    read(obj, scope, "confidence", alloc.confidence);
    if (obj.contains("budget_cap") && !obj.at("budget_cap").is_null()) {
        std::int64_t cap = 0;
        read(obj, scope, "budget_cap", cap);
        alloc.budget_cap = cap;
    }
    if (obj.contains("model_stop_rule")) {
        std::string rule;
        read(obj, scope, "model_stop_rule", rule);
        if (rule == "ci") {
            alloc.model_stop_rule = ModelStopRule::CiWidth;
        } else if (rule == "max_error") {
            alloc.model_stop_rule = ModelStopRule::MaxError;
        } else {
            throw ConfigError("key " + scope + ".model_stop_rule must be \"ci\" or \"max_error\"");
        }
    }
    read(obj, scope, "batch_all_conditions", alloc.batch_all_conditions);
}

} // namespace

bool is_known_strategy(std::string_view name) {
    return std::find(kStrategyNames.begin(), kStrategyNames.end(), name) != kStrategyNames.end();
}

AllocationConfig ExperimentConfig::allocation_for(std::string_view strategy) const {
    const auto it = overrides.find(std::string(strategy));
    AllocationConfig cfg = it != overrides.end() ? it->second : allocation;
    cfg.with_interaction = strategy != kModelGreedyNoInteraction;
    return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text, /*cb=*/nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");

    require_keys(doc, "",
                 {"grid", "sim", "allocation", "overrides", "brute_force_runs", "strategies",
                  "master_seed", "out_dir", "threads", "parallel_strategies"});

    ExperimentConfig cfg;
    if (doc.contains("grid")) parse_grid(doc.at("grid"), cfg.grid);
    if (doc.contains("sim")) parse_sim(doc.at("sim"), cfg.sim);
    if (doc.contains("allocation")) parse_allocation(doc.at("allocation"), "allocation", cfg.allocation);
    if (doc.contains("overrides")) {
        for (const auto& [name, block] : doc.at("overrides").items()) {
            if (!is_known_strategy(name)) {
                throw ConfigError("unknown key: overrides." + name);
            }
            AllocationConfig merged = cfg.allocation;
            parse_allocation(block, "overrides." + name, merged);
            cfg.overrides.emplace(name, merged);
        }
    }
    read(doc, "", "brute_force_runs", cfg.brute_force_runs);
    read(doc, "", "strategies", cfg.strategies);
    read(doc, "", "master_seed", cfg.master_seed);
    read(doc, "", "out_dir", cfg.out_dir);
    read(doc, "", "threads", cfg.threads);
    read(doc, "", "parallel_strategies", cfg.parallel_strategies);

    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate_config(const ExperimentConfig& config) {
    FactorGrid grid;
    try {
        grid = build_grid(config.grid);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
    try {
        config.sim.validate(grid.max_x1(), grid.max_x2());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("sim: ") + e.what());
    }

    if (config.strategies.empty() && !config.overrides.empty()) {
        throw ConfigError("overrides present but strategy list is empty");
    }
    std::set<std::string> seen;
    for (const auto& name : config.strategies) {
        if (!is_known_strategy(name)) {
            throw ConfigError("strategies: unknown strategy '" + name + "'");
        }
        if (!seen.insert(name).second) {
            throw ConfigError("strategies: '" + name + "' listed twice");
        }
    }

    const std::size_t n_conditions = grid.active().size();
    try {
        config.allocation.validate(n_conditions);
        for (const auto& [name, block] : config.overrides) block.validate(n_conditions);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("allocation: ") + e.what());
    }
    if (config.brute_force_runs < 2) throw ConfigError("brute_force_runs must be >= 2");
    if (config.threads < 1) throw ConfigError("threads must be >= 1");
    if (config.out_dir.empty()) throw ConfigError("out_dir must not be empty");
}

} // namespace simalloc
