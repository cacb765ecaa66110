#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "simalloc/allocation.hpp"
#include "simalloc/grid.hpp"
#include "simalloc/synthetic.hpp"

using namespace simalloc;

namespace {

FactorGrid two_by_five() {
    GridSpec spec;
    spec.naloxone_levels = {"A", "B"};
    spec.buprenorphine_levels = {"a", "b", "c", "d", "e"};
    spec.active = {"all"};
    return build_grid(spec);
}

FactorGrid pair_grid() {
    GridSpec spec;
    spec.naloxone_levels = {"A"};
    spec.buprenorphine_levels = {"a", "b"};
    spec.active = {"all"};
    return build_grid(spec);
}

TableGaussianSimulator constant_sim(const FactorGrid& grid, double value) {
    TableGaussianSimulator sim;
    for (const auto& c : grid.active()) sim.set(c.label, value, 0.0);
    return sim;
}

bool reports_equal(const StrategyReport& a, const StrategyReport& b) {
    if (a.total_runs != b.total_runs || a.rows.size() != b.rows.size()) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        if (a.rows[i].label != b.rows[i].label || a.rows[i].runs != b.rows[i].runs ||
            a.rows[i].mean != b.rows[i].mean || a.rows[i].ci_width != b.rows[i].ci_width) {
            return false;
        }
    }
    return true;
}

bool traces_equal(const AllocationTrace& a, const AllocationTrace& b) {
    if (a.sweep_runs != b.sweep_runs || a.status != b.status ||
        a.initial_widths != b.initial_widths || a.records.size() != b.records.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const auto& ra = a.records[i];
        const auto& rb = b.records[i];
        if (ra.iteration != rb.iteration || ra.condition != rb.condition || ra.batch != rb.batch ||
            ra.cumulative_runs != rb.cumulative_runs || ra.widths != rb.widths) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("select_max_ci picks the widest interval, first on ties") {
    const std::vector<double> w1 = {3.1, 4.7, 2.2};
    CHECK(select_max_ci(w1) == 1);

    const std::vector<double> equal = {2.0, 2.0, 2.0};
    CHECK(select_max_ci(equal) == 0);

    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<double> with_undefined = {3.0, inf, 5.0};
    CHECK(select_max_ci(with_undefined) == 1);

    CHECK_THROWS_AS(select_max_ci(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("brute force allocates equally in grid order") {
    const auto grid = two_by_five();
    const auto sim = constant_sim(grid, 42.0);
    const auto report = run_brute_force(sim, grid, 200, 0.95, 1);

    CHECK(report.total_runs == 2000);
    REQUIRE(report.rows.size() == 10);
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        CHECK(report.rows[i].label == grid.active()[i].label);
        CHECK(report.rows[i].runs == 200);
        CHECK(report.rows[i].mean == doctest::Approx(42.0));
        CHECK(report.rows[i].ci_width == doctest::Approx(0.0));
    }
}

TEST_CASE("brute force on a single condition") {
    GridSpec spec;
    spec.naloxone_levels = {"A"};
    spec.buprenorphine_levels = {"a"};
    const auto grid = build_grid(spec);
    const auto sim = constant_sim(grid, 7.0);
    const auto report = run_brute_force(sim, grid, 2, 0.95, 3);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].runs == 2);
    CHECK(report.total_runs == 2);

    CHECK_THROWS_AS(run_brute_force(sim, grid, 1, 0.95, 3), std::invalid_argument);
}

TEST_CASE("equal allocation reflects heteroscedasticity in the widths") {
    const auto grid = pair_grid();
    TableGaussianSimulator sim;
    sim.set("Aa", 0.0, 1.0);   // variance 1
    sim.set("Ab", 0.0, 10.0);  // variance 100
    const auto report = run_brute_force(sim, grid, 2000, 0.95, 17);
    const double ratio = report.rows[1].ci_width / report.rows[0].ci_width;
    CHECK(ratio == doctest::Approx(10.0).epsilon(0.08));
}

TEST_CASE("greedy converges at the sweep when there is no variance") {
    const auto grid = two_by_five();
    const auto sim = constant_sim(grid, 100.0);
    AllocationConfig cfg;
    cfg.initial_runs = 5;
    cfg.batch_size = 10;
    cfg.ci_threshold = 4.0;

    const auto result = run_greedy(sim, grid, cfg, 9);
    CHECK(result.report.status == RunStatus::Converged);
    CHECK(result.report.total_runs == 50);
    CHECK(result.trace.records.empty());
    CHECK(result.trace.sweep_runs == 50);
    for (const auto& row : result.report.rows) CHECK(row.ci_width < cfg.ci_threshold);
}

TEST_CASE("greedy run counts scale with the variance") {
    const auto grid = pair_grid();
    TableGaussianSimulator sim;
    sim.set("Aa", 50.0, 5.0);
    sim.set("Ab", 50.0, 10.0);

    AllocationConfig cfg;
    cfg.initial_runs = 10;
    cfg.batch_size = 10;
    cfg.ci_threshold = 1.0;

    const auto result = run_greedy(sim, grid, cfg, 20240131);
    REQUIRE(result.report.status == RunStatus::Converged);

    // n grows like sigma^2, so the sigma=10 arm needs about 4x the runs.
    const double ratio = static_cast<double>(result.report.rows[1].runs) /
                         static_cast<double>(result.report.rows[0].runs);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.25));

    SUBCASE("every batch went to the then-widest interval") {
        const auto& trace = result.trace;
        const std::vector<double>* prev = &trace.initial_widths;
        for (const auto& rec : trace.records) {
            const auto expected = grid.active()[select_max_ci(*prev)].label;
            CHECK(rec.condition == expected);
            prev = &rec.widths;
        }
    }
    SUBCASE("accounting ties out") {
        const auto& trace = result.trace;
        std::int64_t cumulative = trace.sweep_runs;
        for (const auto& rec : trace.records) {
            cumulative += rec.batch;
            CHECK(rec.cumulative_runs == cumulative);
            CHECK(rec.batch == cfg.batch_size);
        }
        CHECK(result.report.total_runs == cumulative);
        std::int64_t by_rows = 0;
        for (const auto& row : result.report.rows) by_rows += row.runs;
        CHECK(by_rows == result.report.total_runs);
    }
    SUBCASE("converged means every width is under the threshold") {
        for (const auto& row : result.report.rows) CHECK(row.ci_width < cfg.ci_threshold);
    }
}

TEST_CASE("greedy stops at the budget cap") {
    const auto grid = pair_grid();
    TableGaussianSimulator sim;
    sim.set("Aa", 0.0, 50.0);
    sim.set("Ab", 0.0, 50.0);

    AllocationConfig cfg;
    cfg.initial_runs = 10;
    cfg.batch_size = 10;
    cfg.ci_threshold = 0.1;  // unreachable within the cap
    cfg.budget_cap = 100;

    const auto result = run_greedy(sim, grid, cfg, 5);
    CHECK(result.report.status == RunStatus::BudgetExhausted);
    CHECK(result.report.total_runs <= 100);
    CHECK(result.report.total_runs == 100);  // cap is a multiple of the batch
}

TEST_CASE("strategy runs replay bit-identically, independent of threads") {
    const auto grid = two_by_five();
    const LinearGaussianSimulator sim(2400, -15, -7, 0.5, 30.0);
    AllocationConfig cfg;
    cfg.initial_runs = 10;
    cfg.batch_size = 20;
    cfg.ci_threshold = 15.0;

    const auto a = run_greedy(sim, grid, cfg, 77, 1);
    const auto b = run_greedy(sim, grid, cfg, 77, 1);
    const auto c = run_greedy(sim, grid, cfg, 77, 4);
    CHECK(reports_equal(a.report, b.report));
    CHECK(reports_equal(a.report, c.report));
    CHECK(traces_equal(a.trace, b.trace));
    CHECK(traces_equal(a.trace, c.trace));

    const auto d = run_greedy(sim, grid, cfg, 78, 1);
    CHECK_FALSE(reports_equal(a.report, d.report));

    const auto m1 = run_model_greedy(sim, grid, cfg, 77, 1);
    const auto m2 = run_model_greedy(sim, grid, cfg, 77, 4);
    CHECK(reports_equal(m1.report, m2.report));
    CHECK(traces_equal(m1.trace, m2.trace));
}

TEST_CASE("model greedy collapses immediately on a nearly deterministic linear truth") {
    const auto grid = two_by_five();
    const LinearGaussianSimulator sim(2400, -15, -7, 0.0, 1e-9);
    AllocationConfig cfg;
    cfg.initial_runs = 5;
    cfg.batch_size = 10;
    cfg.ci_threshold = 4.0;

    const auto result = run_model_greedy(sim, grid, cfg, 303);
    CHECK(result.report.status == RunStatus::Converged);
    CHECK(result.report.total_runs == 50);
    CHECK(result.trace.records.empty());
    REQUIRE(result.report.model.has_value());
    CHECK(result.report.model->beta[0] == doctest::Approx(2400.0).epsilon(1e-6));
    CHECK(result.report.model->beta[1] == doctest::Approx(-15.0).epsilon(1e-6));
}

TEST_CASE("model greedy reports model predictions, not sample means") {
    const auto grid = two_by_five();
    const LinearGaussianSimulator sim(1000, -10, -5, 0.25, 25.0);
    AllocationConfig cfg;
    cfg.initial_runs = 20;
    cfg.batch_size = 20;
    cfg.ci_threshold = 6.0;

    const auto result = run_model_greedy(sim, grid, cfg, 41);
    REQUIRE(result.report.model.has_value());
    const auto& model = *result.report.model;
    for (std::size_t i = 0; i < result.report.rows.size(); ++i) {
        CHECK(result.report.rows[i].mean ==
              doctest::Approx(model.predict_mean(grid.active()[i])));
    }

    std::int64_t by_rows = 0;
    for (const auto& row : result.report.rows) by_rows += row.runs;
    std::int64_t by_trace = result.trace.sweep_runs;
    for (const auto& rec : result.trace.records) by_trace += rec.batch;
    CHECK(by_rows == result.report.total_runs);
    CHECK(by_trace == result.report.total_runs);
}

TEST_CASE("model greedy beats plain greedy on a model-faithful truth") {
    const auto grid = two_by_five();
    const LinearGaussianSimulator sim(2400, -15, -7, 0.5, 20.0);
    AllocationConfig cfg;
    cfg.initial_runs = 20;
    cfg.batch_size = 20;
    cfg.ci_threshold = 2.5;

    const auto greedy = run_greedy(sim, grid, cfg, 1001);
    const auto model = run_model_greedy(sim, grid, cfg, 1001);
    REQUIRE(greedy.report.status == RunStatus::Converged);
    REQUIRE(model.report.status == RunStatus::Converged);
    CHECK(model.report.total_runs < greedy.report.total_runs);
}

TEST_CASE("dropping the interaction term saves runs on the same setup") {
    const auto grid = two_by_five();
    const LinearGaussianSimulator sim(2400, -15, -7, 0.0, 20.0);
    AllocationConfig with;
    with.initial_runs = 20;
    with.batch_size = 20;
    with.ci_threshold = 2.5;
    AllocationConfig without = with;
    without.with_interaction = false;

    const auto r_with = run_model_greedy(sim, grid, with, 604);
    const auto r_without = run_model_greedy(sim, grid, without, 604);
    REQUIRE(r_with.report.status == RunStatus::Converged);
    REQUIRE(r_without.report.status == RunStatus::Converged);
    CHECK(r_without.report.total_runs <= r_with.report.total_runs);
}

TEST_CASE("model greedy rejects a design without covariate spread") {
    GridSpec spec;  // one Naloxone row only: x2 never varies
    spec.active = {"Aa", "Ab", "Ac"};
    const auto grid = build_grid(spec);
    const LinearGaussianSimulator sim(100, -1, -1, 0, 1.0);
    AllocationConfig cfg;
    cfg.initial_runs = 5;

    std::string msg;
    try {
        run_model_greedy(sim, grid, cfg, 2);
    } catch (const SingularDesignError& e) {
        msg = e.what();
    }
    CHECK(msg.find("Naloxone") != std::string::npos);
}

TEST_CASE("max-error stop rule terminates on a faithful truth") {
    const auto grid = two_by_five();
    const LinearGaussianSimulator sim(500, -5, -3, 0.1, 10.0);
    AllocationConfig cfg;
    cfg.initial_runs = 30;
    cfg.batch_size = 30;
    cfg.ci_threshold = 5.0;  // reused as the error threshold
    cfg.model_stop_rule = ModelStopRule::MaxError;
    cfg.budget_cap = 20000;

    const auto result = run_model_greedy(sim, grid, cfg, 8080);
    REQUIRE(result.report.status == RunStatus::Converged);
    REQUIRE(result.report.model.has_value());
    for (std::size_t i = 0; i < result.report.rows.size(); ++i) {
        // At convergence the surface sits close to every sample mean; the
        // reported means are the model predictions themselves.
        CHECK(result.report.rows[i].mean ==
              doctest::Approx(result.report.model->predict_mean(grid.active()[i])));
    }
}

TEST_CASE("batch-all mode charges every condition per iteration") {
    GridSpec spec;
    spec.naloxone_levels = {"A", "B"};
    spec.buprenorphine_levels = {"a", "b"};
    spec.active = {"all"};
    const auto grid = build_grid(spec);
    TableGaussianSimulator sim;
    for (const auto& c : grid.active()) sim.set(c.label, 10.0, 8.0);

    AllocationConfig cfg;
    cfg.initial_runs = 10;
    cfg.batch_size = 10;
    cfg.ci_threshold = 2.0;
    cfg.batch_all_conditions = true;
    cfg.budget_cap = 5000;

    const auto result = run_model_greedy(sim, grid, cfg, 99);
    CHECK(!result.trace.records.empty());
    for (const auto& rec : result.trace.records) {
        CHECK(rec.condition == "all");
        CHECK(rec.batch == cfg.batch_size * 4);
    }
    for (const auto& row : result.report.rows) {
        CHECK(row.runs == result.report.rows[0].runs);
    }
}

TEST_CASE("allocation config validation") {
    AllocationConfig cfg;
    CHECK_NOTHROW(cfg.validate(10));

    AllocationConfig bad = cfg;
    bad.initial_runs = 1;
    CHECK_THROWS_AS(bad.validate(10), std::invalid_argument);

    bad = cfg;
    bad.batch_size = 0;
    CHECK_THROWS_AS(bad.validate(10), std::invalid_argument);

    bad = cfg;
    bad.ci_threshold = 0.0;
    CHECK_THROWS_AS(bad.validate(10), std::invalid_argument);

    bad = cfg;
    bad.budget_cap = 500;  // below the 10 * 100 sweep
    CHECK_THROWS_AS(bad.validate(10), std::invalid_argument);

    CHECK_THROWS_AS(cfg.validate(0), std::invalid_argument);
}
