#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace simalloc {

// One cell of the factor grid. Coded covariates follow the regression
// convention: x1 = Buprenorphine level index, x2 = Naloxone level index.
struct TreatmentCondition {
    int naloxone_index = 0;       // x2
    int buprenorphine_index = 0;  // x1
    std::string label;            // naloxone label + buprenorphine label, e.g. "Aa"

    double x1() const noexcept { return static_cast<double>(buprenorphine_index); }
    double x2() const noexcept { return static_cast<double>(naloxone_index); }
};

// Grid description as it appears in a configuration document.
// `active` selects the conditions under study by label. An empty list picks
// the default subset (the first two Naloxone rows across all Buprenorphine
// levels); the single entry "all" selects the full cross product.
struct GridSpec {
    std::vector<std::string> naloxone_levels = {"A", "B", "C", "D", "E"};
    std::vector<std::string> buprenorphine_levels = {"a", "b", "c", "d", "e"};
    std::vector<std::string> active;
};

class FactorGrid {
public:
    const std::vector<std::string>& naloxone_levels() const noexcept { return naloxone_; }
    const std::vector<std::string>& buprenorphine_levels() const noexcept { return buprenorphine_; }

    // Active conditions in grid order (Naloxone-major, Buprenorphine-minor).
    const std::vector<TreatmentCondition>& active() const noexcept { return active_; }

    std::size_t cell_count() const noexcept { return naloxone_.size() * buprenorphine_.size(); }
    int max_x1() const noexcept { return static_cast<int>(buprenorphine_.size()) - 1; }
    int max_x2() const noexcept { return static_cast<int>(naloxone_.size()) - 1; }

    TreatmentCondition condition(int naloxone_index, int buprenorphine_index) const;

    // Row-major cell index over the full grid; stable under changes to the
    // active subset, so it doubles as the condition's RNG stream id.
    std::size_t ordinal(const TreatmentCondition& cond) const;

    friend FactorGrid build_grid(const GridSpec& spec);

private:
    std::vector<std::string> naloxone_;
    std::vector<std::string> buprenorphine_;
    std::vector<TreatmentCondition> active_;
};

// Validates the spec and resolves the active subset.
// Throws std::invalid_argument on duplicate level labels, unknown or
// duplicate active labels, or empty level lists.
FactorGrid build_grid(const GridSpec& spec);

} // namespace simalloc
