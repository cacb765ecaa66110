#include "simalloc/grid.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace simalloc {

namespace {

void check_levels(const std::vector<std::string>& levels, const char* factor) {
    if (levels.empty()) {
        throw std::invalid_argument(std::string(factor) + " level list is empty");
    }
    std::set<std::string> seen;
    for (const auto& l : levels) {
        if (l.empty()) {
            throw std::invalid_argument(std::string(factor) + " has an empty level label");
        }
        if (!seen.insert(l).second) {
            throw std::invalid_argument(std::string(factor) + " has duplicate level label '" + l + "'");
        }
    }
}

int index_of(const std::vector<std::string>& levels, const std::string& label) {
    const auto it = std::find(levels.begin(), levels.end(), label);
    return it == levels.end() ? -1 : static_cast<int>(it - levels.begin());
}

// A condition label is the concatenation of a Naloxone label and a
// Buprenorphine label. With multi-character labels the split may not be
// unique; any ambiguity is rejected rather than guessed at.
std::pair<int, int> parse_condition_label(const GridSpec& spec, const std::string& label) {
    std::pair<int, int> found{-1, -1};
    int matches = 0;
    for (std::size_t i = 0; i < spec.naloxone_levels.size(); ++i) {
        const auto& nal = spec.naloxone_levels[i];
        if (label.size() <= nal.size() || label.compare(0, nal.size(), nal) != 0) continue;
        const int bup = index_of(spec.buprenorphine_levels, label.substr(nal.size()));
        if (bup < 0) continue;
        found = {static_cast<int>(i), bup};
        ++matches;
    }
    if (matches == 0) {
        throw std::invalid_argument("active condition '" + label + "' does not name a known level pair");
    }
    if (matches > 1) {
        throw std::invalid_argument("active condition '" + label + "' is ambiguous");
    }
    return found;
}

} // namespace

TreatmentCondition FactorGrid::condition(int naloxone_index, int buprenorphine_index) const {
    if (naloxone_index < 0 || naloxone_index > max_x2() ||
        buprenorphine_index < 0 || buprenorphine_index > max_x1()) {
        throw std::out_of_range("condition indices outside grid bounds");
    }
    return {naloxone_index, buprenorphine_index,
            naloxone_[naloxone_index] + buprenorphine_[buprenorphine_index]};
}

std::size_t FactorGrid::ordinal(const TreatmentCondition& cond) const {
    if (cond.naloxone_index < 0 || cond.naloxone_index > max_x2() ||
        cond.buprenorphine_index < 0 || cond.buprenorphine_index > max_x1()) {
        throw std::out_of_range("condition indices outside grid bounds");
    }
    return static_cast<std::size_t>(cond.naloxone_index) * buprenorphine_.size() +
           static_cast<std::size_t>(cond.buprenorphine_index);
}

FactorGrid build_grid(const GridSpec& spec) {
    check_levels(spec.naloxone_levels, "naloxone");
    check_levels(spec.buprenorphine_levels, "buprenorphine");

    FactorGrid grid;
    grid.naloxone_ = spec.naloxone_levels;
    grid.buprenorphine_ = spec.buprenorphine_levels;

    const std::size_t n_bup = spec.buprenorphine_levels.size();
    std::vector<bool> selected(spec.naloxone_levels.size() * n_bup, false);

    if (spec.active.empty()) {
        // Default study subset: first two Naloxone rows, all Buprenorphine levels.
        const std::size_t rows = std::min<std::size_t>(2, spec.naloxone_levels.size());
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < n_bup; ++j) selected[i * n_bup + j] = true;
    } else if (spec.active.size() == 1 && spec.active.front() == "all") {
        std::fill(selected.begin(), selected.end(), true);
    } else {
        for (const auto& label : spec.active) {
            const auto [nal, bup] = parse_condition_label(spec, label);
            const std::size_t cell = static_cast<std::size_t>(nal) * n_bup + static_cast<std::size_t>(bup);
            if (selected[cell]) {
                throw std::invalid_argument("active condition '" + label + "' listed twice");
            }
            selected[cell] = true;
        }
    }

    // Normalize to grid order regardless of how the subset was written.
    for (std::size_t i = 0; i < spec.naloxone_levels.size(); ++i) {
        for (std::size_t j = 0; j < n_bup; ++j) {
            if (selected[i * n_bup + j]) {
                grid.active_.push_back(grid.condition(static_cast<int>(i), static_cast<int>(j)));
            }
        }
    }
    return grid;
}

} // namespace simalloc
