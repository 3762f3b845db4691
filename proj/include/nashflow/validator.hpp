#pragma once

#include "nashflow/trajectory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nashflow {

struct CheckItem {
    std::string name;
    bool passed = true;
    std::vector<std::string> witnesses;  // failure descriptions, first few only
};

struct ValidationReport {
    std::vector<CheckItem> checks;
    bool ok() const;
    const CheckItem* find(const std::string& name) const;
};

// Every check is exact: conditions are piecewise linear or constant in time,
// so evaluating on a grid refining all breakpoints decides them. The seed only
// varies the extra spot-check points sprinkled between breakpoints; it is
// taken from the NASHFLOW_SEED environment variable when not given.
ValidationReport validate_trajectory(const EquilibriumTrajectory& traj,
                                     std::optional<unsigned long long> seed = std::nullopt);

// Cycle of simultaneously exhausted arcs, each feeding the next: the gridlock
// pattern the model must never exhibit. full[e] marks exhausted arcs.
std::optional<std::vector<int>> blocked_cycle(const Network& net, const std::vector<char>& full);

// Positive lower bound on the length of every phase, from the capacities
// alone: with nu_min the smallest capacity (capped at 1) and S the total entry
// capacity (at least 1), the bound is (nu_min / S)^|E| * nu_min.
Rat phase_length_bound(const Network& net);

}  // namespace nashflow
