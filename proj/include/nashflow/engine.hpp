#pragma once

#include "nashflow/network.hpp"
#include "nashflow/thinflow.hpp"
#include "nashflow/trajectory.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace nashflow {

struct TerminationPolicy {
    MaybeRat horizon;               // stop once the phase clock reaches this
    std::size_t max_phases = 1000;  // hard cap on the number of phases
    // Guard against vanishing step sizes: abort after `stall_limit` successive
    // phases shorter than `stall_alpha`.
    Rat stall_alpha = Rat(1, 1000000000);
    std::size_t stall_limit = 50;
};

enum class Termination {
    SteadyState,      // last phase extends forever
    Horizon,          // ran up to the requested clock
    PhaseCap,         // max_phases exhausted
    StalledProgress,  // step sizes collapsed
};

struct EngineStats {
    std::size_t phases = 0;
    std::size_t thin_flow_configurations = 0;
};

struct EngineResult {
    EquilibriumTrajectory trajectory;
    Termination termination;
    EngineStats stats;
};

// Raised when no phase can be derived, which means a bug or an unsupported
// instance rather than bad user input.
struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The thin flow instance describing the derivatives at clock time theta,
// together with the mapping from instance arcs back to network arcs.
struct PhaseSetup {
    ThinFlowInstance instance;
    std::vector<int> arc_ids;  // instance arc -> network arc
    ArcSets sets;
    std::vector<Rat> label_at;
};

PhaseSetup phase_setup(const EquilibriumTrajectory& so_far, const Rat& theta);

// Longest step for which the given derivatives stay valid: waiting times stay
// nonnegative, inactive arcs stay unattractive, entry throttles of full arcs
// keep their value, and no arc hits its storage bound. nullopt: no limit.
MaybeRat max_feasible_alpha(const EquilibriumTrajectory& so_far, const Rat& theta,
                            const PhaseSetup& setup, const ThinFlowSolution& deriv);

// Runs the phase loop from time zero on a validated network.
EngineResult compute_nash_flow(const ValidatedNetwork& net, const TerminationPolicy& policy = {});

}  // namespace nashflow
