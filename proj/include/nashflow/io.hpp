#pragma once

#include "nashflow/engine.hpp"
#include "nashflow/thinflow.hpp"
#include "nashflow/trajectory.hpp"
#include "nashflow/validator.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace nashflow {

using Json = nlohmann::ordered_json;

// Malformed input (syntax or schema). Carries a human-readable reason.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numbers are exchanged as exact strings: "p", "p/q", and "inf" or "auto"
// where a field allows them. Serialization is canonical, so parsing a
// serialized document and serializing it again reproduces it verbatim.

Network network_from_json(const Json& j);
Json network_to_json(const Network& net);

ThinFlowInstance thin_flow_from_json(const Json& j);
// Includes a verification section re-checking the solution on the instance.
Json thin_flow_solution_to_json(const ThinFlowInstance& inst, const ThinFlowSolution& sol);

struct TrajectoryDocument {
    Network net;
    std::vector<PhaseProfile> phases;
    std::string termination;  // empty when not recorded
};

// The phases are authoritative on import; the derived per-arc function
// tables (rates, cumulatives, queue, load) are emitted for consumers and
// regenerated on export, so round-trips stay byte-identical.
TrajectoryDocument trajectory_from_json(const Json& j);
Json trajectory_to_json(const Network& net, const std::vector<PhaseProfile>& phases,
                        const std::string& termination);

Json report_to_json(const ValidationReport& report);

const char* termination_name(Termination t);

enum class PlotKind {
    Labels,  // arrival time per node
    Queues,  // waiting flow per arc
    Loads,   // flow between entry and exit per arc
};

// Curves over time as a standalone SVG document.
std::string trajectory_svg(const EquilibriumTrajectory& traj, PlotKind kind = PlotKind::Labels);

// Canonical on-disk form: two-space indentation and a trailing newline.
std::string dump_json(const Json& j);

}  // namespace nashflow
