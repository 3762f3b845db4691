#pragma once

#include "nashflow/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nashflow {

// One phase's static problem: the current shortest-paths network with outflow
// capacities, inflow bounds, and the resetting arcs.
struct TfArc {
    int tail = -1;
    int head = -1;
    std::string name;
    Rat cap_out;   // nu- > 0
    Rat bound_in;  // b+ > 0
    bool resetting = false;
};

struct ThinFlowInstance {
    std::vector<std::string> node_names;
    std::vector<TfArc> arcs;
    int source = -1;
    int sink = -1;
    Rat demand;  // r > 0

    int node_count() const { return static_cast<int>(node_names.size()); }
};

// Flow derivative x', label derivative l' per node, and spillback factor c.
struct ThinFlowSolution {
    std::vector<Rat> flow;    // per arc
    std::vector<Rat> label;   // per node
    std::vector<Rat> factor;  // per node, in (0, 1]
};

struct TfViolation {
    std::string condition;  // "flow", "TF1" .. "TF5", "domain"
    std::string subject;    // arc or node name
    std::string detail;
};

// x'_e/(c_v * cap_out) for resetting arcs, otherwise max with the tail label.
Rat rho(const Rat& label_tail, const Rat& flow, const Rat& factor_head, const Rat& cap_out,
        bool resetting);

// Exact check of the flow conditions and TF1-TF5; empty result means valid.
std::vector<TfViolation> verify_thin_flow(const ThinFlowInstance& inst,
                                          const ThinFlowSolution& sol);

struct SolveStats {
    long configurations_checked = 0;  // leaf feasibility systems solved
    long nodes_visited = 0;           // search tree nodes
};

// Solves by enumerating decision configurations (which side of each max/min is
// tight, which arcs carry no flow, which nodes are throttled) and testing each
// with exact linear feasibility over (x', l', mu = c*l'). Configurations with
// no throttled node come first, then increasing numbers of throttled nodes.
// Returns the first configuration whose sample point verifies; nullopt means
// no configuration works, which should never happen on instances arising
// from a feasible state and signals a bug in the caller's instance.
std::optional<ThinFlowSolution> solve_thin_flow(const ThinFlowInstance& inst,
                                                SolveStats* stats = nullptr);

// All distinct verifying solutions found by the same enumeration, up to
// max_count. Used to surface alternative thin flows.
std::vector<ThinFlowSolution> enumerate_thin_flows(const ThinFlowInstance& inst,
                                                   std::size_t max_count);

}  // namespace nashflow
