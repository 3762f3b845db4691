#pragma once

#include "nashflow/rational.hpp"

#include <string>
#include <variant>
#include <vector>

namespace nashflow {

// Static arc data. Node storage is by index into Network::node_names.
struct ArcParams {
    int tail = -1;
    int head = -1;
    std::string name;
    Rat transit;        // tau >= 0
    MaybeRat storage;   // sigma > nu_in * tau, nullopt = infinite
    Rat cap_in;         // nu+ > 0
    Rat cap_out;        // nu- > 0
    bool cap_in_auto = false;  // nu+ derived as sum of incoming nu- at tail, plus 1
};

struct Network {
    std::vector<std::string> node_names;
    std::vector<ArcParams> arcs;
    int source = -1;
    int sink = -1;
    Rat rate;  // network inflow r > 0

    int node_count() const { return static_cast<int>(node_names.size()); }
    std::vector<int> out_arcs(int v) const;
    std::vector<int> in_arcs(int v) const;
};

enum class ViolationCode {
    ZeroTransitCycle,
    UnreachableNode,
    StorageTooSmall,
    SourceArcViolation,
    BadParameter,
};

struct Violation {
    ViolationCode code;
    std::string subject;  // arc or node name
    std::string message;
};

// Network whose invariants have been checked. Immutable; safe to share.
class ValidatedNetwork {
public:
    const Network& get() const { return net_; }
    const ArcParams& arc(int i) const { return net_.arcs[i]; }

private:
    friend std::variant<ValidatedNetwork, std::vector<Violation>> validate_network(const Network&);
    explicit ValidatedNetwork(Network net) : net_(std::move(net)) {}
    Network net_;
};

// Checks every structural assumption: positive capacities, sigma > nu_in*tau,
// reachability from the source, no zero-transit cycle, and the source-arc
// requirements (sigma infinite, nu_in > r, no arcs into the source). Resolves
// cap_in_auto before checking.
std::variant<ValidatedNetwork, std::vector<Violation>> validate_network(const Network& net);

// Prepends a super source s* with a single arc to the old source carrying
// tau = 0, sigma = inf, cap_out = r, cap_in = r + 1. Idempotent on networks
// already satisfying the source-arc assumptions. r must be positive.
Network add_super_source(const Network& net);

struct CycleFound {
    std::vector<int> arcs;  // witness cycle
};

// Linear order of all nodes with every arc in `arc_ids` pointing forward,
// or a witness cycle.
std::variant<std::vector<int>, CycleFound> topological_order(int n_nodes, const Network& net,
                                                             const std::vector<int>& arc_ids);

}  // namespace nashflow
