#pragma once

#include "nashflow/network.hpp"
#include "nashflow/pwl.hpp"

#include <vector>

namespace nashflow {

// One phase of an equilibrium trajectory. All node labels move linearly and
// all arc flow derivatives are constant throughout a phase.
struct PhaseProfile {
    Rat start;               // phase begins at this node time
    MaybeRat duration;       // nullopt: the phase extends forever
    std::vector<Rat> flow_rate;   // per arc, derivative of cumulative flow
    std::vector<Rat> label_rate;  // per node
    std::vector<Rat> factor;      // per node, spillback factor in (0,1]
    std::vector<char> active;     // per arc: currently usable at equal cost
    std::vector<char> resetting;  // per arc: strictly waiting (queue or spill)
    std::vector<char> full;       // per arc: storage exhausted at phase start
};

// Inflow and outflow of one arc in ground time, both as rates and cumulatives.
struct ArcFlows {
    PiecewiseConstant rate_in = PiecewiseConstant::constant(Rat(0));
    PiecewiseConstant rate_out = PiecewiseConstant::constant(Rat(0));
    PiecewiseLinear cum_in = PiecewiseLinear::constant(Rat(0));
    PiecewiseLinear cum_out = PiecewiseLinear::constant(Rat(0));
};

// Membership of every arc in the three evolving arc sets.
struct ArcSets {
    std::vector<char> active;
    std::vector<char> resetting;
    std::vector<char> full;
};

// A (partial or complete) equilibrium trajectory: earliest-arrival labels per
// node and the flow each arc carries, reconstructed from the phase list.
class EquilibriumTrajectory {
public:
    EquilibriumTrajectory(Network net, std::vector<PhaseProfile> phases);

    const Network& network() const { return net_; }
    const std::vector<PhaseProfile>& phases() const { return phases_; }

    // Node time up to which the phases reach; nullopt once a final unbounded
    // phase is present.
    MaybeRat horizon() const;

    const PiecewiseLinear& label(int v) const { return labels_[v]; }
    const ArcFlows& flows(int e) const { return flows_[e]; }

    // Flow currently between entry and exit of the arc.
    PiecewiseLinear load(int e) const;
    // Flow waiting at the arc exit.
    PiecewiseLinear queue(int e) const;

    // Rate cap at the arc entry: the entry capacity, throttled down to the
    // current outflow rate while the arc is full.
    Rat inflow_bound(int e, const Rat& t) const;
    // Rate the arc presses onto its head: exit capacity while a queue stands,
    // otherwise the arriving rate capped by the exit capacity.
    Rat push_rate(int e, const Rat& t) const;

    // Absolute time at which flow entering the arc at time t leaves it, or
    // nullopt if it never does.
    MaybeRat exit_time(int e, const Rat& t) const;
    // Time spent queueing by flow reaching the arc exit at time t.
    MaybeRat waiting_time(int e, const Rat& t) const;

    // Arc sets at node time theta, read off the labels and loads: active when
    // the head label covers transit, resetting when it strictly exceeds it,
    // full when the load has reached the storage bound at the entry time.
    ArcSets arc_sets(const Rat& theta) const;

private:
    Network net_;
    std::vector<PhaseProfile> phases_;
    std::vector<PiecewiseLinear> labels_;
    std::vector<ArcFlows> flows_;
};

// Labels before any flow moves: plain travel-time distances from the source.
// Every node is assumed reachable.
std::vector<Rat> earliest_arrival(const Network& net);

// Largest factor c in (0,1] with sum_e min(press[e], c * cap[e]) <= supply,
// i.e. the fair split of a limited onward supply over competing arcs. Returns
// 1 when the supply suffices for every arc.
Rat fair_allocation_factor(const std::vector<Rat>& press, const std::vector<Rat>& cap,
                           const Rat& supply);

}  // namespace nashflow
