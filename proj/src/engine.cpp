#include "nashflow/engine.hpp"

#include <algorithm>

namespace nashflow {

namespace {

// Outflow rate of arc e at ground times from this phase on: the committed
// rates up to the head label frontier, then the rate the new derivatives
// produce. Evaluation beyond the frontier is only meaningful while the head
// label actually advances.
struct FutureOutflow {
    const PiecewiseConstant& committed;
    Rat frontier;
    bool extends;  // head label moves, so the new rate applies past the frontier
    Rat new_rate;

    Rat operator()(const Rat& t) const {
        if (extends && t >= frontier) return new_rate;
        return committed(t);
    }
    // Next time > t at which the value changes, or nullopt.
    MaybeRat next_change(const Rat& t) const {
        MaybeRat c = committed.next_change(t);
        if (!extends) return c;
        if (t >= frontier) return std::nullopt;
        if (c && *c < frontier) return c;
        if (committed(t) != new_rate) return frontier;
        return std::nullopt;
    }
};

}  // namespace

PhaseSetup phase_setup(const EquilibriumTrajectory& so_far, const Rat& theta) {
    const Network& net = so_far.network();
    PhaseSetup setup;
    setup.sets = so_far.arc_sets(theta);
    setup.label_at.resize(net.node_count());
    for (int v = 0; v < net.node_count(); ++v) setup.label_at[v] = so_far.label(v)(theta);

    setup.instance.node_names = net.node_names;
    setup.instance.source = net.source;
    setup.instance.sink = net.sink;
    setup.instance.demand = net.rate;
    for (std::size_t e = 0; e < net.arcs.size(); ++e) {
        if (!setup.sets.active[e]) continue;
        const ArcParams& a = net.arcs[e];
        TfArc arc;
        arc.tail = a.tail;
        arc.head = a.head;
        arc.name = a.name;
        arc.cap_out = a.cap_out;
        arc.bound_in = so_far.inflow_bound(static_cast<int>(e), setup.label_at[a.tail]);
        arc.resetting = setup.sets.resetting[e] != 0;
        setup.instance.arcs.push_back(std::move(arc));
        setup.arc_ids.push_back(static_cast<int>(e));
    }
    return setup;
}

MaybeRat max_feasible_alpha(const EquilibriumTrajectory& so_far, const Rat& theta,
                            const PhaseSetup& setup, const ThinFlowSolution& deriv) {
    const Network& net = so_far.network();
    const int m = static_cast<int>(net.arcs.size());

    std::vector<Rat> x(m, Rat(0));
    for (std::size_t i = 0; i < setup.arc_ids.size(); ++i) x[setup.arc_ids[i]] = deriv.flow[i];

    MaybeRat alpha;
    auto tighten = [&](const Rat& bound) {
        if (!alpha || bound < *alpha) alpha = bound;
    };

    for (int e = 0; e < m; ++e) {
        const ArcParams& a = net.arcs[e];
        const Rat& lu = setup.label_at[a.tail];
        const Rat& lv = setup.label_at[a.head];
        const Rat& du = deriv.label[a.tail];
        const Rat& dv = deriv.label[a.head];

        if (setup.sets.resetting[e]) {
            // Waiting on the arc must not turn negative.
            if (du > dv) tighten((lv - lu - a.transit) / (du - dv));
        } else if (!setup.sets.active[e]) {
            // An idle arc must not become a shortcut unnoticed.
            if (dv > du) tighten((lu + a.transit - lv) / (dv - du));
        }

        if (du <= 0) continue;  // the entry point is frozen, nothing ahead is reached
        Rat entry_rate = x[e] / du;
        FutureOutflow out{so_far.flows(e).rate_out, lv, dv > 0,
                          dv > 0 ? x[e] / dv : Rat(0)};

        if (setup.sets.full[e]) {
            // The entry throttle min(cap_in, outflow) must keep its value. A
            // draining arc (inflow below the current outflow) stops being full
            // and its throttle simply relaxes, which stays consistent.
            Rat raw = out(lu);
            if (entry_rate < raw) continue;
            Rat throttle = std::min(a.cap_in, raw);
            MaybeRat t = lu;
            while ((t = out.next_change(*t))) {
                if (std::min(a.cap_in, out(*t)) != throttle) {
                    tighten((*t - lu) / du);
                    break;
                }
            }
        } else if (a.storage) {
            // Load must not cross the storage bound mid-phase.
            Rat d = so_far.load(e)(lu);
            Rat t = lu;
            while (true) {
                MaybeRat next = out.next_change(t);
                Rat slope = entry_rate - out(t);
                if (slope > 0) {
                    Rat hit = t + (*a.storage - d) / slope;
                    if (!next || hit <= *next) {
                        tighten((hit - lu) / du);
                        break;
                    }
                }
                if (!next) break;
                d += slope * (*next - t);
                t = *next;
            }
        }
    }
    return alpha;
}

EngineResult compute_nash_flow(const ValidatedNetwork& vnet, const TerminationPolicy& policy) {
    const Network& net = vnet.get();
    const int m = static_cast<int>(net.arcs.size());
    std::vector<PhaseProfile> phases;
    EngineStats stats;
    Rat theta(0);
    std::size_t stall_count = 0;

    while (true) {
        EquilibriumTrajectory so_far(net, phases);
        PhaseSetup setup = phase_setup(so_far, theta);
        SolveStats tf_stats;
        auto deriv = solve_thin_flow(setup.instance, &tf_stats);
        stats.thin_flow_configurations += tf_stats.configurations_checked;
        if (!deriv)
            throw EngineError("no thin flow at time " + to_string(theta));

        PhaseProfile phase;
        phase.start = theta;
        phase.flow_rate.assign(m, Rat(0));
        for (std::size_t i = 0; i < setup.arc_ids.size(); ++i)
            phase.flow_rate[setup.arc_ids[i]] = deriv->flow[i];
        phase.label_rate = deriv->label;
        phase.factor = deriv->factor;
        phase.active = setup.sets.active;
        phase.resetting = setup.sets.resetting;
        phase.full = setup.sets.full;

        MaybeRat alpha = max_feasible_alpha(so_far, theta, setup, *deriv);
        if (!alpha) {
            phase.duration = std::nullopt;
            phases.push_back(std::move(phase));
            stats.phases = phases.size();
            return {EquilibriumTrajectory(net, std::move(phases)), Termination::SteadyState,
                    stats};
        }
        if (*alpha <= 0)
            throw EngineError("nonpositive phase length at time " + to_string(theta));

        Termination stop = Termination::SteadyState;
        bool stopping = false;
        if (policy.horizon && theta + *alpha >= *policy.horizon) {
            alpha = *policy.horizon - theta;
            stop = Termination::Horizon;
            stopping = true;
        }
        if (*alpha < policy.stall_alpha) {
            if (++stall_count >= policy.stall_limit) {
                stop = Termination::StalledProgress;
                stopping = true;
            }
        } else {
            stall_count = 0;
        }
        phase.duration = alpha;
        phases.push_back(std::move(phase));
        theta += *alpha;
        if (!stopping && phases.size() >= policy.max_phases) {
            stop = Termination::PhaseCap;
            stopping = true;
        }
        if (stopping) {
            stats.phases = phases.size();
            return {EquilibriumTrajectory(net, std::move(phases)), stop, stats};
        }
    }
}

}  // namespace nashflow
