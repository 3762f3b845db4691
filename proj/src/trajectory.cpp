#include "nashflow/trajectory.hpp"

#include <algorithm>
#include <stdexcept>

namespace nashflow {

std::vector<Rat> earliest_arrival(const Network& net) {
    const int n = net.node_count();
    std::vector<MaybeRat> dist(n);
    std::vector<bool> done(n, false);
    dist[net.source] = Rat(0);
    for (int round = 0; round < n; ++round) {
        int best = -1;
        for (int v = 0; v < n; ++v)
            if (!done[v] && dist[v] && (best < 0 || *dist[v] < *dist[best])) best = v;
        if (best < 0) break;
        done[best] = true;
        for (std::size_t e = 0; e < net.arcs.size(); ++e) {
            const ArcParams& a = net.arcs[e];
            if (a.tail != best) continue;
            Rat cand = *dist[best] + a.transit;
            if (!dist[a.head] || cand < *dist[a.head]) dist[a.head] = cand;
        }
    }
    std::vector<Rat> out(n);
    for (int v = 0; v < n; ++v) {
        if (!dist[v]) throw std::invalid_argument("earliest_arrival: unreachable node");
        out[v] = *dist[v];
    }
    return out;
}

Rat fair_allocation_factor(const std::vector<Rat>& press, const std::vector<Rat>& cap,
                           const Rat& supply) {
    if (press.size() != cap.size())
        throw std::invalid_argument("fair_allocation_factor: size mismatch");
    Rat full_demand(0);
    for (std::size_t i = 0; i < press.size(); ++i) {
        if (cap[i] <= 0) throw std::invalid_argument("fair_allocation_factor: capacity <= 0");
        if (press[i] < 0) throw std::invalid_argument("fair_allocation_factor: press < 0");
        full_demand += std::min(press[i], cap[i]);
    }
    if (full_demand <= supply) return Rat(1);
    if (supply <= 0) throw std::invalid_argument("fair_allocation_factor: no onward supply");

    // Below c = press/cap an arc contributes c * cap, above it press. Walk the
    // thresholds in increasing order until the supply is exactly consumed.
    std::vector<std::size_t> order(press.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return press[a] * cap[b] < press[b] * cap[a];
    });
    Rat fixed(0);       // sum of press over arcs already saturated
    Rat scaling(0);     // sum of cap over arcs still scaling with c
    for (std::size_t i : order) scaling += cap[i];
    for (std::size_t i : order) {
        Rat threshold = press[i] / cap[i];
        if (fixed + scaling * threshold >= supply) break;
        fixed += press[i];
        scaling -= cap[i];
    }
    // fixed + scaling * c == supply on the current linear piece.
    return (supply - fixed) / scaling;
}

EquilibriumTrajectory::EquilibriumTrajectory(Network net, std::vector<PhaseProfile> phases)
    : net_(std::move(net)), phases_(std::move(phases)) {
    const int n = net_.node_count();
    const int m = static_cast<int>(net_.arcs.size());
    std::vector<Rat> label_at = earliest_arrival(net_);

    for (std::size_t p = 0; p < phases_.size(); ++p) {
        const PhaseProfile& ph = phases_[p];
        if (static_cast<int>(ph.flow_rate.size()) != m ||
            static_cast<int>(ph.label_rate.size()) != n)
            throw std::invalid_argument("trajectory: phase dimensions do not match network");
        if (!ph.duration && p + 1 < phases_.size())
            throw std::invalid_argument("trajectory: unbounded phase must be last");
        if (ph.duration && *ph.duration <= 0)
            throw std::invalid_argument("trajectory: phase duration must be positive");
    }
    if (!phases_.empty() && phases_.front().start != 0)
        throw std::invalid_argument("trajectory: phases must start at time zero");

    // Node labels: one linear piece per phase, continuing the last slope.
    std::vector<std::vector<Rat>> times(n), values(n);
    std::vector<Rat> cur = label_at;
    for (const PhaseProfile& ph : phases_) {
        for (int v = 0; v < n; ++v) {
            times[v].push_back(ph.start);
            values[v].push_back(cur[v]);
        }
        if (!ph.duration) break;
        for (int v = 0; v < n; ++v) cur[v] += ph.label_rate[v] * *ph.duration;
    }
    labels_.reserve(n);
    for (int v = 0; v < n; ++v) {
        Rat final_slope = phases_.empty() ? Rat(0) : phases_.back().label_rate[v];
        if (times[v].empty()) {
            times[v].push_back(Rat(0));
            values[v].push_back(label_at[v]);
        }
        labels_.emplace_back(std::move(times[v]), std::move(values[v]), final_slope);
    }

    // Arc flows: each phase contributes a constant rate on the ground-time
    // window its tail (respectively head) label sweeps over.
    flows_.assign(m, ArcFlows{});
    for (const PhaseProfile& ph : phases_) {
        for (int e = 0; e < m; ++e) {
            const ArcParams& a = net_.arcs[e];
            const Rat& lu = ph.label_rate[a.tail];
            const Rat& lv = ph.label_rate[a.head];
            if (lu > 0)
                flows_[e].rate_in.set_from(labels_[a.tail](ph.start), ph.flow_rate[e] / lu);
            if (lv > 0)
                flows_[e].rate_out.set_from(labels_[a.head](ph.start), ph.flow_rate[e] / lv);
        }
    }
    for (int e = 0; e < m; ++e) {
        flows_[e].cum_in = flows_[e].rate_in.integral();
        flows_[e].cum_out = flows_[e].rate_out.integral();
    }
}

MaybeRat EquilibriumTrajectory::horizon() const {
    if (phases_.empty()) return Rat(0);
    if (!phases_.back().duration) return std::nullopt;
    return phases_.back().start + *phases_.back().duration;
}

PiecewiseLinear EquilibriumTrajectory::load(int e) const {
    return flows_[e].cum_in - flows_[e].cum_out;
}

PiecewiseLinear EquilibriumTrajectory::queue(int e) const {
    return flows_[e].cum_in.shift_arg(net_.arcs[e].transit) - flows_[e].cum_out;
}

Rat EquilibriumTrajectory::inflow_bound(int e, const Rat& t) const {
    const ArcParams& a = net_.arcs[e];
    if (a.storage && load(e)(t) == *a.storage)
        return std::min(a.cap_in, flows_[e].rate_out(t));
    return a.cap_in;
}

Rat EquilibriumTrajectory::push_rate(int e, const Rat& t) const {
    const ArcParams& a = net_.arcs[e];
    if (queue(e)(t) > 0) return a.cap_out;
    return std::min(flows_[e].rate_in(t - a.transit), a.cap_out);
}

MaybeRat EquilibriumTrajectory::exit_time(int e, const Rat& t) const {
    return first_crossing(flows_[e].cum_out, flows_[e].cum_in(t), t + net_.arcs[e].transit);
}

MaybeRat EquilibriumTrajectory::waiting_time(int e, const Rat& t) const {
    MaybeRat leave =
        first_crossing(flows_[e].cum_out, flows_[e].cum_in(t - net_.arcs[e].transit), t);
    if (!leave) return std::nullopt;
    return *leave - t;
}

ArcSets EquilibriumTrajectory::arc_sets(const Rat& theta) const {
    const int m = static_cast<int>(net_.arcs.size());
    ArcSets sets{std::vector<char>(m, 0), std::vector<char>(m, 0), std::vector<char>(m, 0)};
    for (int e = 0; e < m; ++e) {
        const ArcParams& a = net_.arcs[e];
        Rat lu = labels_[a.tail](theta);
        Rat lv = labels_[a.head](theta);
        sets.active[e] = lv >= lu + a.transit;
        sets.resetting[e] = lv > lu + a.transit;
        sets.full[e] = a.storage && load(e)(lu) == *a.storage;
    }
    return sets;
}

}  // namespace nashflow
