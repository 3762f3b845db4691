#include "nashflow/network.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace nashflow {

std::vector<int> Network::out_arcs(int v) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(arcs.size()); ++i)
        if (arcs[i].tail == v) out.push_back(i);
    return out;
}

std::vector<int> Network::in_arcs(int v) const {
    std::vector<int> in;
    for (int i = 0; i < static_cast<int>(arcs.size()); ++i)
        if (arcs[i].head == v) in.push_back(i);
    return in;
}

namespace {

// Resolve "cap_in disabled": nu+ larger than the potential total inflow of the
// tail, realized as (sum of incoming nu-) + 1.
void resolve_auto_caps(Network& net) {
    for (auto& arc : net.arcs) {
        if (!arc.cap_in_auto) continue;
        Rat total(1);
        for (const auto& other : net.arcs)
            if (other.head == arc.tail) total += other.cap_out;
        if (arc.tail == net.source) total += net.rate;
        arc.cap_in = total;
    }
}

// Finds a cycle among the given arcs where every arc has zero transit time.
std::optional<std::vector<int>> find_zero_transit_cycle(const Network& net) {
    std::vector<int> zero_arcs;
    for (int i = 0; i < static_cast<int>(net.arcs.size()); ++i)
        if (net.arcs[i].transit == 0) zero_arcs.push_back(i);
    auto result = topological_order(net.node_count(), net, zero_arcs);
    if (auto* cyc = std::get_if<CycleFound>(&result)) return cyc->arcs;
    return std::nullopt;
}

}  // namespace

std::variant<ValidatedNetwork, std::vector<Violation>> validate_network(const Network& net_in) {
    Network net = net_in;
    resolve_auto_caps(net);
    std::vector<Violation> violations;

    if (net.source < 0 || net.source >= net.node_count() || net.sink < 0 ||
        net.sink >= net.node_count())
        violations.push_back({ViolationCode::BadParameter, "", "source or sink out of range"});
    if (net.rate <= 0)
        violations.push_back({ViolationCode::BadParameter, "", "inflow rate must be positive"});
    if (!violations.empty()) return violations;

    for (const auto& arc : net.arcs) {
        if (arc.transit < 0)
            violations.push_back({ViolationCode::BadParameter, arc.name, "transit time must be >= 0"});
        if (arc.cap_in <= 0 || arc.cap_out <= 0)
            violations.push_back({ViolationCode::BadParameter, arc.name, "capacities must be positive"});
        if (arc.storage && (*arc.storage <= 0 || *arc.storage <= arc.cap_in * arc.transit))
            violations.push_back({ViolationCode::StorageTooSmall, arc.name,
                                  "storage must exceed cap_in * transit (" + to_string(arc.storage) +
                                      " <= " + to_string(Rat(arc.cap_in * arc.transit)) + ")"});
    }

    // Reachability from the source.
    {
        std::vector<bool> seen(net.node_count(), false);
        std::deque<int> queue{net.source};
        seen[net.source] = true;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (const auto& arc : net.arcs)
                if (arc.tail == v && !seen[arc.head]) {
                    seen[arc.head] = true;
                    queue.push_back(arc.head);
                }
        }
        for (int v = 0; v < net.node_count(); ++v)
            if (!seen[v])
                violations.push_back({ViolationCode::UnreachableNode, net.node_names[v],
                                      "node not reachable from source"});
    }

    if (auto cycle = find_zero_transit_cycle(net)) {
        std::string arcs;
        for (int a : *cycle) arcs += (arcs.empty() ? "" : ",") + net.arcs[a].name;
        violations.push_back({ViolationCode::ZeroTransitCycle, arcs, "zero-transit cycle: " + arcs});
    }

    // Spillback must never reach the source.
    for (const auto& arc : net.arcs) {
        if (arc.head == net.source)
            violations.push_back({ViolationCode::SourceArcViolation, arc.name,
                                  "source must have no incoming arcs"});
        if (arc.tail == net.source) {
            if (arc.storage)
                violations.push_back({ViolationCode::SourceArcViolation, arc.name,
                                      "arcs leaving the source need infinite storage"});
            if (arc.cap_in <= net.rate)
                violations.push_back({ViolationCode::SourceArcViolation, arc.name,
                                      "arcs leaving the source need cap_in > rate"});
        }
    }

    if (!violations.empty()) return violations;
    return ValidatedNetwork(std::move(net));
}

Network add_super_source(const Network& net_in) {
    Network net = net_in;
    if (net.rate <= 0)
        throw std::invalid_argument("add_super_source: inflow rate must be positive");

    // Already fine? Then the transform is the identity.
    bool ok = true;
    for (const auto& arc : net.arcs) {
        if (arc.head == net.source) ok = false;
        if (arc.tail == net.source && (arc.storage || arc.cap_in <= net.rate)) ok = false;
    }
    if (ok) return net;

    int s_star = net.node_count();
    std::string name = "s*";
    while (std::find(net.node_names.begin(), net.node_names.end(), name) != net.node_names.end())
        name += "*";
    net.node_names.push_back(name);
    ArcParams e;
    e.tail = s_star;
    e.head = net.source;
    e.name = "e*";
    e.transit = 0;
    e.storage = std::nullopt;
    e.cap_out = net.rate;
    e.cap_in = net.rate + 1;
    net.arcs.push_back(e);
    net.source = s_star;
    return net;
}

std::variant<std::vector<int>, CycleFound> topological_order(int n_nodes, const Network& net,
                                                             const std::vector<int>& arc_ids) {
    std::vector<std::vector<int>> out(n_nodes);  // arc ids leaving each node
    for (int a : arc_ids) out[net.arcs[a].tail].push_back(a);

    std::vector<int> state(n_nodes, 0);  // 0 unseen, 1 on stack, 2 done
    std::vector<int> order;
    std::vector<int> path_arcs;
    std::optional<CycleFound> cycle;

    std::function<void(int)> visit = [&](int v) {
        if (cycle) return;
        state[v] = 1;
        for (int a : out[v]) {
            int w = net.arcs[a].head;
            if (state[w] == 2) continue;
            if (state[w] == 1) {
                // Walk back along the current path to extract the cycle.
                CycleFound c;
                auto it = path_arcs.begin();
                for (; it != path_arcs.end(); ++it)
                    if (net.arcs[*it].tail == w) break;
                for (; it != path_arcs.end(); ++it) c.arcs.push_back(*it);
                c.arcs.push_back(a);
                cycle = std::move(c);
                return;
            }
            path_arcs.push_back(a);
            visit(w);
            path_arcs.pop_back();
            if (cycle) return;
        }
        state[v] = 2;
        order.push_back(v);
    };
    for (int v = 0; v < n_nodes && !cycle; ++v)
        if (state[v] == 0) visit(v);

    if (cycle) return *cycle;
    std::reverse(order.begin(), order.end());
    return order;
}

}  // namespace nashflow
