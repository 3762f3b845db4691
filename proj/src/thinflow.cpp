#include "nashflow/thinflow.hpp"

#include "nashflow/linear_feasibility.hpp"

#include <algorithm>
#include <span>
#include <stdexcept>

namespace nashflow {

Rat rho(const Rat& label_tail, const Rat& flow, const Rat& factor_head, const Rat& cap_out,
        bool resetting) {
    if (factor_head <= 0 || cap_out <= 0)
        throw std::invalid_argument("rho: factor and capacity must be positive");
    Rat queue_term = flow / (factor_head * cap_out);
    if (resetting) return queue_term;
    return std::max(label_tail, queue_term);
}

std::vector<TfViolation> verify_thin_flow(const ThinFlowInstance& inst,
                                          const ThinFlowSolution& sol) {
    std::vector<TfViolation> out;
    const int n = inst.node_count();
    const int m = static_cast<int>(inst.arcs.size());
    if (static_cast<int>(sol.flow.size()) != m || static_cast<int>(sol.label.size()) != n ||
        static_cast<int>(sol.factor.size()) != n) {
        out.push_back({"domain", "", "solution dimensions do not match instance"});
        return out;
    }

    for (int v = 0; v < n; ++v) {
        if (sol.label[v] < 0)
            out.push_back({"domain", inst.node_names[v], "label must be >= 0"});
        if (sol.factor[v] <= 0 || sol.factor[v] > 1)
            out.push_back({"domain", inst.node_names[v], "factor must be in (0,1]"});
    }
    for (int e = 0; e < m; ++e)
        if (sol.flow[e] < 0) out.push_back({"domain", inst.arcs[e].name, "flow must be >= 0"});
    if (!out.empty()) return out;

    // Flow value and conservation.
    for (int v = 0; v < n; ++v) {
        if (v == inst.sink) continue;
        Rat net(0);
        for (int e = 0; e < m; ++e) {
            if (inst.arcs[e].tail == v) net += sol.flow[e];
            if (inst.arcs[e].head == v) net -= sol.flow[e];
        }
        Rat want = (v == inst.source) ? inst.demand : Rat(0);
        if (net != want)
            out.push_back({"flow", inst.node_names[v],
                           "net outflow " + to_string(net) + ", expected " + to_string(want)});
    }

    // TF1: l'_s = 1 / c_s.
    if (sol.label[inst.source] * sol.factor[inst.source] != 1)
        out.push_back({"TF1", inst.node_names[inst.source],
                       "label " + to_string(sol.label[inst.source]) + " != 1/" +
                           to_string(sol.factor[inst.source])});

    // TF2 and TF3.
    for (int v = 0; v < n; ++v) {
        if (v == inst.source) continue;
        std::optional<Rat> min_rho;
        for (int e = 0; e < m; ++e) {
            if (inst.arcs[e].head != v) continue;
            Rat r = rho(sol.label[inst.arcs[e].tail], sol.flow[e], sol.factor[v],
                        inst.arcs[e].cap_out, inst.arcs[e].resetting);
            if (!min_rho || r < *min_rho) min_rho = r;
            if (sol.flow[e] > 0 && sol.label[v] != r)
                out.push_back({"TF3", inst.arcs[e].name,
                               "label " + to_string(sol.label[v]) + " != rho " + to_string(r)});
        }
        if (min_rho && sol.label[v] != *min_rho)
            out.push_back({"TF2", inst.node_names[v],
                           "label " + to_string(sol.label[v]) + " != min rho " +
                               to_string(*min_rho)});
    }

    // TF4 and TF5.
    for (int v = 0; v < n; ++v) {
        std::optional<Rat> max_ratio;
        for (int e = 0; e < m; ++e) {
            if (inst.arcs[e].tail != v) continue;
            Rat ratio = sol.flow[e] / inst.arcs[e].bound_in;
            if (!max_ratio || ratio > *max_ratio) max_ratio = ratio;
            if (sol.label[v] < ratio)
                out.push_back({"TF4", inst.arcs[e].name,
                               "label " + to_string(sol.label[v]) + " < x/b+ " + to_string(ratio)});
        }
        if (sol.factor[v] < 1) {
            if (!max_ratio)
                out.push_back({"TF5", inst.node_names[v],
                               "factor < 1 at a node with no outgoing arcs"});
            else if (sol.label[v] != *max_ratio)
                out.push_back({"TF5", inst.node_names[v],
                               "label " + to_string(sol.label[v]) + " != max x/b+ " +
                                   to_string(*max_ratio)});
        }
    }
    return out;
}

namespace {

// Per incoming arc, which part of the TF2/TF3 min is responsible:
//   TightTail : rho attained by the tail label (non-resetting only);
//               l'_v = l'_u and x <= cap_out * mu_v.
//   TightQueue: rho attained by the queue term; x = cap_out * mu_v (and
//               l'_u <= l'_v for non-resetting arcs).
//   Zero      : the arc carries no flow and its rho stays above l'_v.
enum class ArcMode { TightTail, TightQueue, Zero };

// Per node: Open (c = 1, l' > 0), Dead (l' = 0, c := 1), or Throttled
// (c < 1, TF5 tight on a chosen outgoing arc).
enum class NodeMode { Open, Dead, Throttled };

struct Searcher {
    const ThinFlowInstance& inst;
    SolveStats* stats;
    std::size_t max_solutions;

    int n, m;
    // var layout: x_e = e; l_v = m + v; mu_v = m + n + v
    int var_x(int e) const { return e; }
    int var_l(int v) const { return m + v; }
    int var_mu(int v) const { return m + n + v; }
    int n_vars() const { return m + 2 * n; }

    std::vector<std::vector<int>> in_arcs, out_arcs;
    std::vector<int> node_order;  // source first, then topological

    std::vector<LinearConstraint> base;  // static constraints
    std::vector<ThinFlowSolution> found;

    explicit Searcher(const ThinFlowInstance& i, SolveStats* s, std::size_t max_sols)
        : inst(i), stats(s), max_solutions(max_sols) {
        n = inst.node_count();
        m = static_cast<int>(inst.arcs.size());
        in_arcs.resize(n);
        out_arcs.resize(n);
        for (int e = 0; e < m; ++e) {
            in_arcs[inst.arcs[e].head].push_back(e);
            out_arcs[inst.arcs[e].tail].push_back(e);
        }
        node_order = topo_order();
        build_base();
    }

    std::vector<int> topo_order() const {
        std::vector<int> indeg(n, 0), order;
        for (const auto& a : inst.arcs) indeg[a.head]++;
        std::vector<int> ready;
        for (int v = 0; v < n; ++v)
            if (indeg[v] == 0) ready.push_back(v);
        while (!ready.empty()) {
            int v = ready.front();
            ready.erase(ready.begin());
            order.push_back(v);
            for (int e : out_arcs[v])
                if (--indeg[inst.arcs[e].head] == 0) ready.push_back(inst.arcs[e].head);
        }
        if (static_cast<int>(order.size()) != n)
            throw std::invalid_argument("thin flow instance graph must be acyclic");
        return order;
    }

    void build_base() {
        auto row = [&](std::vector<std::pair<int, Rat>> terms, Rel rel, Rat rhs) {
            LinearConstraint c;
            c.coef.assign(n_vars(), Rat(0));
            for (auto& [var, coef] : terms) c.coef[var] += coef;
            c.rel = rel;
            c.rhs = std::move(rhs);
            base.push_back(std::move(c));
        };
        for (int e = 0; e < m; ++e) row({{var_x(e), Rat(-1)}}, Rel::Le, Rat(0));  // x >= 0
        for (int v = 0; v < n; ++v) {
            row({{var_l(v), Rat(-1)}}, Rel::Le, Rat(0));                       // l >= 0
            row({{var_mu(v), Rat(-1)}}, Rel::Le, Rat(0));                      // mu >= 0
            row({{var_mu(v), Rat(1)}, {var_l(v), Rat(-1)}}, Rel::Le, Rat(0));  // mu <= l (c <= 1)
        }
        row({{var_mu(inst.source), Rat(1)}}, Rel::Eq, Rat(1));  // TF1: c_s * l'_s = 1
        // Conservation at every node but the sink.
        for (int v = 0; v < n; ++v) {
            if (v == inst.sink) continue;
            std::vector<std::pair<int, Rat>> terms;
            for (int e : out_arcs[v]) terms.emplace_back(var_x(e), Rat(1));
            for (int e : in_arcs[v]) terms.emplace_back(var_x(e), Rat(-1));
            row(std::move(terms), Rel::Eq, v == inst.source ? inst.demand : Rat(0));
        }
        // TF4: x_e <= b+_e * l'_tail.
        for (int e = 0; e < m; ++e)
            row({{var_x(e), Rat(1)}, {var_l(inst.arcs[e].tail), -inst.arcs[e].bound_in}}, Rel::Le,
                Rat(0));
    }

    // Current decision state while searching.
    std::vector<LinearConstraint> chosen;
    int target_throttles = 0;  // this pass uses exactly this many
    int used_throttles = 0;
    std::vector<char> node_dead;  // label rate pinned to zero upstream

    void push_row(std::vector<std::pair<int, Rat>> terms, Rel rel, Rat rhs) {
        LinearConstraint c;
        c.coef.assign(n_vars(), Rat(0));
        for (auto& [var, coef] : terms) c.coef[var] += coef;
        c.rel = rel;
        c.rhs = std::move(rhs);
        chosen.push_back(std::move(c));
    }

    std::optional<std::vector<Rat>> solve_current() const {
        FeasibilitySystem sys(n_vars());
        for (const auto& c : base) sys.add(c);
        for (const auto& c : chosen) sys.add(c);
        return sys.solve();
    }

    bool partial_feasible() {
        if (stats) stats->nodes_visited++;
        return solve_current().has_value();
    }

    // Adds the constraints of one arc-mode choice; returns rows pushed.
    int apply_arc_mode(int e, ArcMode mode) {
        const TfArc& a = inst.arcs[e];
        int before = static_cast<int>(chosen.size());
        switch (mode) {
            case ArcMode::TightTail:
                // l'_head = l'_tail, queue term below: x <= cap_out * mu_head.
                push_row({{var_l(a.head), Rat(1)}, {var_l(a.tail), Rat(-1)}}, Rel::Eq, Rat(0));
                push_row({{var_x(e), Rat(1)}, {var_mu(a.head), -a.cap_out}}, Rel::Le, Rat(0));
                break;
            case ArcMode::TightQueue:
                push_row({{var_x(e), Rat(1)}, {var_mu(a.head), -a.cap_out}}, Rel::Eq, Rat(0));
                if (!a.resetting)
                    push_row({{var_l(a.tail), Rat(1)}, {var_l(a.head), Rat(-1)}}, Rel::Le, Rat(0));
                break;
            case ArcMode::Zero:
                push_row({{var_x(e), Rat(1)}}, Rel::Eq, Rat(0));
                if (a.resetting) {
                    // rho = 0 >= l'_v forces l'_v = 0 (labels are nonnegative).
                    push_row({{var_l(a.head), Rat(1)}}, Rel::Le, Rat(0));
                } else {
                    push_row({{var_l(a.head), Rat(1)}, {var_l(a.tail), Rat(-1)}}, Rel::Le, Rat(0));
                }
                break;
        }
        return static_cast<int>(chosen.size()) - before;
    }

    void pop_rows(int k) { chosen.resize(chosen.size() - static_cast<std::size_t>(k)); }

    bool done() const { return found.size() >= max_solutions; }

    // Move on to the next node; the leaf solve itself covers the final check.
    void descend(std::size_t ni) {
        if (ni + 1 == node_order.size() || partial_feasible()) search_nodes(ni + 1);
    }

    // Assign arc modes for the incoming arcs of node_order[ni], arc index ai.
    // `have_eq` tracks whether some incoming arc already attains the TF2 min.
    void search_arcs(std::size_t ni, std::size_t ai, bool have_eq) {
        if (done()) return;
        int v = node_order[ni];
        const auto& arcs = in_arcs[v];
        if (ai == arcs.size()) {
            if (!arcs.empty() && !have_eq) return;  // TF2 minimum must be attained
            descend(ni);
            return;
        }
        int e = arcs[ai];
        const bool resetting = inst.arcs[e].resetting;
        const ArcMode tail_modes[] = {ArcMode::TightTail, ArcMode::TightQueue, ArcMode::Zero};
        const ArcMode reset_modes[] = {ArcMode::TightQueue, ArcMode::Zero};
        auto modes = resetting ? std::span<const ArcMode>(reset_modes)
                               : std::span<const ArcMode>(tail_modes);
        for (ArcMode mode : modes) {
            bool is_eq = mode != ArcMode::Zero;
            int k = apply_arc_mode(e, mode);
            // With two or more arcs still open a failed check cuts a whole
            // subtree, which outweighs the extra solve.
            if (ai + 2 >= arcs.size() || partial_feasible())
                search_arcs(ni, ai + 1, have_eq || is_eq);
            pop_rows(k);
            if (done()) return;
        }
    }

    // Assign the node mode for node_order[ni], then its incoming arc modes.
    void search_nodes(std::size_t ni) {
        if (done()) return;
        if (ni == node_order.size()) {
            if (used_throttles == target_throttles) finish_leaf();
            return;
        }
        int v = node_order[ni];
        const bool is_source = v == inst.source;
        const bool has_out = !out_arcs[v].empty();

        // A dead tail caps the arc's entry at zero, so its rho is zero and the
        // head's label rate cannot stay positive. A zero label rate in turn
        // needs a zero rho on some incoming arc: a resetting one (no flow, no
        // tail term) or one whose tail is already dead.
        bool forced_dead = false, dead_reachable = in_arcs[v].empty();
        for (int e : in_arcs[v]) {
            if (node_dead[inst.arcs[e].tail]) forced_dead = dead_reachable = true;
            if (inst.arcs[e].resetting) dead_reachable = true;
        }
        const int nodes_left = static_cast<int>(node_order.size() - ni) - 1;
        const bool alive_ok =
            !forced_dead && used_throttles + nodes_left >= target_throttles;

        // Open: c_v = 1 with positive label.
        if (alive_ok) {
            int k = 0;
            if (is_source) {
                // mu_s = 1 already; c_s = 1 means l'_s = 1.
                push_row({{var_l(v), Rat(1)}}, Rel::Eq, Rat(1));
                k = 1;
            } else {
                push_row({{var_mu(v), Rat(1)}, {var_l(v), Rat(-1)}}, Rel::Eq, Rat(0));
                push_row({{var_mu(v), Rat(-1)}}, Rel::Lt, Rat(0));  // mu > 0
                k = 2;
            }
            search_arcs(ni, 0, false);
            pop_rows(k);
            if (done()) return;
        }
        // Dead: label 0 (spillback factor normalized to 1). Impossible at the
        // source where mu_s = 1 <= l'_s. No incoming arc carries flow, and the
        // incoming mode split collapses to this single choice.
        if (!is_source && dead_reachable &&
            used_throttles + nodes_left >= target_throttles) {
            push_row({{var_l(v), Rat(1)}}, Rel::Eq, Rat(0));
            push_row({{var_mu(v), Rat(1)}}, Rel::Eq, Rat(0));
            for (int e : in_arcs[v]) push_row({{var_x(e), Rat(1)}}, Rel::Eq, Rat(0));
            node_dead[v] = 1;
            descend(ni);
            node_dead[v] = 0;
            pop_rows(2 + static_cast<int>(in_arcs[v].size()));
            if (done()) return;
        }
        // Throttled: c_v < 1, TF5 tight on a chosen outgoing arc.
        if (alive_ok && used_throttles < target_throttles && has_out) {
            ++used_throttles;
            for (int e : out_arcs[v]) {
                push_row({{var_mu(v), Rat(1)}, {var_l(v), Rat(-1)}}, Rel::Lt, Rat(0));  // c < 1
                push_row({{var_mu(v), Rat(-1)}}, Rel::Lt, Rat(0));                      // c > 0
                push_row({{var_x(e), Rat(1)}, {var_l(v), -inst.arcs[e].bound_in}}, Rel::Eq, Rat(0));
                search_arcs(ni, 0, false);
                pop_rows(3);
                if (done()) break;
            }
            --used_throttles;
        }
    }

    void finish_leaf() {
        if (stats) stats->configurations_checked++;
        auto point = solve_current();
        if (!point) return;
        ThinFlowSolution sol;
        sol.flow.resize(m);
        sol.label.resize(n);
        sol.factor.resize(n);
        for (int e = 0; e < m; ++e) sol.flow[e] = (*point)[var_x(e)];
        for (int v = 0; v < n; ++v) {
            sol.label[v] = (*point)[var_l(v)];
            sol.factor[v] = sol.label[v] > 0 ? (*point)[var_mu(v)] / sol.label[v] : Rat(1);
        }
        if (!verify_thin_flow(inst, sol).empty()) return;
        if (std::find_if(found.begin(), found.end(), [&](const ThinFlowSolution& s) {
                return s.flow == sol.flow && s.label == sol.label && s.factor == sol.factor;
            }) == found.end())
            found.push_back(std::move(sol));
    }

    void run() {
        // Spillback-free configurations first, then more throttled nodes.
        node_dead.assign(n, 0);
        for (int k = 0; k <= n && !done(); ++k) {
            target_throttles = k;
            used_throttles = 0;
            search_nodes(0);
        }
    }
};

}  // namespace

std::optional<ThinFlowSolution> solve_thin_flow(const ThinFlowInstance& inst, SolveStats* stats) {
    Searcher s(inst, stats, 1);
    s.run();
    if (s.found.empty()) return std::nullopt;
    return std::move(s.found.front());
}

std::vector<ThinFlowSolution> enumerate_thin_flows(const ThinFlowInstance& inst,
                                                   std::size_t max_count) {
    Searcher s(inst, nullptr, max_count);
    s.run();
    return s.found;
}

}  // namespace nashflow
