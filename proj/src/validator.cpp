#include "nashflow/validator.hpp"

#include "nashflow/engine.hpp"
#include "nashflow/thinflow.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <set>

namespace nashflow {

bool ValidationReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckItem& c) { return c.passed; });
}

const CheckItem* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::optional<std::vector<int>> blocked_cycle(const Network& net, const std::vector<char>& full) {
    std::vector<int> full_ids;
    for (std::size_t e = 0; e < full.size(); ++e)
        if (full[e]) full_ids.push_back(static_cast<int>(e));
    auto res = topological_order(net.node_count(), net, full_ids);
    if (auto* cycle = std::get_if<CycleFound>(&res)) return cycle->arcs;
    return std::nullopt;
}

Rat phase_length_bound(const Network& net) {
    Rat nu_min(1), total(0);
    for (const ArcParams& a : net.arcs) {
        nu_min = std::min({nu_min, a.cap_in, a.cap_out});
        total += a.cap_in;
    }
    total = std::max(total, Rat(1));
    Rat ratio = nu_min / total;
    Rat bound(1);
    for (std::size_t i = 0; i < net.arcs.size(); ++i) bound *= ratio;
    return bound * nu_min;
}

namespace {

constexpr std::size_t kMaxWitnesses = 4;
constexpr int kRandomSamples = 20;

void fail(CheckItem& item, std::string message) {
    item.passed = false;
    if (item.witnesses.size() < kMaxWitnesses) item.witnesses.push_back(std::move(message));
}

// Points where the function passes through the level, so grids refined with
// them see every change of a threshold condition.
void add_crossings(const PiecewiseLinear& f, const Rat& level, std::set<Rat>& out) {
    const auto& ts = f.breakpoints();
    const auto& vs = f.values();
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        if ((vs[i] < level && vs[i + 1] > level) || (vs[i] > level && vs[i + 1] < level)) {
            Rat slope = (vs[i + 1] - vs[i]) / (ts[i + 1] - ts[i]);
            out.insert(ts[i] + (level - vs[i]) / slope);
        }
    }
    if (f.final_slope() != 0) {
        Rat hit = ts.back() + (level - vs.back()) / f.final_slope();
        if (hit > ts.back()) out.insert(hit);
    }
}

std::vector<Rat> refine(const std::set<Rat>& base, std::mt19937_64& rng) {
    std::vector<Rat> pts(base.begin(), base.end());
    std::vector<Rat> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out.push_back(pts[i]);
        if (i + 1 < pts.size()) out.push_back((pts[i] + pts[i + 1]) / 2);
    }
    if (!pts.empty()) {
        out.push_back(pts.back() + 1);
        out.push_back(pts.back() + 2);
        Rat span = pts.back() + 3 - pts.front();
        std::uniform_int_distribution<long long> dist(0, 1 << 20);
        for (int k = 0; k < kRandomSamples; ++k)
            out.push_back(pts.front() + span * Rat(dist(rng), 1 << 20));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

unsigned long long seed_from_env() {
    if (const char* s = std::getenv("NASHFLOW_SEED")) return std::strtoull(s, nullptr, 10);
    return 20240901ull;
}

struct Validator {
    const EquilibriumTrajectory& traj;
    const Network& net;
    int n, m;
    std::mt19937_64 rng;

    std::vector<PiecewiseLinear> loads, queues;
    std::vector<Rat> ground;  // ground-time sample grid
    std::vector<Rat> clock;   // phase-clock sample grid

    Validator(const EquilibriumTrajectory& t, unsigned long long seed)
        : traj(t), net(t.network()), n(net.node_count()),
          m(static_cast<int>(net.arcs.size())), rng(seed) {
        for (int e = 0; e < m; ++e) {
            loads.push_back(traj.load(e));
            queues.push_back(traj.queue(e));
        }

        std::set<Rat> g{Rat(0)};
        for (int e = 0; e < m; ++e) {
            const ArcFlows& f = traj.flows(e);
            const Rat& tau = net.arcs[e].transit;
            for (const Rat& t0 : f.rate_in.breakpoints()) {
                g.insert(t0);
                g.insert(t0 + tau);
            }
            for (const Rat& t0 : f.rate_out.breakpoints()) g.insert(t0);
            add_crossings(queues[e], Rat(0), g);
            if (net.arcs[e].storage) add_crossings(loads[e], *net.arcs[e].storage, g);
        }
        ground = refine(g, rng);

        std::set<Rat> c;
        for (const PhaseProfile& ph : traj.phases()) {
            c.insert(ph.start);
            if (ph.duration) c.insert(ph.start + *ph.duration);
        }
        if (c.empty()) c.insert(Rat(0));
        clock = refine(c, rng);

        // A truncated run carries no data past its end: clip the grids to the
        // clock horizon and to the earliest ground time any label reaches it.
        if (MaybeRat h = traj.horizon()) {
            Rat gcap = traj.label(0)(*h);
            for (int v = 1; v < n; ++v) gcap = std::min(gcap, traj.label(v)(*h));
            std::erase_if(ground, [&](const Rat& t) { return t > gcap; });
            std::erase_if(clock, [&](const Rat& t) { return t > *h; });
        }
    }

    CheckItem conservation() {
        CheckItem item{"conservation"};
        for (int v = 0; v < n; ++v) {
            if (v == net.sink) continue;
            for (const Rat& t : ground) {
                Rat balance = (v == net.source) ? net.rate : Rat(0);
                for (int e = 0; e < m; ++e) {
                    if (net.arcs[e].head == v) balance += traj.flows(e).rate_out(t);
                    if (net.arcs[e].tail == v) balance -= traj.flows(e).rate_in(t);
                }
                if (balance != 0)
                    fail(item, net.node_names[v] + " at t=" + to_string(t) + ": imbalance " +
                                   to_string(balance));
            }
        }
        return item;
    }

    CheckItem entry_bound() {
        CheckItem item{"entry_bound"};
        for (int e = 0; e < m; ++e)
            for (const Rat& t : ground) {
                Rat rate = traj.flows(e).rate_in(t);
                Rat bound = traj.inflow_bound(e, t);
                if (rate > bound)
                    fail(item, net.arcs[e].name + " at t=" + to_string(t) + ": inflow " +
                                   to_string(rate) + " > bound " + to_string(bound));
            }
        return item;
    }

    // Recovered spillback factor at a node and time, or nullopt when the
    // observed outflows fit no single factor.
    std::optional<Rat> recover_factor(int v, const Rat& t, CheckItem* item) {
        Rat c(1);
        bool throttled = false;
        for (int e = 0; e < m; ++e) {
            if (net.arcs[e].head != v) continue;
            Rat out = traj.flows(e).rate_out(t);
            Rat press = traj.push_rate(e, t);
            if (out < std::min(press, net.arcs[e].cap_out)) {
                Rat cand = out / net.arcs[e].cap_out;
                if (throttled && cand != c) {
                    if (item)
                        fail(*item, net.node_names[v] + " at t=" + to_string(t) +
                                        ": factors " + to_string(c) + " vs " + to_string(cand));
                    return std::nullopt;
                }
                c = cand;
                throttled = true;
            }
        }
        for (int e = 0; e < m; ++e) {
            if (net.arcs[e].head != v) continue;
            Rat out = traj.flows(e).rate_out(t);
            Rat want = std::min(traj.push_rate(e, t), Rat(c * net.arcs[e].cap_out));
            if (out != want) {
                if (item)
                    fail(*item, net.arcs[e].name + " at t=" + to_string(t) + ": outflow " +
                                    to_string(out) + ", fair share " + to_string(want));
                return std::nullopt;
            }
        }
        return c;
    }

    CheckItem fair_allocation() {
        CheckItem item{"fair_allocation"};
        for (int v = 0; v < n; ++v)
            for (const Rat& t : ground) recover_factor(v, t, &item);
        return item;
    }

    CheckItem no_slack() {
        CheckItem item{"no_slack"};
        for (int v = 0; v < n; ++v)
            for (const Rat& t : ground) {
                auto c = recover_factor(v, t, nullptr);
                if (!c || *c >= 1) continue;
                bool justified = false;
                for (int e = 0; e < m && !justified; ++e) {
                    if (net.arcs[e].tail != v) continue;
                    Rat bound = traj.inflow_bound(e, t);
                    justified = bound < net.arcs[e].cap_in &&
                                traj.flows(e).rate_in(t) == bound;
                }
                if (!justified)
                    fail(item, net.node_names[v] + " at t=" + to_string(t) + ": factor " +
                                   to_string(*c) + " with no binding full arc");
            }
        return item;
    }

    CheckItem no_deadlock() {
        CheckItem item{"no_deadlock"};
        for (const Rat& t : ground) {
            std::vector<char> full(m, 0);
            for (int e = 0; e < m; ++e)
                full[e] = net.arcs[e].storage && loads[e](t) == *net.arcs[e].storage;
            if (auto cycle = blocked_cycle(net, full)) {
                std::string arcs;
                for (int e : *cycle) arcs += (arcs.empty() ? "" : ",") + net.arcs[e].name;
                fail(item, "t=" + to_string(t) + ": exhausted cycle " + arcs);
            }
        }
        return item;
    }

    CheckItem outflow_cap() {
        CheckItem item{"outflow_cap"};
        for (int e = 0; e < m; ++e)
            for (const Rat& t : ground) {
                Rat rate = traj.flows(e).rate_out(t);
                if (rate > net.arcs[e].cap_out || rate < 0 || traj.flows(e).rate_in(t) < 0)
                    fail(item, net.arcs[e].name + " at t=" + to_string(t) + ": outflow " +
                                   to_string(rate));
            }
        return item;
    }

    CheckItem queue_nonnegative() {
        CheckItem item{"queue_nonnegative"};
        for (int e = 0; e < m; ++e)
            for (const Rat& t : ground) {
                if (queues[e](t) < 0)
                    fail(item, net.arcs[e].name + " at t=" + to_string(t) + ": queue " +
                                   to_string(queues[e](t)));
                if (loads[e](t) < 0)
                    fail(item, net.arcs[e].name + " at t=" + to_string(t) + ": load " +
                                   to_string(loads[e](t)));
            }
        return item;
    }

    CheckItem storage_bound() {
        CheckItem item{"storage_bound"};
        for (int e = 0; e < m; ++e) {
            if (!net.arcs[e].storage) continue;
            for (const Rat& t : ground)
                if (loads[e](t) > *net.arcs[e].storage)
                    fail(item, net.arcs[e].name + " at t=" + to_string(t) + ": load " +
                                   to_string(loads[e](t)) + " > " +
                                   to_string(*net.arcs[e].storage));
        }
        return item;
    }

    CheckItem labels_monotone() {
        CheckItem item{"labels_monotone"};
        for (int v = 0; v < n; ++v)
            if (!traj.label(v).non_decreasing())
                fail(item, net.node_names[v] + ": label decreases");
        return item;
    }

    CheckItem nash_active() {
        CheckItem item{"nash_active"};
        for (const Rat& theta : clock) {
            ArcSets sets = traj.arc_sets(theta);
            for (int e = 0; e < m; ++e) {
                if (sets.active[e]) continue;
                Rat entry = traj.label(net.arcs[e].tail)(theta);
                if (traj.flows(e).rate_in(entry) > 0)
                    fail(item, net.arcs[e].name + " at clock " + to_string(theta) +
                                   ": flow on an arc that is not worth taking");
            }
        }
        return item;
    }

    CheckItem nash_exit() {
        CheckItem item{"nash_exit"};
        for (const Rat& theta : clock)
            for (int e = 0; e < m; ++e) {
                const ArcParams& a = net.arcs[e];
                Rat lu = traj.label(a.tail)(theta);
                Rat lv = traj.label(a.head)(theta);
                MaybeRat exit = traj.exit_time(e, lu);
                if (!exit) continue;  // flow stuck forever, checked elsewhere
                bool active = lv >= lu + a.transit;
                if (active ? (lv != *exit) : (lv > *exit))
                    fail(item, a.name + " at clock " + to_string(theta) + ": head label " +
                                   to_string(lv) + " vs arc exit " + to_string(*exit));
            }
        return item;
    }

    CheckItem phase_thin_flow() {
        CheckItem item{"phase_thin_flow"};
        for (std::size_t p = 0; p < traj.phases().size(); ++p) {
            const PhaseProfile& ph = traj.phases()[p];
            PhaseSetup setup = phase_setup(traj, ph.start);
            ThinFlowSolution sol;
            sol.label = ph.label_rate;
            sol.factor = ph.factor;
            for (int id : setup.arc_ids) sol.flow.push_back(ph.flow_rate[id]);
            for (int e = 0; e < m; ++e) {
                bool listed = std::find(setup.arc_ids.begin(), setup.arc_ids.end(), e) !=
                              setup.arc_ids.end();
                if (!listed && ph.flow_rate[e] != 0)
                    fail(item, "phase " + std::to_string(p) + ": arc " + net.arcs[e].name +
                                   " carries flow while unusable");
            }
            for (const TfViolation& v : verify_thin_flow(setup.instance, sol))
                fail(item, "phase " + std::to_string(p) + ": " + v.condition + " at " +
                               v.subject + " (" + v.detail + ")");
        }
        return item;
    }

    CheckItem phase_step_max() {
        CheckItem item{"phase_step_max"};
        for (std::size_t p = 0; p < traj.phases().size(); ++p) {
            const PhaseProfile& ph = traj.phases()[p];
            PhaseSetup setup = phase_setup(traj, ph.start);
            ThinFlowSolution sol;
            sol.label = ph.label_rate;
            sol.factor = ph.factor;
            for (int id : setup.arc_ids) sol.flow.push_back(ph.flow_rate[id]);
            MaybeRat bound = max_feasible_alpha(traj, ph.start, setup, sol);
            bool last = p + 1 == traj.phases().size();
            if (!ph.duration) {
                if (bound)
                    fail(item, "phase " + std::to_string(p) + ": runs forever but limited to " +
                                   to_string(*bound));
            } else if (last ? less_inf(bound, ph.duration)
                            : (ph.duration != bound)) {
                fail(item, "phase " + std::to_string(p) + ": length " + to_string(*ph.duration) +
                               ", longest valid step " + to_string(bound));
            }
        }
        return item;
    }

    CheckItem step_lower_bound() {
        CheckItem item{"step_lower_bound"};
        Rat eps = phase_length_bound(net);
        for (std::size_t p = 0; p + 1 < traj.phases().size(); ++p) {
            const PhaseProfile& ph = traj.phases()[p];
            if (ph.duration && *ph.duration < eps)
                fail(item, "phase " + std::to_string(p) + ": length " + to_string(*ph.duration) +
                               " below " + to_string(eps));
        }
        return item;
    }

    CheckItem factor_reduction() {
        CheckItem item{"factor_reduction"};
        bool bounded = std::any_of(net.arcs.begin(), net.arcs.end(),
                                   [](const ArcParams& a) { return a.storage.has_value(); });
        if (bounded) return item;  // only meaningful without storage limits
        for (std::size_t p = 0; p < traj.phases().size(); ++p) {
            const PhaseProfile& ph = traj.phases()[p];
            for (int v = 0; v < n; ++v)
                if (ph.factor[v] != 1)
                    fail(item, "phase " + std::to_string(p) + ": factor " +
                                   to_string(ph.factor[v]) + " at " + net.node_names[v]);
            for (int e = 0; e < m; ++e)
                if (ph.full[e])
                    fail(item, "phase " + std::to_string(p) + ": " + net.arcs[e].name +
                                   " marked exhausted without a storage limit");
        }
        return item;
    }
};

}  // namespace

ValidationReport validate_trajectory(const EquilibriumTrajectory& traj,
                                     std::optional<unsigned long long> seed) {
    Validator v(traj, seed ? *seed : seed_from_env());
    ValidationReport report;
    report.checks.push_back(v.conservation());
    report.checks.push_back(v.entry_bound());
    report.checks.push_back(v.fair_allocation());
    report.checks.push_back(v.no_slack());
    report.checks.push_back(v.no_deadlock());
    report.checks.push_back(v.outflow_cap());
    report.checks.push_back(v.queue_nonnegative());
    report.checks.push_back(v.storage_bound());
    report.checks.push_back(v.labels_monotone());
    report.checks.push_back(v.nash_active());
    report.checks.push_back(v.nash_exit());
    report.checks.push_back(v.phase_thin_flow());
    report.checks.push_back(v.phase_step_max());
    report.checks.push_back(v.step_lower_bound());
    report.checks.push_back(v.factor_reduction());
    return report;
}

}  // namespace nashflow
