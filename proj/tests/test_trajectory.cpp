#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nashflow/trajectory.hpp"

using namespace nashflow;

namespace {

// s -> v -> t with a narrow direct arc and a long wide detour. `narrow_out`
// selects the exit capacity of the direct arc.
Network two_route(const Rat& narrow_out) {
    Network net;
    net.node_names = {"s", "v", "t"};
    net.source = 0;
    net.sink = 2;
    net.rate = Rat(3);
    net.arcs.push_back({0, 1, "e1", Rat(1), std::nullopt, Rat(4), Rat(3)});
    net.arcs.push_back({1, 2, "e2", Rat(1), Rat(8), Rat(3), narrow_out});
    net.arcs.push_back({1, 2, "e3", Rat(7), std::nullopt, Rat(3), Rat(2)});
    return net;
}

// Queue builds on e2 until the detour becomes competitive, then both run.
EquilibriumTrajectory queueing_run() {
    Network net = two_route(Rat(1));
    PhaseProfile p1{Rat(0),
                    Rat(3),
                    {Rat(3), Rat(3), Rat(0)},
                    {Rat(1), Rat(1), Rat(3)},
                    {Rat(1), Rat(1), Rat(1)},
                    {1, 1, 0},
                    {0, 0, 0},
                    {0, 0, 0}};
    PhaseProfile p2{Rat(3),
                    std::nullopt,
                    {Rat(3), Rat(1), Rat(2)},
                    {Rat(1), Rat(1), Rat(1)},
                    {Rat(1), Rat(1), Rat(1)},
                    {1, 1, 1},
                    {0, 1, 0},
                    {0, 0, 0}};
    return EquilibriumTrajectory(net, {p1, p2});
}

// The direct arc fills its storage and spillback throttles the middle node.
EquilibriumTrajectory spillback_run() {
    Network net = two_route(Rat(2));
    PhaseProfile p1{Rat(0),
                    Rat(6),
                    {Rat(3), Rat(3), Rat(0)},
                    {Rat(1), Rat(1), Rat(3, 2)},
                    {Rat(1), Rat(1), Rat(1)},
                    {1, 1, 0},
                    {0, 0, 0},
                    {0, 0, 0}};
    PhaseProfile p2{Rat(6),
                    std::nullopt,
                    {Rat(3), Rat(3), Rat(0)},
                    {Rat(1), Rat(3, 2), Rat(3, 2)},
                    {Rat(1), Rat(2, 3), Rat(1)},
                    {1, 1, 0},
                    {0, 1, 0},
                    {0, 1, 0}};
    return EquilibriumTrajectory(net, {p1, p2});
}

}  // namespace

TEST_CASE("earliest arrival uses pure travel times") {
    Network net = two_route(Rat(1));
    auto d = earliest_arrival(net);
    CHECK(d == std::vector<Rat>{Rat(0), Rat(1), Rat(2)});
}

TEST_CASE("fair allocation splits a scarce onward supply by exit capacity") {
    CHECK(fair_allocation_factor({Rat(4), Rat(4)}, {Rat(2), Rat(6)}, Rat(4)) == Rat(1, 2));
    // Plenty of room: nothing is scaled.
    CHECK(fair_allocation_factor({Rat(1), Rat(1)}, {Rat(2), Rat(6)}, Rat(10)) == Rat(1));
    // One arc saturates at its own press before the factor binds.
    CHECK(fair_allocation_factor({Rat(1), Rat(8)}, {Rat(2), Rat(2)}, Rat(2)) == Rat(1, 2));
    CHECK(fair_allocation_factor({}, {}, Rat(5)) == Rat(1));
}

TEST_CASE("labels follow the phase slopes") {
    EquilibriumTrajectory run = queueing_run();
    CHECK(run.label(0)(Rat(0)) == Rat(0));
    CHECK(run.label(2)(Rat(0)) == Rat(2));
    CHECK(run.label(2)(Rat(3)) == Rat(11));
    CHECK(run.label(2)(Rat(5)) == Rat(13));
    CHECK(run.label(2).slope_right(Rat(1)) == Rat(3));
    CHECK(run.label(2).slope_right(Rat(4)) == Rat(1));
    CHECK(!run.horizon());
}

TEST_CASE("arc rates land on the right ground-time windows") {
    EquilibriumTrajectory run = queueing_run();
    const ArcFlows& f = run.flows(1);
    CHECK(f.rate_in(Rat(0)) == Rat(0));
    CHECK(f.rate_in(Rat(2)) == Rat(3));
    CHECK(f.rate_in(Rat(4)) == Rat(1));
    CHECK(f.rate_in(Rat(100)) == Rat(1));
    CHECK(f.rate_out(Rat(1)) == Rat(0));
    CHECK(f.rate_out(Rat(3)) == Rat(1));
    CHECK(f.rate_out(Rat(50)) == Rat(1));
    // The long detour only starts carrying flow in the second phase.
    CHECK(run.flows(2).rate_in(Rat(3)) == Rat(0));
    CHECK(run.flows(2).rate_in(Rat(4)) == Rat(2));
}

TEST_CASE("queues and loads accumulate exactly") {
    EquilibriumTrajectory run = queueing_run();
    PiecewiseLinear z = run.queue(1);
    PiecewiseLinear d = run.load(1);
    CHECK(z(Rat(2)) == Rat(0));
    CHECK(z(Rat(5)) == Rat(6));
    CHECK(d(Rat(5)) == Rat(7));
    // In steady state the queue drains at rate 0 here: inflow 1, outflow 1.
    CHECK(z.slope_right(Rat(12)) == Rat(0));
    CHECK(z.non_decreasing());
}

TEST_CASE("exit times realize the equilibrium labels") {
    EquilibriumTrajectory run = queueing_run();
    // Flow entering the queueing arc when the middle label is 4 (time 3 for
    // the walkers) must reach t exactly when the sink label says: 11.
    CHECK(run.exit_time(1, Rat(4)) == MaybeRat(Rat(11)));
    CHECK(run.waiting_time(1, Rat(5)) == MaybeRat(Rat(6)));
    // Before any congestion the arc is pure transit.
    CHECK(run.exit_time(1, Rat(1)) == MaybeRat(Rat(2)));
    // A label-matched sample along the whole first phase.
    for (int k = 0; k <= 6; ++k) {
        Rat theta(k, 2);
        CHECK(run.exit_time(1, run.label(1)(theta)) == MaybeRat(run.label(2)(theta)));
    }
}

TEST_CASE("arc classification tracks labels and storage") {
    EquilibriumTrajectory run = queueing_run();
    ArcSets early = run.arc_sets(Rat(1));
    CHECK(early.active == std::vector<char>{1, 1, 0});
    CHECK(early.resetting == std::vector<char>{0, 1, 0});
    CHECK(early.full == std::vector<char>{0, 0, 0});
    ArcSets late = run.arc_sets(Rat(4));
    CHECK(late.active == std::vector<char>{1, 1, 1});
    CHECK(late.resetting == std::vector<char>{0, 1, 0});
}

TEST_CASE("a filling arc becomes full exactly when its storage is reached") {
    EquilibriumTrajectory run = spillback_run();
    PiecewiseLinear d = run.load(1);
    CHECK(d(Rat(5)) == Rat(6));
    CHECK(d(Rat(7)) == Rat(8));
    CHECK(d(Rat(20)) == Rat(8));  // pinned at the storage bound afterwards
    CHECK(run.queue(1)(Rat(7)) == Rat(5));

    ArcSets before = run.arc_sets(Rat(5));
    CHECK(before.full == std::vector<char>{0, 0, 0});
    ArcSets after = run.arc_sets(Rat(6));
    CHECK(after.full == std::vector<char>{0, 1, 0});
    CHECK(after.resetting == std::vector<char>{0, 1, 0});
}

TEST_CASE("a full arc throttles its entry to the current outflow rate") {
    EquilibriumTrajectory run = spillback_run();
    CHECK(run.inflow_bound(1, Rat(5)) == Rat(3));
    CHECK(run.inflow_bound(1, Rat(7)) == Rat(2));
    CHECK(run.flows(1).rate_out(Rat(10)) == Rat(2));
    // The queueing arc presses its full exit capacity onto t.
    CHECK(run.push_rate(1, Rat(10)) == Rat(2));
    // Upstream, e1 presses its arrivals: no queue stands on it early on.
    CHECK(run.push_rate(0, Rat(2)) == Rat(3));
}

TEST_CASE("spillback slows the sink label without new queue growth on e2") {
    EquilibriumTrajectory run = spillback_run();
    CHECK(run.label(1)(Rat(6)) == Rat(7));
    CHECK(run.label(2)(Rat(6)) == Rat(11));
    CHECK(run.label(2).slope_right(Rat(8)) == Rat(3, 2));
    // The gap between middle and sink labels freezes at 4.
    PiecewiseLinear gap = run.label(2) - run.label(1);
    CHECK(gap(Rat(6)) == Rat(4));
    CHECK(gap(Rat(100)) == Rat(4));
}
