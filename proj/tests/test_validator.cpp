#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nashflow/engine.hpp"
#include "nashflow/validator.hpp"

#include <functional>

using namespace nashflow;

namespace {

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

// Two branches merging into a single congested outlet.
Network merge_net() {
    Network net;
    net.node_names = {"s", "a", "b", "c", "t"};
    net.source = 0;
    net.sink = 4;
    net.rate = Rat(4);
    net.arcs.push_back({0, 1, "sa", Rat(1), std::nullopt, Rat(5), Rat(2)});
    net.arcs.push_back({0, 2, "sb", Rat(1), std::nullopt, Rat(5), Rat(2)});
    net.arcs.push_back({1, 3, "ac", Rat(1), std::nullopt, Rat(5), Rat(2)});
    net.arcs.push_back({2, 3, "bc", Rat(1), std::nullopt, Rat(5), Rat(6)});
    net.arcs.push_back({3, 4, "ct", Rat(1), Rat(11), Rat(9), Rat(1)});
    return net;
}

EngineResult run(const Network& net, TerminationPolicy policy = {}) {
    auto res = validate_network(net);
    REQUIRE(std::holds_alternative<ValidatedNetwork>(res));
    return compute_nash_flow(std::get<ValidatedNetwork>(res), policy);
}

// Rebuilds the trajectory after tampering with its phases.
EquilibriumTrajectory tampered(const EngineResult& good,
                               const std::function<void(std::vector<PhaseProfile>&)>& fn) {
    std::vector<PhaseProfile> phases = good.trajectory.phases();
    fn(phases);
    return EquilibriumTrajectory(good.trajectory.network(), std::move(phases));
}

void expect_fail(const EquilibriumTrajectory& traj, const std::string& check) {
    ValidationReport report = validate_trajectory(traj, 7);
    const CheckItem* item = report.find(check);
    REQUIRE(item != nullptr);
    CHECK_MESSAGE(!item->passed, check, " should have flagged the tampered run");
}

}  // namespace

TEST_CASE("engine output passes validation") {
    for (const Network& net :
         {two_route(Rat(1)), two_route(Rat(2)), merge_net()}) {
        ValidationReport report = validate_trajectory(run(net).trajectory, 7);
        for (const CheckItem& c : report.checks) {
            INFO(c.name, ": ", c.witnesses.empty() ? "" : c.witnesses.front());
            CHECK(c.passed);
        }
    }
}

TEST_CASE("truncated runs validate on their covered range") {
    TerminationPolicy policy;
    policy.horizon = Rat(2);
    CHECK(validate_trajectory(run(two_route(Rat(1)), policy).trajectory, 7).ok());
}

TEST_CASE("raised inflow on a throttled entry is caught") {
    EngineResult good = run(two_route(Rat(2)));
    expect_fail(tampered(good,
                         [](std::vector<PhaseProfile>& p) {
                             p[1].flow_rate = {Rat(4), Rat(4), Rat(0)};
                         }),
                "entry_bound");
}

TEST_CASE("skewed split at a merge breaks fair allocation") {
    EngineResult good = run(merge_net());
    expect_fail(tampered(good,
                         [](std::vector<PhaseProfile>& p) {
                             p.back().flow_rate[2] += Rat(1, 8);
                             p.back().flow_rate[3] -= Rat(1, 8);
                         }),
                "fair_allocation");
}

TEST_CASE("a throttle with no exhausted arc behind it is unjustified") {
    // Unlimited storage, so nothing can ever block: grafting the spillback
    // profile onto the run leaves the slowdown at v with no excuse.
    Network net = two_route(Rat(2));
    net.arcs[1].storage = std::nullopt;
    EngineResult good = run(net);
    expect_fail(tampered(good,
                         [](std::vector<PhaseProfile>& p) {
                             p.resize(1);
                             p[0].duration = std::nullopt;
                             p.push_back(p[0]);
                             p[1].start = Rat(6);
                             p[0].duration = Rat(6);
                             p[1].label_rate = {Rat(1), Rat(3, 2), Rat(3, 2)};
                             p[1].factor = {Rat(1), Rat(2, 3), Rat(1)};
                         }),
                "no_slack");
}

TEST_CASE("diverted flow breaks node conservation") {
    EngineResult good = run(two_route(Rat(1)));
    expect_fail(tampered(good,
                         [](std::vector<PhaseProfile>& p) {
                             p[1].flow_rate[2] = Rat(3, 2);
                         }),
                "conservation");
}

TEST_CASE("a cycle of exhausted arcs is a gridlock witness") {
    Network net;
    net.node_names = {"s", "a", "b", "t"};
    net.source = 0;
    net.sink = 3;
    net.rate = Rat(1);
    net.arcs.push_back({0, 1, "sa", Rat(1), std::nullopt, Rat(2), Rat(1)});
    net.arcs.push_back({1, 2, "ab", Rat(1), Rat(3), Rat(2), Rat(1)});
    net.arcs.push_back({2, 1, "ba", Rat(1), Rat(3), Rat(2), Rat(1)});
    net.arcs.push_back({1, 3, "at", Rat(1), std::nullopt, Rat(2), Rat(1)});
    auto cycle = blocked_cycle(net, {0, 1, 1, 0});
    REQUIRE(cycle);
    CHECK(cycle->size() == 2);
    CHECK(!blocked_cycle(net, {0, 1, 0, 0}));
    CHECK(!blocked_cycle(net, {1, 0, 0, 1}));
}

TEST_CASE("outflow above the exit capacity is caught") {
    EngineResult good = run(two_route(Rat(1)));
    expect_fail(tampered(good,
                         [](std::vector<PhaseProfile>& p) {
                             p[1].label_rate[2] = Rat(1, 2);
                         }),
                "outflow_cap");
}

TEST_CASE("an overdraining exit makes the queue negative") {
    EngineResult good = run(two_route(Rat(1)));
    expect_fail(tampered(good,
                         [](std::vector<PhaseProfile>& p) {
                             p[0].label_rate[2] = Rat(1, 2);
                         }),
                "queue_nonnegative");
}

TEST_CASE("running a filling phase too long overruns the storage") {
    EngineResult good = run(two_route(Rat(2)));
    expect_fail(tampered(good,
                         [](std::vector<PhaseProfile>& p) {
                             p.resize(1);
                             p[0].duration = Rat(8);
                         }),
                "storage_bound");
}

TEST_CASE("labels running ahead of the traffic are caught") {
    EngineResult good = run(two_route(Rat(1)));
    // The sink label accelerates while the queueing arc stops releasing, so
    // the label overstates the route: its real exit time stays at 11.
    expect_fail(tampered(good,
                         [](std::vector<PhaseProfile>& p) {
                             p[1].label_rate[2] = Rat(2);
                             p[1].flow_rate = {Rat(3), Rat(0), Rat(3)};
                         }),
                "nash_exit");
}

TEST_CASE("flow on an unattractive arc is caught") {
    EngineResult good = run(two_route(Rat(1)));
    expect_fail(tampered(good,
                         [](std::vector<PhaseProfile>& p) {
                             p[0].flow_rate = {Rat(3), Rat(2), Rat(1)};
                         }),
                "nash_active");
}

TEST_CASE("an unjustified spillback factor fails the derivative check") {
    EngineResult good = run(two_route(Rat(1)));
    expect_fail(tampered(good,
                         [](std::vector<PhaseProfile>& p) {
                             p[1].factor[1] = Rat(1, 2);
                         }),
                "phase_thin_flow");
}

TEST_CASE("a phase cut short of its maximal step is caught") {
    EngineResult good = run(two_route(Rat(1)));
    expect_fail(tampered(good,
                         [](std::vector<PhaseProfile>& p) {
                             p[0].duration = Rat(2);
                             p[1].start = Rat(2);
                         }),
                "phase_step_max");
}

TEST_CASE("phase length lower bound from the capacities") {
    CHECK(phase_length_bound(two_route(Rat(1))) == Rat(1, 1000));
    // All phases of the solved fixtures clear it.
    for (const Network& net : {two_route(Rat(1)), two_route(Rat(2))}) {
        EngineResult res = run(net);
        Rat eps = phase_length_bound(net);
        for (const PhaseProfile& ph : res.trajectory.phases())
            if (ph.duration) CHECK(*ph.duration >= eps);
    }
}

TEST_CASE("without storage limits no spillback may appear") {
    Network net = two_route(Rat(1));
    net.arcs[1].storage = std::nullopt;
    EngineResult good = run(net);
    CHECK(validate_trajectory(good.trajectory, 7).ok());
    expect_fail(tampered(good,
                         [](std::vector<PhaseProfile>& p) {
                             p[1].factor[1] = Rat(1, 2);
                         }),
                "factor_reduction");
}
