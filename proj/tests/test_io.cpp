#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nashflow/io.hpp"

using namespace nashflow;

namespace {

Network two_route() {
    Network net;
    net.node_names = {"s", "v", "t"};
    net.source = 0;
    net.sink = 2;
    net.rate = Rat(3);
    net.arcs.push_back({0, 1, "e1", Rat(1), std::nullopt, Rat(4), Rat(3)});
    net.arcs.push_back({1, 2, "e2", Rat(1), Rat(8), Rat(3), Rat(2)});
    net.arcs.push_back({1, 2, "e3", Rat(7), std::nullopt, Rat(3), Rat(2)});
    return net;
}

}  // namespace

TEST_CASE("network serialization round-trips byte for byte") {
    Network net = two_route();
    net.arcs[0].cap_in_auto = true;
    std::string text = dump_json(network_to_json(net));
    Network back = network_from_json(Json::parse(text));
    CHECK(dump_json(network_to_json(back)) == text);
    CHECK(back.node_names == net.node_names);
    CHECK(back.rate == Rat(3));
    CHECK(back.arcs[0].cap_in_auto);
    CHECK(!back.arcs[1].cap_in_auto);
    CHECK(back.arcs[1].storage == MaybeRat(Rat(8)));
    CHECK(!back.arcs[2].storage);
}

TEST_CASE("network parsing rejects malformed documents") {
    Json good = network_to_json(two_route());

    Json j = good;
    j.erase("rate");
    CHECK_THROWS_AS(network_from_json(j), ParseError);

    j = good;
    j["rate"] = "1.5";
    CHECK_THROWS_AS(network_from_json(j), ParseError);

    j = good;
    j["rate"] = 3;  // numbers must be exact strings
    CHECK_THROWS_AS(network_from_json(j), ParseError);

    j = good;
    j["arcs"][0]["head"] = "w";
    CHECK_THROWS_AS(network_from_json(j), ParseError);

    j = good;
    j["arcs"][1]["storage"] = "auto";
    CHECK_THROWS_AS(network_from_json(j), ParseError);

    j = good;
    j["nodes"] = Json::array();
    CHECK_THROWS_AS(network_from_json(j), ParseError);
}

TEST_CASE("thin flow instance parses and solutions serialize by name") {
    Json j = {{"nodes", {"s", "t"}},
              {"source", "s"},
              {"sink", "t"},
              {"demand", "2"},
              {"arcs", Json::array({{{"name", "a"},
                                     {"tail", "s"},
                                     {"head", "t"},
                                     {"cap_out", "2"},
                                     {"bound_in", "5"},
                                     {"resetting", false}}})}};
    ThinFlowInstance inst = thin_flow_from_json(j);
    CHECK(inst.arcs.size() == 1);
    CHECK(inst.arcs[0].bound_in == Rat(5));
    CHECK(!inst.arcs[0].resetting);

    auto sols = enumerate_thin_flows(inst, 4);
    REQUIRE(sols.size() == 1);
    Json out = thin_flow_solution_to_json(inst, sols[0]);
    CHECK(out["flow"]["a"] == "2");
    CHECK(out["label_rate"]["t"] == "1");
    CHECK(out["factor"]["s"] == "1");

    j["arcs"][0]["resetting"] = "no";
    CHECK_THROWS_AS(thin_flow_from_json(j), ParseError);
}

TEST_CASE("trajectory documents round-trip through json") {
    auto res = validate_network(two_route());
    REQUIRE(std::holds_alternative<ValidatedNetwork>(res));
    EngineResult run = compute_nash_flow(std::get<ValidatedNetwork>(res));
    REQUIRE(run.termination == Termination::SteadyState);

    const Network& net = run.trajectory.network();
    std::string text = dump_json(
        trajectory_to_json(net, run.trajectory.phases(), termination_name(run.termination)));
    TrajectoryDocument doc = trajectory_from_json(Json::parse(text));
    CHECK(doc.termination == "steady-state");
    CHECK(dump_json(trajectory_to_json(doc.net, doc.phases, doc.termination)) == text);

    EquilibriumTrajectory rebuilt(doc.net, doc.phases);
    for (int v = 0; v < net.node_count(); ++v)
        CHECK(rebuilt.label(v) == run.trajectory.label(v));

    // Wrong vector length is a schema error.
    Json j = Json::parse(text);
    j["phases"][0]["flow_rate"].erase(2);
    CHECK_THROWS_AS(trajectory_from_json(j), ParseError);
}

TEST_CASE("termination names cover every outcome") {
    CHECK(std::string(termination_name(Termination::SteadyState)) == "steady-state");
    CHECK(std::string(termination_name(Termination::Horizon)) == "horizon");
    CHECK(std::string(termination_name(Termination::PhaseCap)) == "phase-cap");
    CHECK(std::string(termination_name(Termination::StalledProgress)) == "stalled");
}

TEST_CASE("label plot lists one curve per node") {
    auto res = validate_network(two_route());
    EngineResult run = compute_nash_flow(std::get<ValidatedNetwork>(res));
    std::string svg = trajectory_svg(run.trajectory);
    CHECK(svg.find("<svg") == 0);
    std::size_t curves = 0;
    for (std::size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos)
        ++curves;
    CHECK(curves == 3);
    CHECK(svg.find(">t</text>") != std::string::npos);
}

TEST_CASE("validation reports serialize with witnesses") {
    auto res = validate_network(two_route());
    EngineResult run = compute_nash_flow(std::get<ValidatedNetwork>(res));
    ValidationReport rep = validate_trajectory(run.trajectory);
    Json j = report_to_json(rep);
    CHECK(j["ok"] == true);
    CHECK(j["checks"].size() == rep.checks.size());
    CHECK(j["checks"][0].contains("witnesses"));
}
