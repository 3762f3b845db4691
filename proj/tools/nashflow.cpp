// Command-line front end: validate networks, compute equilibria, solve
// single thin-flow instances, re-check trajectories, and plot labels.
//
// Exit codes: 0 success, 1 validation failure, 2 malformed input,
// 3 internal solver failure.

#include "nashflow/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace nashflow;

namespace {

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError(path + ": invalid json");
    return j;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + out_path);
}

// One line per phase plus a closing line, e.g.
// "2 phases; boundary theta = 3; steady state".
void print_summary(std::ostream& os, const EngineResult& res) {
    const Network& net = res.trajectory.network();
    const auto& phases = res.trajectory.phases();
    for (std::size_t p = 0; p < phases.size(); ++p) {
        const PhaseProfile& ph = phases[p];
        os << "phase " << p + 1 << ": [" << to_string(ph.start) << ", "
           << (ph.duration ? to_string(Rat(ph.start + *ph.duration)) : "inf")
           << ") label rates (";
        for (int v = 0; v < net.node_count(); ++v)
            os << (v ? ", " : "") << to_string(ph.label_rate[v]);
        os << ")";
        for (int v = 0; v < net.node_count(); ++v)
            if (ph.factor[v] != 1)
                os << "; c_" << net.node_names[v] << " = " << to_string(ph.factor[v]);
        os << "\n";
    }
    os << phases.size() << (phases.size() == 1 ? " phase" : " phases");
    for (std::size_t p = 0; p + 1 < phases.size(); ++p)
        os << "; boundary theta = " << to_string(Rat(phases[p].start + *phases[p].duration));
    switch (res.termination) {
        case Termination::SteadyState: os << "; steady state"; break;
        case Termination::Horizon: os << "; horizon reached"; break;
        case Termination::PhaseCap: os << "; phase cap reached"; break;
        case Termination::StalledProgress: os << "; stalled"; break;
    }
    os << "\n";
}

ValidatedNetwork validated_or_die(Network net, bool super_source) {
    if (super_source) net = add_super_source(net);
    auto res = validate_network(net);
    if (auto* bad = std::get_if<std::vector<Violation>>(&res)) {
        for (const Violation& v : *bad)
            std::cerr << "invalid network: " << v.subject << ": " << v.message << "\n";
        std::exit(1);
    }
    return std::get<ValidatedNetwork>(res);
}

int run(int argc, char** argv) {
    CLI::App app{"Exact dynamic-equilibrium solver for flows over time with "
                 "finite arc storage"};
    app.require_subcommand(1);

    std::string in_path, out_path;
    std::string horizon_text, what = "labels";
    std::size_t max_phases = 1000, stall_limit = 50;
    bool super_source = false;
    std::optional<unsigned long long> seed;

    CLI::App* validate = app.add_subcommand("validate", "check a network description");
    validate->add_option("network", in_path, "network json file")->required();

    CLI::App* solve = app.add_subcommand("solve", "compute the equilibrium trajectory");
    solve->add_option("network", in_path, "network json file")->required();
    solve->add_option("-o,--out,--output", out_path,
                      "trajectory json destination (default stdout)");
    solve->add_option("--horizon", horizon_text, "stop once the phase clock reaches this time");
    solve->add_option("--phase-cap,--max-phases", max_phases, "cap on the number of phases");
    solve->add_option("--stall", stall_limit,
                      "abort after this many consecutive near-zero steps");
    solve->add_flag("--super-source", super_source,
                    "inject a relaxed source node before solving");

    CLI::App* thin = app.add_subcommand("thin-flow", "solve one static thin-flow instance");
    thin->add_option("instance", in_path, "instance json file")->required();
    thin->add_option("-o,--out,--output", out_path, "solution json destination (default stdout)");

    CLI::App* check = app.add_subcommand("check", "re-derive every equilibrium condition");
    check->add_option("trajectory", in_path, "trajectory json file")->required();
    check->add_option("-o,--out,--output", out_path, "report json destination (default stdout)");
    check->add_option("--seed", seed, "seed for the extra spot-check sample points");

    CLI::App* plot = app.add_subcommand("plot", "render trajectory curves as svg");
    plot->add_option("trajectory", in_path, "trajectory json file")->required();
    plot->add_option("-o,--out,--output", out_path, "svg destination (default stdout)");
    plot->add_option("--what", what, "labels, queues, or loads")
        ->check(CLI::IsMember({"labels", "queues", "loads"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Fold usage errors into the malformed-input exit code; --help stays 0.
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (validate->parsed()) {
        (void)validated_or_die(network_from_json(load_json(in_path)), false);
        std::cout << "ok\n";
        return 0;
    }

    if (solve->parsed()) {
        ValidatedNetwork net = validated_or_die(network_from_json(load_json(in_path)),
                                                super_source);
        TerminationPolicy policy;
        policy.max_phases = max_phases;
        policy.stall_limit = stall_limit;
        if (!horizon_text.empty()) {
            std::optional<Rat> h = parse_rational(horizon_text);
            if (!h || *h <= 0) throw ParseError("--horizon: not a positive exact number");
            policy.horizon = *h;
        }
        EngineResult res = compute_nash_flow(net, policy);
        emit(out_path, dump_json(trajectory_to_json(res.trajectory.network(),
                                                    res.trajectory.phases(),
                                                    termination_name(res.termination))));
        // The summary goes wherever the document does not.
        print_summary(out_path.empty() || out_path == "-" ? std::cerr : std::cout, res);
        return 0;
    }

    if (thin->parsed()) {
        ThinFlowInstance inst = thin_flow_from_json(load_json(in_path));
        std::optional<ThinFlowSolution> sol = solve_thin_flow(inst);
        if (!sol) {
            std::cerr << "no thin flow found\n";
            return 1;
        }
        Json out = thin_flow_solution_to_json(inst, *sol);
        emit(out_path, dump_json(out));
        return out["verified"] == true ? 0 : 1;
    }

    if (check->parsed()) {
        TrajectoryDocument doc = trajectory_from_json(load_json(in_path));
        EquilibriumTrajectory traj(doc.net, doc.phases);
        ValidationReport report = validate_trajectory(traj, seed);
        emit(out_path, dump_json(report_to_json(report)));
        return report.ok() ? 0 : 1;
    }

    TrajectoryDocument doc = trajectory_from_json(load_json(in_path));
    EquilibriumTrajectory traj(doc.net, doc.phases);
    PlotKind kind = what == "queues" ? PlotKind::Queues
                    : what == "loads" ? PlotKind::Loads
                                      : PlotKind::Labels;
    emit(out_path, trajectory_svg(traj, kind));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const EngineError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
