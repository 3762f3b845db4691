#include "nashflow/io.hpp"

#include <algorithm>
#include <sstream>

namespace nashflow {

namespace {

Rat require_rat(const Json& j, const std::string& where) {
    if (!j.is_string()) throw ParseError(where + ": expected an exact number as a string");
    auto v = parse_rational(j.get<std::string>());
    if (!v) throw ParseError(where + ": not an exact number: " + j.get<std::string>());
    return *v;
}

MaybeRat require_rat_or_inf(const Json& j, const std::string& where) {
    if (j.is_string() && j.get<std::string>() == "inf") return std::nullopt;
    return require_rat(j, where);
}

const Json& require_field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key))
        throw ParseError(where + ": missing field '" + key + "'");
    return j.at(key);
}

int require_node(const Json& j, const std::vector<std::string>& names, const std::string& where) {
    if (!j.is_string()) throw ParseError(where + ": expected a node name");
    auto it = std::find(names.begin(), names.end(), j.get<std::string>());
    if (it == names.end()) throw ParseError(where + ": unknown node " + j.get<std::string>());
    return static_cast<int>(it - names.begin());
}

std::vector<Rat> rat_array(const Json& j, std::size_t want, const std::string& where) {
    if (!j.is_array() || j.size() != want)
        throw ParseError(where + ": expected " + std::to_string(want) + " entries");
    std::vector<Rat> out;
    for (const auto& v : j) out.push_back(require_rat(v, where));
    return out;
}

std::vector<char> bool_array(const Json& j, std::size_t want, const std::string& where) {
    if (!j.is_array() || j.size() != want)
        throw ParseError(where + ": expected " + std::to_string(want) + " entries");
    std::vector<char> out;
    for (const auto& v : j) {
        if (!v.is_boolean()) throw ParseError(where + ": expected booleans");
        out.push_back(v.get<bool>() ? 1 : 0);
    }
    return out;
}

Json rat_json_array(const std::vector<Rat>& v) {
    Json out = Json::array();
    for (const Rat& r : v) out.push_back(to_string(r));
    return out;
}

Json bool_json_array(const std::vector<char>& v) {
    Json out = Json::array();
    for (char b : v) out.push_back(b != 0);
    return out;
}

}  // namespace

Network network_from_json(const Json& j) {
    Network net;
    const Json& nodes = require_field(j, "nodes", "network");
    if (!nodes.is_array() || nodes.empty()) throw ParseError("network: 'nodes' must be a list");
    for (const auto& v : nodes) {
        if (!v.is_string()) throw ParseError("network: node names must be strings");
        net.node_names.push_back(v.get<std::string>());
    }
    net.source = require_node(require_field(j, "source", "network"), net.node_names, "source");
    net.sink = require_node(require_field(j, "sink", "network"), net.node_names, "sink");
    net.rate = require_rat(require_field(j, "rate", "network"), "rate");
    const Json& arcs = require_field(j, "arcs", "network");
    if (!arcs.is_array()) throw ParseError("network: 'arcs' must be a list");
    for (const auto& a : arcs) {
        ArcParams arc;
        const Json& name = require_field(a, "name", "arc");
        if (!name.is_string()) throw ParseError("arc: 'name' must be a string");
        arc.name = name.get<std::string>();
        std::string where = "arc " + arc.name;
        arc.tail = require_node(require_field(a, "tail", where), net.node_names, where);
        arc.head = require_node(require_field(a, "head", where), net.node_names, where);
        arc.transit = require_rat(require_field(a, "transit", where), where);
        arc.storage = require_rat_or_inf(require_field(a, "storage", where), where);
        const Json& ci = require_field(a, "cap_in", where);
        if (ci.is_string() && ci.get<std::string>() == "auto") {
            arc.cap_in_auto = true;
            arc.cap_in = Rat(0);
        } else {
            arc.cap_in = require_rat(ci, where);
        }
        arc.cap_out = require_rat(require_field(a, "cap_out", where), where);
        net.arcs.push_back(std::move(arc));
    }
    return net;
}

Json network_to_json(const Network& net) {
    Json j;
    j["nodes"] = net.node_names;
    j["source"] = net.node_names[net.source];
    j["sink"] = net.node_names[net.sink];
    j["rate"] = to_string(net.rate);
    j["arcs"] = Json::array();
    for (const ArcParams& a : net.arcs) {
        Json arc;
        arc["name"] = a.name;
        arc["tail"] = net.node_names[a.tail];
        arc["head"] = net.node_names[a.head];
        arc["transit"] = to_string(a.transit);
        arc["storage"] = to_string(a.storage);
        arc["cap_in"] = a.cap_in_auto ? std::string("auto") : to_string(a.cap_in);
        arc["cap_out"] = to_string(a.cap_out);
        j["arcs"].push_back(std::move(arc));
    }
    return j;
}

ThinFlowInstance thin_flow_from_json(const Json& j) {
    ThinFlowInstance inst;
    const Json& nodes = require_field(j, "nodes", "instance");
    if (!nodes.is_array() || nodes.empty()) throw ParseError("instance: 'nodes' must be a list");
    for (const auto& v : nodes) {
        if (!v.is_string()) throw ParseError("instance: node names must be strings");
        inst.node_names.push_back(v.get<std::string>());
    }
    inst.source =
        require_node(require_field(j, "source", "instance"), inst.node_names, "source");
    inst.sink = require_node(require_field(j, "sink", "instance"), inst.node_names, "sink");
    inst.demand = require_rat(require_field(j, "demand", "instance"), "demand");
    const Json& arcs = require_field(j, "arcs", "instance");
    if (!arcs.is_array()) throw ParseError("instance: 'arcs' must be a list");
    for (const auto& a : arcs) {
        TfArc arc;
        const Json& name = require_field(a, "name", "arc");
        if (!name.is_string()) throw ParseError("arc: 'name' must be a string");
        arc.name = name.get<std::string>();
        std::string where = "arc " + arc.name;
        arc.tail = require_node(require_field(a, "tail", where), inst.node_names, where);
        arc.head = require_node(require_field(a, "head", where), inst.node_names, where);
        arc.cap_out = require_rat(require_field(a, "cap_out", where), where);
        arc.bound_in = require_rat(require_field(a, "bound_in", where), where);
        const Json& r = require_field(a, "resetting", where);
        if (!r.is_boolean()) throw ParseError(where + ": 'resetting' must be a boolean");
        arc.resetting = r.get<bool>();
        inst.arcs.push_back(std::move(arc));
    }
    return inst;
}

Json thin_flow_solution_to_json(const ThinFlowInstance& inst, const ThinFlowSolution& sol) {
    Json j;
    j["flow"] = Json::object();
    for (std::size_t e = 0; e < inst.arcs.size(); ++e)
        j["flow"][inst.arcs[e].name] = to_string(sol.flow[e]);
    j["label_rate"] = Json::object();
    j["factor"] = Json::object();
    for (std::size_t v = 0; v < inst.node_names.size(); ++v) {
        j["label_rate"][inst.node_names[v]] = to_string(sol.label[v]);
        j["factor"][inst.node_names[v]] = to_string(sol.factor[v]);
    }
    std::vector<TfViolation> bad = verify_thin_flow(inst, sol);
    j["verified"] = bad.empty();
    j["violations"] = Json::array();
    for (const TfViolation& v : bad) {
        Json item;
        item["condition"] = v.condition;
        item["subject"] = v.subject;
        item["detail"] = v.detail;
        j["violations"].push_back(std::move(item));
    }
    return j;
}

TrajectoryDocument trajectory_from_json(const Json& j) {
    TrajectoryDocument doc;
    doc.net = network_from_json(require_field(j, "network", "trajectory"));
    if (j.contains("termination")) {
        if (!j.at("termination").is_string())
            throw ParseError("trajectory: 'termination' must be a string");
        doc.termination = j.at("termination").get<std::string>();
    }
    const Json& phases = require_field(j, "phases", "trajectory");
    if (!phases.is_array()) throw ParseError("trajectory: 'phases' must be a list");
    const std::size_t n = doc.net.node_names.size(), m = doc.net.arcs.size();
    for (std::size_t p = 0; p < phases.size(); ++p) {
        const Json& ph = phases[p];
        std::string where = "phase " + std::to_string(p);
        PhaseProfile out;
        out.start = require_rat(require_field(ph, "start", where), where + " start");
        out.duration =
            require_rat_or_inf(require_field(ph, "duration", where), where + " duration");
        out.flow_rate = rat_array(require_field(ph, "flow_rate", where), m, where);
        out.label_rate = rat_array(require_field(ph, "label_rate", where), n, where);
        out.factor = rat_array(require_field(ph, "factor", where), n, where);
        out.active = bool_array(require_field(ph, "active", where), m, where);
        out.resetting = bool_array(require_field(ph, "resetting", where), m, where);
        out.full = bool_array(require_field(ph, "full", where), m, where);
        doc.phases.push_back(std::move(out));
    }
    return doc;
}

namespace {

Json step_table(const PiecewiseConstant& f) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < f.breakpoints().size(); ++i)
        rows.push_back(Json::array({to_string(f.breakpoints()[i]), to_string(f.values()[i])}));
    return rows;
}

Json kink_table(const PiecewiseLinear& f) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
        const Rat& t = f.breakpoints()[i];
        Rat slope = i + 1 < f.breakpoints().size()
                        ? Rat((f.values()[i + 1] - f.values()[i]) /
                              (f.breakpoints()[i + 1] - t))
                        : f.final_slope();
        rows.push_back(
            Json::array({to_string(t), to_string(f.values()[i]), to_string(slope)}));
    }
    return rows;
}

}  // namespace

Json trajectory_to_json(const Network& net, const std::vector<PhaseProfile>& phases,
                        const std::string& termination) {
    Json j;
    j["network"] = network_to_json(net);
    if (!termination.empty()) j["termination"] = termination;
    j["phases"] = Json::array();
    for (const PhaseProfile& ph : phases) {
        Json p;
        p["start"] = to_string(ph.start);
        p["duration"] = to_string(ph.duration);
        p["flow_rate"] = rat_json_array(ph.flow_rate);
        p["label_rate"] = rat_json_array(ph.label_rate);
        p["factor"] = rat_json_array(ph.factor);
        p["active"] = bool_json_array(ph.active);
        p["resetting"] = bool_json_array(ph.resetting);
        p["full"] = bool_json_array(ph.full);
        j["phases"].push_back(std::move(p));
    }
    // Derived tables per arc: rates as (time, value) steps, cumulatives and
    // queue/load as (time, value, slope) kinks. Informational only.
    EquilibriumTrajectory traj(net, phases);
    j["arcs"] = Json::object();
    for (std::size_t e = 0; e < net.arcs.size(); ++e) {
        int ei = static_cast<int>(e);
        Json a;
        a["rate_in"] = step_table(traj.flows(ei).rate_in);
        a["rate_out"] = step_table(traj.flows(ei).rate_out);
        a["cum_in"] = kink_table(traj.flows(ei).cum_in);
        a["cum_out"] = kink_table(traj.flows(ei).cum_out);
        a["queue"] = kink_table(traj.queue(ei));
        a["load"] = kink_table(traj.load(ei));
        j["arcs"][net.arcs[e].name] = std::move(a);
    }
    return j;
}

Json report_to_json(const ValidationReport& report) {
    Json j;
    j["ok"] = report.ok();
    j["checks"] = Json::array();
    for (const CheckItem& c : report.checks) {
        Json item;
        item["name"] = c.name;
        item["passed"] = c.passed;
        item["witnesses"] = c.witnesses;
        j["checks"].push_back(std::move(item));
    }
    return j;
}

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::SteadyState: return "steady-state";
        case Termination::Horizon: return "horizon";
        case Termination::PhaseCap: return "phase-cap";
        case Termination::StalledProgress: return "stalled";
    }
    return "unknown";
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string trajectory_svg(const EquilibriumTrajectory& traj, PlotKind kind) {
    const Network& net = traj.network();
    // Plot window: all phases plus a tail of the final one.
    Rat t_end = traj.phases().empty() ? Rat(10) : traj.phases().back().start;
    if (MaybeRat h = traj.horizon())
        t_end = *h;
    else
        t_end += std::max(Rat(5), Rat(t_end / 2));
    if (t_end <= 0) t_end = Rat(10);

    std::vector<std::pair<std::string, PiecewiseLinear>> curves;
    const char* axis = "arrival";
    switch (kind) {
        case PlotKind::Labels:
            for (int v = 0; v < net.node_count(); ++v)
                curves.emplace_back(net.node_names[v], traj.label(v));
            break;
        case PlotKind::Queues:
            axis = "queue";
            for (std::size_t e = 0; e < net.arcs.size(); ++e)
                curves.emplace_back(net.arcs[e].name, traj.queue(static_cast<int>(e)));
            break;
        case PlotKind::Loads:
            axis = "load";
            for (std::size_t e = 0; e < net.arcs.size(); ++e)
                curves.emplace_back(net.arcs[e].name, traj.load(static_cast<int>(e)));
            break;
    }

    Rat y_max(1);
    for (const auto& [name, f] : curves) {
        y_max = std::max(y_max, f(t_end));
        for (std::size_t i = 0; i < f.breakpoints().size(); ++i)
            if (f.breakpoints()[i] <= t_end) y_max = std::max(y_max, f.values()[i]);
    }

    const double width = 640, height = 420, mleft = 50, mbot = 40, mtop = 16, mright = 130;
    auto px = [&](const Rat& t) {
        return mleft + (width - mleft - mright) * t.convert_to<double>() /
                           t_end.convert_to<double>();
    };
    auto py = [&](const Rat& y) {
        return height - mbot -
               (height - mbot - mtop) * y.convert_to<double>() / y_max.convert_to<double>();
    };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    svg << "  <rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    svg << "  <line x1=\"" << mleft << "\" y1=\"" << height - mbot << "\" x2=\""
        << width - mright << "\" y2=\"" << height - mbot << "\" stroke=\"black\"/>\n";
    svg << "  <line x1=\"" << mleft << "\" y1=\"" << height - mbot << "\" x2=\"" << mleft
        << "\" y2=\"" << mtop << "\" stroke=\"black\"/>\n";
    svg << "  <text x=\"" << (width - mright) << "\" y=\"" << height - 12
        << "\" font-size=\"12\" text-anchor=\"end\">time (" << to_string(t_end) << ")</text>\n";
    svg << "  <text x=\"8\" y=\"" << mtop + 8 << "\" font-size=\"12\">" << axis << " ("
        << to_string(y_max) << ")</text>\n";

    for (std::size_t i = 0; i < curves.size(); ++i) {
        const char* color = palette[i % 8];
        const PiecewiseLinear& f = curves[i].second;
        std::vector<Rat> ts;
        ts.push_back(Rat(0));
        for (const Rat& b : f.breakpoints())
            if (b > 0 && b < t_end) ts.push_back(b);
        ts.push_back(t_end);
        svg << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
            << " points=\"";
        for (const Rat& t : ts) svg << px(t) << "," << py(f(t)) << " ";
        svg << "\"/>\n";
        svg << "  <text x=\"" << width - mright + 10 << "\" y=\"" << mtop + 14 + 16 * i
            << "\" font-size=\"12\" fill=\"" << color << "\">" << curves[i].first
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace nashflow
