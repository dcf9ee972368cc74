#include "adtmas/dsl.hpp"
#include "adtmas/engine.hpp"
#include "adtmas/export.hpp"
#include "adtmas/oracle.hpp"
#include "adtmas/synth.hpp"
#include "adtmas/transform.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using adtmas::Rational;
using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

enum Exit : int {
    kOk = 0,
    kSemantic = 1,
    kSyntax = 2,
    kUnreachable = 3,
    kNonAffine = 4,
    kUsage = 64,
    kNoInput = 66,
    kCantCreate = 73,
};

struct Failure {
    int code;
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{kNoInput, "cannot open '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text) || !out.flush()) throw Failure{kCantCreate, "cannot write '" + path + "'"};
}

std::string digest(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct Loaded {
    adtmas::AdtModel model;
    std::string text;
};

Loaded load(const std::string& path) {
    Loaded l;
    l.text = read_file(path);
    auto r = adtmas::parse(l.text, path);
    if (!r.ok()) {
        for (const auto& e : r.errors) std::cerr << e.str() << "\n";
        throw Failure{r.has_syntax_errors() ? kSyntax : kSemantic, ""};
    }
    l.model = std::move(*r.model);
    return l;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// `single:ALL`, `parallel:ALL`, or `agent:node,node;agent:node` overriding listed nodes.
void apply_agents(adtmas::AdtModel& m, const std::string& spec) {
    if (spec.empty()) return;
    if (spec == "single:ALL") {
        m.agents = adtmas::single_assignment(m);
    } else if (spec == "parallel:ALL") {
        m.agents = adtmas::parallel_assignment(m);
    } else {
        for (const auto& group : split(spec, ';')) {
            if (group.empty()) continue;
            auto colon = group.find(':');
            if (colon == std::string::npos || colon == 0)
                throw Failure{kUsage, "--agents: expected agent:node,... but got '" + group + "'"};
            std::string agent = group.substr(0, colon);
            for (const auto& n : split(group.substr(colon + 1), ',')) {
                if (!m.contains(n)) throw Failure{kUsage, "--agents: unknown node '" + n + "'"};
                m.agents[n] = agent;
            }
        }
    }
    auto diags = adtmas::validate(m);
    if (!diags.empty()) {
        for (const auto& d : diags) std::cerr << "--agents: " << d.str() << "\n";
        throw Failure{kSemantic, ""};
    }
}

unsigned resolve_workers(int flag) {
    if (flag > 0) return static_cast<unsigned>(flag);
    if (const char* env = std::getenv("ADTMAS_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

std::string format_value(const adtmas::AdtModel& m, const std::string& attr, const Rational& v) {
    std::string s = adtmas::to_string(v);
    if (attr != "time") return s;
    s += " min";
    adtmas::TimeUnit u = m.display_time_unit();
    if (u.minutes != 1) {
        Rational scaled = v / u.minutes;
        if (adtmas::is_integer(scaled)) s += " (" + adtmas::to_string(scaled) + " " + u.symbol + ")";
    }
    return s;
}

json stats_json(const adtmas::ExplorationStats& s) {
    return json{{"states", s.states},   {"transitions", s.transitions}, {"levels", s.levels},
                {"peak_frontier", s.peak_frontier}, {"pruned", s.pruned}, {"seconds", s.seconds},
                {"workers", s.workers}, {"reduced", s.reduced}};
}

json trace_json(const adtmas::Trace& t) {
    json steps = json::array();
    for (const auto& s : t.steps) steps.push_back({{"actor", s.actor}, {"action", s.action}, {"choices", s.choices}});
    return json{{"steps", steps}, {"choices", t.choices()}};
}

json values_json(const std::map<std::string, Rational>& values) {
    json out = json::object();
    for (const auto& [k, v] : values) out[k] = adtmas::to_string(v);
    return out;
}

void emit_report(const std::string& path, const std::string& command, const Loaded& l, json query, json result,
                 json stats) {
    if (path.empty()) return;
    json report{{"schema", "adtmas/1"},          {"version", kVersion},
                {"command", command},            {"model", l.model.name},
                {"model_digest", digest(l.text)}, {"query", std::move(query)},
                {"result", std::move(result)},   {"stats", std::move(stats)}};
    write_file(path, report.dump(2) + "\n");
}

struct Common {
    std::string file;
    std::string json_out;
    std::string agents;
    int workers = 0;
    bool no_reduction = false;
};

adtmas::EngineOptions engine_options(const Common& c) {
    adtmas::EngineOptions o;
    o.workers = resolve_workers(c.workers);
    o.reduction = !c.no_reduction;
    return o;
}

int cmd_validate(const Common& c) {
    load(c.file);
    return kOk;
}

struct CheckArgs {
    std::string query = "feasible";
    std::string attr = "time";
    std::string goal;
    bool rational = false;
};

int cmd_check(const Common& c, const CheckArgs& a) {
    Loaded l = load(c.file);
    apply_agents(l.model, c.agents);
    static const std::map<std::string, adtmas::QueryKind> kinds{{"feasible", adtmas::QueryKind::Feasible},
                                                                 {"min", adtmas::QueryKind::MinAttr},
                                                                 {"max", adtmas::QueryKind::MaxAttr},
                                                                 {"enumerate", adtmas::QueryKind::EnumerateOutcomes}};
    adtmas::Query q;
    q.kind = kinds.at(a.query);
    q.attr = a.attr;
    q.goal = !a.goal.empty() ? a.goal : l.model.goal.value_or("root_ok");
    auto names = l.model.attribute_names();
    if (std::find(names.begin(), names.end(), q.attr) == names.end())
        throw Failure{kUsage, "--attr: attribute '" + q.attr + "' is not used by the model"};

    adtmas::TransformOptions to;
    to.rational = a.rational;
    auto net = adtmas::transform(l.model, to);
    if (!net.labels.count(q.goal)) throw Failure{kUsage, "--goal: unknown label '" + q.goal + "'"};

    json query{{"kind", a.query}, {"goal", q.goal}, {"rational", a.rational}, {"agents", c.agents}};
    if (q.kind == adtmas::QueryKind::MinAttr || q.kind == adtmas::QueryKind::MaxAttr) query["attr"] = q.attr;

    adtmas::QueryResult r;
    try {
        r = adtmas::check(net, q, engine_options(c));
    } catch (const adtmas::GoalUnreachable& e) {
        emit_report(c.json_out, "check", l, query, json{{"error", "GoalUnreachable"}, {"message", e.what()}}, json::object());
        throw Failure{kUnreachable, e.what()};
    }

    json result;
    switch (q.kind) {
        case adtmas::QueryKind::Feasible:
            std::cout << (r.feasible ? "true" : "false") << "\n";
            result = {{"feasible", r.feasible}};
            if (r.feasible) result["witness"] = trace_json(r.witness);
            break;
        case adtmas::QueryKind::MinAttr:
        case adtmas::QueryKind::MaxAttr:
            std::cout << format_value(l.model, q.attr, *r.value) << "\n";
            result = {{"value", adtmas::to_string(*r.value)},
                      {"display", format_value(l.model, q.attr, *r.value)},
                      {"witness", trace_json(r.witness)}};
            break;
        case adtmas::QueryKind::EnumerateOutcomes: {
            json outs = json::array();
            for (const auto& o : r.outcomes) {
                std::cout << o.verdict;
                for (const auto& [k, v] : o.values) std::cout << " " << k << "=" << adtmas::to_string(v);
                std::cout << "\n";
                outs.push_back({{"verdict", o.verdict}, {"values", values_json(o.values)}, {"trace", trace_json(o.trace)}});
            }
            result = {{"outcomes", outs}};
            break;
        }
    }
    emit_report(c.json_out, "check", l, query, result, stats_json(r.stats));
    return kOk;
}

int cmd_synth(const Common& c, const std::string& mode) {
    Loaded l = load(c.file);
    apply_agents(l.model, c.agents);
    if (l.model.params.empty())
        throw Failure{kUsage, "synth: the model declares no parameter; add `param <node>.<attr>` to the tree"};
    adtmas::SynthesisResult r;
    try {
        r = mode == "blocking" ? adtmas::synthesize_blocking(l.model, engine_options(c))
                               : adtmas::synthesize_feasible(l.model, engine_options(c));
    } catch (const adtmas::NonAffineParameterFlow& e) {
        throw Failure{kNonAffine, e.what()};
    }
    std::string text = r.str();
    std::cout << text << "\n";
    json disjuncts = json::array();
    for (const auto& d : r.set.disjuncts) {
        json conj = json::array();
        for (const auto& k : d) conj.push_back(k.str(r.params));
        disjuncts.push_back(conj);
    }
    emit_report(c.json_out, "synth", l,
                json{{"mode", mode}, {"params", r.params}, {"goal", l.model.goal.value_or("root_ok")}, {"agents", c.agents}},
                json{{"constraint", text}, {"disjuncts", disjuncts}}, stats_json(r.stats));
    return kOk;
}

int cmd_export(const Common& c, const std::string& format, const std::string& out, bool rational) {
    Loaded l = load(c.file);
    apply_agents(l.model, c.agents);
    std::string dot;
    if (format == "dot-adt") {
        dot = adtmas::dot_adt(l.model);
    } else {
        adtmas::TransformOptions to;
        to.rational = rational;
        dot = adtmas::dot_eamas(adtmas::transform(l.model, to));
    }
    if (out.empty() || out == "-")
        std::cout << dot;
    else
        write_file(out, dot);
    return kOk;
}

int cmd_format(const Common& c, const std::string& out) {
    Loaded l = load(c.file);
    std::string text = adtmas::serialize(l.model);
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_file(out, text);
    return kOk;
}

int cmd_cross_check(const Common& c, bool rational) {
    Loaded l = load(c.file);
    apply_agents(l.model, c.agents);
    if (!l.model.params.empty()) l.model.params.clear();
    adtmas::OracleOptions oo;
    oo.rational = rational;
    adtmas::CrossCheckReport rep;
    try {
        rep = adtmas::cross_check(l.model, engine_options(c), oo);
    } catch (const std::length_error& e) {
        throw Failure{kUsage, std::string("cross-check: ") + e.what()};
    }
    std::cout << (rep.match ? "match" : "mismatch") << " (" << rep.choice_vectors << " choice vectors, "
              << rep.engine_outcomes.size() << " outcomes)\n";
    for (const auto& m : rep.mismatches) std::cout << "  " << m << "\n";
    emit_report(c.json_out, "cross-check", l, json{{"rational", rational}, {"agents", c.agents}},
                json{{"match", rep.match}, {"choice_vectors", rep.choice_vectors}, {"mismatches", rep.mismatches}},
                json::object());
    return rep.match ? kOk : kSemantic;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantitative analysis of attack-defence trees through multi-agent networks", "adtmas"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub, bool engine) {
        sub->add_option("file", common.file, "model file (.adt)")->required();
        if (!engine) return;
        sub->add_option("--agents", common.agents, "agent override: single:ALL, parallel:ALL or agent:node,...;...");
        sub->add_option("--workers", common.workers, "exploration threads (default: ADTMAS_WORKERS or all cores)")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--no-reduction", common.no_reduction, "explore every interleaving");
        sub->add_option("--json", common.json_out, "write a JSON run report");
    };

    auto* validate = app.add_subcommand("validate", "parse and validate a model");
    add_common(validate, false);

    CheckArgs check_args;
    auto* check = app.add_subcommand("check", "run a reachability or optimisation query");
    add_common(check, true);
    check->add_option("--query", check_args.query, "feasible|min|max|enumerate")
        ->check(CLI::IsMember({"feasible", "min", "max", "enumerate"}));
    check->add_option("--attr", check_args.attr, "attribute for min/max (default time)");
    check->add_option("--goal", check_args.goal, "goal label (default: the model's goal or root_ok)");
    check->add_flag("--rational", check_args.rational, "or gates attempt exactly one child");

    std::string mode = "feasible";
    auto* synth = app.add_subcommand("synth", "synthesise parameter constraints");
    add_common(synth, true);
    synth->add_option("--mode", mode, "feasible|blocking")->check(CLI::IsMember({"feasible", "blocking"}));

    std::string format = "dot-adt", out;
    bool export_rational = false;
    auto* exp = app.add_subcommand("export", "write a DOT graph");
    add_common(exp, false);
    exp->add_option("--agents", common.agents, "agent override");
    exp->add_option("--format", format, "dot-adt|dot-eamas")->check(CLI::IsMember({"dot-adt", "dot-eamas"}));
    exp->add_option("-o,--output", out, "output file (default stdout)");
    exp->add_flag("--rational", export_rational, "or gates attempt exactly one child");

    std::string fmt_out;
    auto* fmt = app.add_subcommand("format", "print the model in canonical form");
    add_common(fmt, false);
    fmt->add_option("-o,--output", fmt_out, "output file (default stdout)");

    bool cc_rational = false;
    auto* cc = app.add_subcommand("cross-check", "compare network outcomes with direct tree evaluation");
    add_common(cc, true);
    cc->add_flag("--rational", cc_rational, "or gates attempt exactly one child");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*validate) return cmd_validate(common);
        if (*check) return cmd_check(common, check_args);
        if (*synth) return cmd_synth(common, mode);
        if (*exp) return cmd_export(common, format, out, export_rational);
        if (*fmt) return cmd_format(common, fmt_out);
        if (*cc) return cmd_cross_check(common, cc_rational);
    } catch (const Failure& f) {
        if (!f.message.empty()) std::cerr << "adtmas: " << f.message << "\n";
        return f.code;
    } catch (const adtmas::NonAffineParameterFlow& e) {
        std::cerr << "adtmas: " << e.what() << "\n";
        return kNonAffine;
    } catch (const std::exception& e) {
        std::cerr << "adtmas: " << e.what() << "\n";
        return kSemantic;
    }
    return kUsage;
}
