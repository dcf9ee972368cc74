#include "adtmas/export.hpp"

#include <algorithm>
#include <sstream>

namespace adtmas {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

const char* shape(NodeKind k) {
    switch (k) {
        case NodeKind::Leaf: return "ellipse";
        case NodeKind::And: return "box";
        case NodeKind::Or: return "invtriangle";
        case NodeKind::Sand: return "box3d";
        case NodeKind::Counter: return "diamond";
        case NodeKind::NoCounter: return "Mdiamond";
        case NodeKind::SCounter: return "hexagon";
    }
    return "ellipse";
}

std::string side_str(const LinearSide& s) {
    std::string out;
    for (const auto& t : s.terms) {
        if (!out.empty()) out += " + ";
        if (t.coeff != 1) out += to_string(t.coeff) + "*";
        out += (t.kind == TermKind::Init ? "init(" : "value(") + t.ref.str() + ")";
    }
    if (s.constant != 0 || out.empty()) out += (out.empty() ? "" : " + ") + to_string(s.constant);
    return out;
}

std::string expr_str(const Expr& e, const EamasNetwork& net) {
    switch (e.op) {
        case Expr::Op::Const: return e.value.str(net.params);
        case Expr::Op::Var: return net.attrs[static_cast<std::size_t>(e.var)].name;
        case Expr::Op::Add:
        case Expr::Op::Max: {
            std::string s = e.op == Expr::Op::Max ? "max(" : "(";
            for (std::size_t i = 0; i < e.args.size(); ++i)
                s += (i ? (e.op == Expr::Op::Max ? ", " : " + ") : "") + expr_str(e.args[i], net);
            return s + ")";
        }
        case Expr::Op::Mul: return expr_str(e.args[0], net) + "*" + expr_str(e.args[1], net);
    }
    return "?";
}

}  // namespace

std::string dot_adt(const AdtModel& model) {
    std::ostringstream o;
    o << "digraph " << quote(model.name) << " {\n";
    o << "  node [style=filled, fontname=\"Helvetica\"];\n";
    for (const auto& id : model.topological_order()) {
        const Node& n = model.node(id);
        std::string label = n.id + "\n" + name(n.kind);
        for (const auto& [k, v] : n.attributes) label += "\n" + k + "=" + to_string(v);
        if (n.condition)
            label += "\n" + side_str(n.condition->lhs) + " " + symbol(n.condition->op) + " " + side_str(n.condition->rhs);
        bool attack = n.polarity == Polarity::Attack;
        o << "  " << quote(n.id) << " [label=" << quote(label) << ", shape=" << shape(n.kind)
          << ", color=" << (attack ? "red" : "green") << ", fillcolor=" << (attack ? "\"#ffe0e0\"" : "\"#e0ffe0\"")
          << "];\n";
    }
    for (const auto& id : model.topological_order()) {
        const Node& n = model.node(id);
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            o << "  " << quote(n.id) << " -> " << quote(n.children[i]);
            bool counter_edge = is_countering(n.kind) && i == 1;
            if (n.kind == NodeKind::Sand) o << " [label=\"" << i + 1 << "\"]";
            if (counter_edge) o << " [style=dashed]";
            o << ";\n";
        }
    }
    o << "}\n";
    return o.str();
}

std::string dot_eamas(const EamasNetwork& net) {
    std::ostringstream o;
    o << "digraph eamas {\n";
    o << "  compound=true;\n  node [shape=circle, fontname=\"Helvetica\", fontsize=10];\n";
    for (std::size_t m = 0; m < net.models.size(); ++m) {
        const auto& lm = net.models[m];
        o << "  subgraph " << quote("cluster_" + lm.id) << " {\n";
        o << "    label=" << quote(lm.id) << ";\n";
        for (std::size_t l = 0; l < lm.locations.size(); ++l) {
            o << "    " << quote(lm.id + "/" + lm.locations[l]) << " [label=" << quote(lm.locations[l]);
            if (static_cast<int>(l) == lm.initial) o << ", penwidth=2";
            if (std::find(lm.ok_locations.begin(), lm.ok_locations.end(), static_cast<int>(l)) != lm.ok_locations.end())
                o << ", shape=doublecircle, color=red";
            if (std::find(lm.nok_locations.begin(), lm.nok_locations.end(), static_cast<int>(l)) != lm.nok_locations.end())
                o << ", shape=doublecircle";
            o << "];\n";
        }
        for (const auto& t : lm.transitions) {
            std::string label = t.action;
            if (t.message)
                label = (t.message->dir == MsgDir::Send ? "!" : "?") + t.action + "_" + name(t.message->payload);
            if (t.guard) label += " [" + expr_str(t.guard->lhs, net) + " " + symbol(t.guard->op) + " " + expr_str(t.guard->rhs, net) + "]";
            for (const auto& u : t.updates)
                label += "\n" + net.attrs[static_cast<std::size_t>(u.var)].name + " := " + expr_str(u.expr, net);
            o << "    " << quote(lm.id + "/" + lm.locations[static_cast<std::size_t>(t.from)]) << " -> "
              << quote(lm.id + "/" + lm.locations[static_cast<std::size_t>(t.to)]) << " [label=" << quote(label) << "];\n";
        }
        o << "  }\n";
    }
    o << "}\n";
    return o.str();
}

}  // namespace adtmas
