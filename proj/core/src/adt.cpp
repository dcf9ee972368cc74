#include "adtmas/adt.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace adtmas {

const char* name(NodeKind k) {
    switch (k) {
        case NodeKind::Leaf: return "leaf";
        case NodeKind::And: return "and";
        case NodeKind::Or: return "or";
        case NodeKind::Sand: return "sand";
        case NodeKind::Counter: return "counter";
        case NodeKind::NoCounter: return "nocounter";
        case NodeKind::SCounter: return "scounter";
    }
    return "?";
}

const char* name(Polarity p) { return p == Polarity::Attack ? "attack" : "defence"; }

std::optional<NodeKind> gate_kind(std::string_view keyword) {
    static const std::pair<std::string_view, NodeKind> table[] = {
        {"and", NodeKind::And},         {"or", NodeKind::Or},
        {"sand", NodeKind::Sand},       {"counter", NodeKind::Counter},
        {"nocounter", NodeKind::NoCounter}, {"scounter", NodeKind::SCounter},
    };
    for (const auto& [k, v] : table)
        if (k == keyword) return v;
    return std::nullopt;
}

Rational Node::intrinsic(const std::string& attr) const {
    auto it = attributes.find(attr);
    return it == attributes.end() ? Rational(0) : it->second;
}

std::string Diagnostic::str() const {
    return rule + "(" + subject + "): " + message;
}

const Node& AdtModel::node(const NodeId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::out_of_range("unknown node '" + id + "'");
    return nodes_[it->second];
}

Node& AdtModel::node(const NodeId& id) {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::out_of_range("unknown node '" + id + "'");
    return nodes_[it->second];
}

const Node* AdtModel::find(const NodeId& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &nodes_[it->second];
}

void AdtModel::add(Node n) {
    if (index_.count(n.id)) throw std::invalid_argument("duplicate node '" + n.id + "'");
    index_.emplace(n.id, nodes_.size());
    nodes_.push_back(std::move(n));
}

void AdtModel::clear_nodes() {
    nodes_.clear();
    index_.clear();
}

std::optional<NodeId> AdtModel::infer_root() const {
    std::set<NodeId> referenced;
    for (const auto& n : nodes_)
        for (const auto& c : n.children) referenced.insert(c);
    std::optional<NodeId> root;
    for (const auto& n : nodes_) {
        if (referenced.count(n.id)) continue;
        if (root) return std::nullopt;
        root = n.id;
    }
    return root;
}

std::vector<NodeId> AdtModel::topological_order() const {
    std::vector<NodeId> order;
    std::set<NodeId> done, active;
    std::function<void(const NodeId&)> visit = [&](const NodeId& id) {
        if (done.count(id) || active.count(id) || !contains(id)) return;
        active.insert(id);
        for (const auto& c : node(id).children) visit(c);
        active.erase(id);
        done.insert(id);
        order.push_back(id);
    };
    if (!root.empty()) visit(root);
    std::vector<NodeId> rest;
    for (const auto& n : nodes_) rest.push_back(n.id);
    std::sort(rest.begin(), rest.end());
    for (const auto& id : rest) visit(id);
    return order;
}

std::vector<NodeId> AdtModel::leaves() const {
    std::vector<NodeId> out;
    for (const auto& id : topological_order())
        if (node(id).kind == NodeKind::Leaf) out.push_back(id);
    return out;
}

std::vector<NodeId> AdtModel::parents(const NodeId& id) const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_)
        if (std::find(n.children.begin(), n.children.end(), id) != n.children.end()) out.push_back(n.id);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> AdtModel::attribute_names() const {
    std::set<std::string> names{"cost", "time"};
    for (const auto& n : nodes_)
        for (const auto& [a, v] : n.attributes) names.insert(a);
    return {names.begin(), names.end()};
}

TimeUnit AdtModel::display_time_unit() const {
    TimeUnit best;
    for (const auto& n : nodes_) {
        auto it = n.units.find("time");
        if (it != n.units.end() && it->second.minutes > best.minutes) best = it->second;
    }
    return best;
}

std::optional<std::size_t> AdtModel::param_index(const AttrRef& ref) const {
    for (std::size_t i = 0; i < params.size(); ++i)
        if (params[i] == ref) return i;
    return std::nullopt;
}

bool structurally_equal(const AdtModel& a, const AdtModel& b) {
    if (a.name != b.name || a.root != b.root || a.agents != b.agents || a.params != b.params ||
        a.goal != b.goal || a.nodes_.size() != b.nodes_.size())
        return false;
    for (const auto& n : a.nodes_) {
        const Node* m = b.find(n.id);
        if (!m || !(*m == n)) return false;
    }
    return true;
}

std::vector<NodeId> determinate_children(const Node& n) {
    switch (n.kind) {
        case NodeKind::And:
        case NodeKind::Sand:
        case NodeKind::Counter:
        case NodeKind::SCounter: return n.children;
        default: return {};
    }
}

std::vector<NodeId> value_children(const Node& n) {
    if (n.kind == NodeKind::Leaf || n.children.empty()) return {};
    if (is_countering(n.kind)) return {n.children.front()};
    return n.children;
}

namespace {

void check_condition(const AdtModel& model, const Node& n, std::vector<Diagnostic>& out) {
    if (!n.condition) return;
    if (!is_countering(n.kind)) {
        out.push_back({"ConditionOnNonCounter", n.id, "conditions attach only to counter gates"});
        return;
    }
    std::set<NodeId> determinate;
    std::vector<NodeId> work = determinate_children(n);
    while (!work.empty()) {
        NodeId id = work.back();
        work.pop_back();
        if (!determinate.insert(id).second) continue;
        if (const Node* c = model.find(id))
            for (const auto& g : determinate_children(*c)) work.push_back(g);
    }
    for (const auto* side : {&n.condition->lhs, &n.condition->rhs}) {
        for (const auto& t : side->terms) {
            if (!model.contains(t.ref.node)) {
                out.push_back({"UnknownNode", t.ref.node, "condition of '" + n.id + "' refers to unknown node"});
            } else if (t.kind == TermKind::Value && !determinate.count(t.ref.node)) {
                out.push_back({"NonDeterminateValue", n.id,
                               "value(" + t.ref.str() + ") is not settled when '" + n.id + "' acts"});
            }
        }
    }
}

}  // namespace

std::vector<Diagnostic> validate(const AdtModel& model) {
    std::vector<Diagnostic> out;
    for (const auto& n : model.nodes()) {
        for (const auto& c : n.children)
            if (!model.contains(c)) out.push_back({"UnknownNode", c, "child of '" + n.id + "' is not declared"});
        for (const auto& [a, v] : n.attributes)
            if (v < 0) out.push_back({"NegativeAttribute", n.id, a + " is negative"});
        if (n.kind == NodeKind::Leaf) {
            if (!n.children.empty()) out.push_back({"LeafWithChildren", n.id, "leaves have no children"});
        } else if (is_countering(n.kind)) {
            if (n.children.size() != 2) {
                out.push_back({"Arity", n.id, std::string(name(n.kind)) + " needs exactly two children"});
            } else {
                const Node* own = model.find(n.children[0]);
                const Node* other = model.find(n.children[1]);
                if (own && own->polarity != n.polarity)
                    out.push_back({"ChildPolarity", n.id, "first child must share the gate's polarity"});
                if (other && other->polarity == n.polarity)
                    out.push_back({"ChildPolarity", n.id, "second child must have the opposite polarity"});
            }
        } else {
            if (n.children.empty()) out.push_back({"EmptyGate", n.id, "gate without children"});
            for (const auto& c : n.children) {
                const Node* child = model.find(c);
                if (child && child->polarity != n.polarity)
                    out.push_back({"ChildPolarity", n.id, "child '" + c + "' has the opposite polarity"});
            }
            std::set<NodeId> seen(n.children.begin(), n.children.end());
            if (seen.size() != n.children.size())
                out.push_back({"DuplicateChild", n.id, "a child is listed twice"});
        }
        check_condition(model, n, out);
    }

    // cycles
    std::map<NodeId, int> colour;
    std::function<bool(const NodeId&)> cyclic = [&](const NodeId& id) {
        int& c = colour[id];
        if (c == 1) return true;
        if (c == 2) return false;
        c = 1;
        if (const Node* n = model.find(id))
            for (const auto& ch : n->children)
                if (model.contains(ch) && cyclic(ch)) return true;
        colour[id] = 2;
        return false;
    };
    std::vector<NodeId> ids;
    for (const auto& n : model.nodes()) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
    for (const auto& id : ids) {
        if (colour[id] == 0 && cyclic(id)) {
            out.push_back({"Cycle", id, "child references form a cycle"});
            break;
        }
    }

    if (model.root.empty() || !model.contains(model.root)) {
        out.push_back({"RootNotUnique", model.name, "no unique root node"});
    } else {
        std::set<NodeId> reach;
        std::vector<NodeId> work{model.root};
        while (!work.empty()) {
            NodeId id = work.back();
            work.pop_back();
            if (!reach.insert(id).second) continue;
            if (const Node* n = model.find(id))
                for (const auto& c : n->children) work.push_back(c);
        }
        for (const auto& id : ids)
            if (!reach.count(id)) out.push_back({"Unreachable", id, "not reachable from root '" + model.root + "'"});
    }

    std::map<AgentId, std::set<Polarity>> sides;
    for (const auto& [node_id, agent] : model.agents) {
        const Node* n = model.find(node_id);
        if (!n) {
            out.push_back({"UnknownNode", node_id, "agent '" + agent + "' is assigned an unknown node"});
            continue;
        }
        sides[agent].insert(n->polarity);
    }
    for (const auto& id : ids)
        if (!model.agents.count(id)) out.push_back({"MissingAgent", id, "node has no agent"});
    for (const auto& [agent, pols] : sides)
        if (pols.size() > 1)
            out.push_back({"AgentPolarityViolation", agent, "agent handles both attack and defence nodes"});

    for (const auto& p : model.params)
        if (!model.contains(p.node)) out.push_back({"UnknownParam", p.node, "parameter on unknown node"});
    if (model.goal) {
        const std::string& g = *model.goal;
        auto cut = g.rfind('_');
        std::string who = cut == std::string::npos ? "" : g.substr(0, cut);
        std::string what = cut == std::string::npos ? "" : g.substr(cut + 1);
        if ((what != "ok" && what != "nok") || (who != "root" && !model.contains(who)))
            out.push_back({"UnknownGoal", g, "goal label must be root_ok, root_nok, <node>_ok or <node>_nok"});
    }

    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::map<NodeId, bool> eval_boolean(const AdtModel& model, const std::map<NodeId, bool>& leaf_outcome) {
    std::map<NodeId, bool> value;
    for (const auto& id : model.topological_order()) {
        const Node& n = model.node(id);
        auto child = [&](std::size_t i) { return value.at(n.children[i]); };
        bool v = false;
        switch (n.kind) {
            case NodeKind::Leaf: {
                auto it = leaf_outcome.find(id);
                if (it == leaf_outcome.end()) throw MissingLeafOutcome(id);
                v = it->second;
                break;
            }
            case NodeKind::And:
            case NodeKind::Sand:
                v = std::all_of(n.children.begin(), n.children.end(), [&](const NodeId& c) { return value.at(c); });
                break;
            case NodeKind::Or:
                v = std::any_of(n.children.begin(), n.children.end(), [&](const NodeId& c) { return value.at(c); });
                break;
            case NodeKind::Counter:
            case NodeKind::SCounter: v = child(0) && !child(1); break;
            case NodeKind::NoCounter: v = child(0) || !child(1); break;
        }
        value[id] = v;
    }
    return value;
}

std::map<NodeId, AgentId> single_assignment(const AdtModel& model) {
    std::map<NodeId, AgentId> out;
    for (const auto& n : model.nodes()) out[n.id] = n.polarity == Polarity::Attack ? "attacker" : "defender";
    return out;
}

std::map<NodeId, AgentId> parallel_assignment(const AdtModel& model) {
    std::map<NodeId, AgentId> out;
    for (const auto& n : model.nodes()) out[n.id] = "ag_" + n.id;
    return out;
}

}  // namespace adtmas
