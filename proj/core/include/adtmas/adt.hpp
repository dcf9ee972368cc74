#pragma once

#include "adtmas/affine.hpp"
#include "adtmas/rational.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace adtmas {

using NodeId = std::string;
using AgentId = std::string;

enum class NodeKind { Leaf, And, Or, Sand, Counter, NoCounter, SCounter };
enum class Polarity { Attack, Defence };

const char* name(NodeKind k);
const char* name(Polarity p);
std::optional<NodeKind> gate_kind(std::string_view keyword);
inline Polarity opposite(Polarity p) { return p == Polarity::Attack ? Polarity::Defence : Polarity::Attack; }
inline bool is_countering(NodeKind k) {
    return k == NodeKind::Counter || k == NodeKind::NoCounter || k == NodeKind::SCounter;
}

struct AttrRef {
    NodeId node;
    std::string attr;
    friend auto operator<=>(const AttrRef&, const AttrRef&) = default;
    std::string str() const { return node + "." + attr; }
};

enum class TermKind { Init, Value };

struct Term {
    TermKind kind = TermKind::Init;
    AttrRef ref;
    Rational coeff = 1;
    friend bool operator==(const Term&, const Term&) = default;
};

struct LinearSide {
    Rational constant = 0;
    std::vector<Term> terms;
    friend bool operator==(const LinearSide&, const LinearSide&) = default;
};

struct Condition {
    LinearSide lhs;
    Cmp op = Cmp::Gt;
    LinearSide rhs;
    friend bool operator==(const Condition&, const Condition&) = default;
};

// Display unit attached to a time literal, in minutes per unit.
struct TimeUnit {
    std::string symbol = "min";
    Rational minutes = 1;
    friend bool operator==(const TimeUnit&, const TimeUnit&) = default;
};

struct Node {
    NodeId id;
    NodeKind kind = NodeKind::Leaf;
    Polarity polarity = Polarity::Attack;
    std::vector<NodeId> children;
    std::map<std::string, Rational> attributes;   // intrinsic values; time in minutes
    std::map<std::string, TimeUnit> units;        // written unit per attribute, when not minutes
    std::optional<Condition> condition;

    Rational intrinsic(const std::string& attr) const;
    friend bool operator==(const Node&, const Node&) = default;
};

struct Diagnostic {
    std::string rule;
    std::string subject;  // node or agent
    std::string message;
    friend auto operator<=>(const Diagnostic&, const Diagnostic&) = default;
    std::string str() const;
};

class AdtModel {
public:
    std::string name = "T";
    NodeId root;
    std::map<NodeId, AgentId> agents;
    std::vector<AttrRef> params;
    std::optional<std::string> goal;

    const std::vector<Node>& nodes() const { return nodes_; }
    bool contains(const NodeId& id) const { return index_.count(id) != 0; }
    const Node& node(const NodeId& id) const;
    Node& node(const NodeId& id);
    const Node* find(const NodeId& id) const;
    void add(Node n);
    void clear_nodes();

    // Unique node with in-degree 0, if any.
    std::optional<NodeId> infer_root() const;
    // Children before parents; deterministic.
    std::vector<NodeId> topological_order() const;
    std::vector<NodeId> leaves() const;
    std::vector<NodeId> parents(const NodeId& id) const;
    // Attribute names used anywhere, always including cost and time.
    std::vector<std::string> attribute_names() const;
    // Coarsest time unit written in the model.
    TimeUnit display_time_unit() const;
    std::optional<std::size_t> param_index(const AttrRef& ref) const;

    // Node-set equality independent of declaration order.
    friend bool structurally_equal(const AdtModel& a, const AdtModel& b);

private:
    std::vector<Node> nodes_;
    std::unordered_map<NodeId, std::size_t> index_;
};

// Children whose value term is guaranteed final when the gate's own action fires.
std::vector<NodeId> determinate_children(const Node& n);
// Children whose attributes flow into the node's own values.
std::vector<NodeId> value_children(const Node& n);

std::vector<Diagnostic> validate(const AdtModel& model);

class MissingLeafOutcome : public std::runtime_error {
public:
    explicit MissingLeafOutcome(const NodeId& id)
        : std::runtime_error("missing outcome for leaf '" + id + "'"), node(id) {}
    NodeId node;
};

std::map<NodeId, bool> eval_boolean(const AdtModel& model, const std::map<NodeId, bool>& leaf_outcome);

// Agent assignment helpers used by the CLI override.
std::map<NodeId, AgentId> single_assignment(const AdtModel& model);
std::map<NodeId, AgentId> parallel_assignment(const AdtModel& model);

}  // namespace adtmas
