#pragma once

#include "adtmas/affine.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adtmas {

enum class MsgDir { Send, Receive };
enum class Payload { Ok, Nok };

const char* name(Payload p);

struct Message {
    MsgDir dir = MsgDir::Send;
    Payload payload = Payload::Ok;
    friend bool operator==(const Message&, const Message&) = default;
};

// Modification and guard expressions over attribute variables.
struct Expr {
    enum class Op { Const, Var, Add, Mul, Max };
    Op op = Op::Const;
    AffineExpr value;        // Const
    int var = -1;            // Var
    std::vector<Expr> args;  // Add, Mul (two), Max

    static Expr constant(AffineExpr v);
    static Expr variable(int index);
    static Expr sum(std::vector<Expr> terms);
    static Expr product(Expr a, Expr b);
    static Expr maximum(std::vector<Expr> terms);

    void collect_vars(std::vector<int>& out) const;
};

struct Guard {
    Expr lhs;
    Cmp op = Cmp::Gt;
    Expr rhs;
};

struct Assignment {
    int var = -1;
    Expr expr;
};

struct Transition {
    int from = 0;
    int to = 0;
    std::string action;              // sync transitions match on action and payload
    std::optional<Message> message;  // none = local (unsynchronised) action
    std::optional<Guard> guard;
    std::vector<Assignment> updates;
    std::string choice;              // nondeterministic decision recorded in traces, if any

    bool is_self_loop() const { return from == to && updates.empty(); }
};

struct LocalModel {
    std::string id;
    std::vector<std::string> locations;
    int initial = 0;
    std::vector<Transition> transitions;
    std::vector<int> ok_locations;    // success sink(s), when the model stems from a pattern
    std::vector<int> nok_locations;   // fail sink(s)

    std::vector<std::vector<int>> outgoing;  // filled by EamasNetwork::finalize
};

struct AttrDecl {
    std::string name;
    int owner = -1;  // model allowed to write it, -1 = any
    AffineExpr initial;
};

struct GoalLabel {
    int model = -1;
    std::vector<int> locations;
};

// Pruning facts for an ok label: models that must end ok for the label to hold, and the
// intrinsic values of every model whose work can flow into the labelled model.
struct GoalHint {
    std::vector<int> required;
    std::vector<std::pair<int, std::map<std::string, Rational>>> contributors;
};

class EamasNetwork {
public:
    std::vector<LocalModel> models;
    std::vector<AttrDecl> attrs;
    std::vector<std::string> params;   // symbolic parameters referenced by AffineExpr indices
    Conjunction domain;                // constraints on parameters (non-negativity)
    std::map<std::string, GoalLabel> labels;
    std::map<std::string, GoalHint> hints;
    // Set by builders whose models write only owned variables and read foreign ones only after
    // their owner stopped moving; enables reduced exploration.
    bool reduction_safe = false;

    void finalize();
    int model_index(const std::string& id) const;
    int attr_index(const std::string& name) const;

    struct Endpoint {
        int model;
        int transition;
    };
    // Matching senders for a receive transition (and vice versa), any location.
    const std::vector<Endpoint>& senders_of(const Transition& receive) const;
    const std::vector<Endpoint>& receivers_of(const Transition& send) const;

private:
    std::map<std::pair<std::string, Payload>, std::vector<Endpoint>> senders_, receivers_;
    std::map<std::string, int> model_index_, attr_index_;
};

struct GlobalState {
    std::vector<int> locations;
    std::vector<AffineExpr> valuation;
    Conjunction constraint;  // parameter region; empty when concrete

    friend bool operator==(const GlobalState&, const GlobalState&) = default;
};

struct GlobalTransition {
    std::string action;
    int sender = -1;    // model of the send half, or the single mover of a local action
    int receiver = -1;  // -1 for local actions
    int sender_transition = -1;
    int receiver_transition = -1;
    GlobalState next;
};

class NonAffineParameterFlow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownLabel : public std::runtime_error {
public:
    explicit UnknownLabel(const std::string& l) : std::runtime_error("unknown goal label '" + l + "'") {}
};

GlobalState initial_state(const EamasNetwork& net);
std::vector<GlobalTransition> successors(const EamasNetwork& net, const GlobalState& s);
bool is_goal(const EamasNetwork& net, const GlobalState& s, const std::string& label);

// ---- evaluation kernel shared with the engine

class StateView {
public:
    virtual ~StateView() = default;
    virtual int location(int model) const = 0;
    virtual const AffineExpr& value(int var) const = 0;
};

// One way to fire a local or synchronised move: variable writes plus the parameter
// constraints under which it happens.
struct Move {
    int mover = -1;            // local mover, or the receiver of a sync
    int mover_transition = -1;
    int sender = -1;           // -1 for local moves
    int sender_transition = -1;
    std::vector<std::pair<int, AffineExpr>> writes;
    Conjunction added;
};

// Moves where `model` is the local mover or the receiving side. With symbolic = false all
// values must be constants and no constraint is ever added.
void moves_of(const EamasNetwork& net, const StateView& view, const Conjunction& pc, int model, bool symbolic,
              std::vector<Move>& out);

// Evaluates an expression; alternatives arise only from max over symbolic operands.
struct Alternative {
    AffineExpr value;
    Conjunction added;
};
std::vector<Alternative> evaluate(const Expr& e, const StateView& view, const Conjunction& pc, bool symbolic);

}  // namespace adtmas
