#include "adtmas/adt.hpp"
#include "support/random_models.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace adtmas;
using adtmas::testing::load_model;
using adtmas::testing::parse_or_throw;

namespace {

Node leaf(const std::string& id, Polarity p = Polarity::Attack) {
    Node n;
    n.id = id;
    n.polarity = p;
    return n;
}

Node gate(const std::string& id, NodeKind k, std::vector<NodeId> ch, Polarity p = Polarity::Attack) {
    Node n;
    n.id = id;
    n.kind = k;
    n.polarity = p;
    n.children = std::move(ch);
    return n;
}

std::vector<std::string> rules(const std::vector<Diagnostic>& ds) {
    std::vector<std::string> out;
    for (const auto& d : ds) out.push_back(d.rule + ":" + d.subject);
    return out;
}

// Recursive reading of the propositional semantics, independent of eval_boolean's traversal.
bool formula(const AdtModel& m, const NodeId& id, const std::map<NodeId, bool>& leaves) {
    const Node& n = m.node(id);
    auto v = [&](std::size_t i) { return formula(m, n.children[i], leaves); };
    switch (n.kind) {
        case NodeKind::Leaf: return leaves.at(id);
        case NodeKind::And:
        case NodeKind::Sand: {
            bool r = true;
            for (std::size_t i = 0; i < n.children.size(); ++i) r = r && v(i);
            return r;
        }
        case NodeKind::Or: {
            bool r = false;
            for (std::size_t i = 0; i < n.children.size(); ++i) r = r || v(i);
            return r;
        }
        case NodeKind::Counter:
        case NodeKind::SCounter: return v(0) && !v(1);
        case NodeKind::NoCounter: return v(0) || !v(1);
    }
    return false;
}

std::vector<std::map<NodeId, bool>> all_outcomes(const AdtModel& m) {
    auto ls = m.leaves();
    std::vector<std::map<NodeId, bool>> out;
    for (unsigned bits = 0; bits < (1U << ls.size()); ++bits) {
        std::map<NodeId, bool> o;
        for (std::size_t i = 0; i < ls.size(); ++i) o[ls[i]] = ((bits >> i) & 1U) != 0;
        out.push_back(o);
    }
    return out;
}

}  // namespace

TEST(Validate, TreasureIsValid) { EXPECT_TRUE(validate(load_model("treasure")).empty()); }

TEST(Validate, SingleLeafRoot) {
    AdtModel m;
    m.add(leaf("a"));
    m.root = "a";
    m.agents["a"] = "x";
    EXPECT_TRUE(validate(m).empty());
}

TEST(Validate, AgentOnBothSides) {
    AdtModel m;
    m.add(gate("C", NodeKind::Counter, {"b", "p"}));
    m.add(leaf("b"));
    m.add(leaf("p", Polarity::Defence));
    m.root = "C";
    m.agents = {{"C", "y"}, {"b", "x"}, {"p", "x"}};
    EXPECT_EQ(rules(validate(m)), std::vector<std::string>{"AgentPolarityViolation:x"});
}

TEST(Validate, ReportsEachViolation) {
    AdtModel m;
    m.add(gate("A", NodeKind::And, {"a", "d", "a"}));
    m.add(gate("C", NodeKind::Counter, {"a"}));
    m.add(leaf("a"));
    m.add(leaf("d", Polarity::Defence));
    m.add(gate("E", NodeKind::Or, {}));
    m.node("a").attributes["cost"] = -1;
    m.root = "A";
    auto r = rules(validate(m));
    for (const char* want : {"ChildPolarity:A", "DuplicateChild:A", "Arity:C", "EmptyGate:E", "NegativeAttribute:a",
                             "Unreachable:C", "Unreachable:E", "MissingAgent:a"})
        EXPECT_NE(std::find(r.begin(), r.end(), want), r.end()) << want;
}

TEST(Validate, CycleAndConditionRules) {
    AdtModel m;
    m.add(gate("A", NodeKind::And, {"B"}));
    m.add(gate("B", NodeKind::And, {"A"}));
    m.root = "A";
    auto r = rules(validate(m));
    EXPECT_NE(std::find(r.begin(), r.end(), "Cycle:A"), r.end());

    EXPECT_THROW(parse_or_throw("tree T { node A = and(a) condition { init(a.time) > 1 } leaf a : attack }"),
                 std::runtime_error);
    // value() through an Or edge is not settled when the counter acts
    auto res = parse(R"(tree T {
      node C = counter(O, d) condition { init(d.time) > value(a.time) }
      node O = or(a, b)
      leaf a : attack
      leaf b : attack
      leaf d : defence })");
    ASSERT_FALSE(res.ok());
    EXPECT_NE(res.errors.front().message.find("NonDeterminateValue"), std::string::npos);
}

TEST(Validate, IdempotentAndOrderIndependent) {
    adtmas::testing::RandomModels gen(11);
    std::mt19937 rng(3);
    for (int i = 0; i < 50; ++i) {
        AdtModel m = gen.next();
        m.agents.erase(m.root);  // one violation to compare
        auto base = validate(m);
        EXPECT_EQ(validate(m), base);
        std::vector<Node> nodes = m.nodes();
        std::shuffle(nodes.begin(), nodes.end(), rng);
        AdtModel p = m;
        p.clear_nodes();
        for (auto& n : nodes) p.add(n);
        EXPECT_EQ(validate(p), base);
    }
}

TEST(EvalBoolean, StealJewels) {
    auto m = parse_or_throw(R"(tree SJ {
      node SJS = counter(SJ, p)
      node SJ = and(bi, fd)
      leaf bi : attack
      leaf fd : attack
      leaf p : defence })");
    EXPECT_TRUE(eval_boolean(m, {{"bi", true}, {"fd", true}, {"p", false}}).at("SJS"));
    EXPECT_FALSE(eval_boolean(m, {{"bi", true}, {"fd", true}, {"p", true}}).at("SJS"));
    EXPECT_THROW(eval_boolean(m, {{"bi", true}}), MissingLeafOutcome);
}

TEST(EvalBoolean, Conjunction) {
    auto m = parse_or_throw("tree T { node A = and(a, b, c) leaf a : attack leaf b : attack leaf c : attack }");
    EXPECT_TRUE(eval_boolean(m, {{"a", true}, {"b", true}, {"c", true}}).at("A"));
    EXPECT_FALSE(eval_boolean(m, {{"a", true}, {"b", false}, {"c", true}}).at("A"));
}

TEST(EvalBoolean, NoCounterAndSCounter) {
    auto m = parse_or_throw(R"(tree T {
      node R = or(N, S)
      node N = nocounter(a, d)
      node S = scounter(b, e)
      leaf a : attack
      leaf b : attack
      leaf d : defence
      leaf e : defence })");
    auto v = eval_boolean(m, {{"a", false}, {"b", true}, {"d", false}, {"e", true}});
    EXPECT_TRUE(v.at("N"));
    EXPECT_FALSE(v.at("S"));
    EXPECT_TRUE(v.at("R"));
}

TEST(EvalBoolean, ExhaustiveAgainstFormulasUpToFourLeaves) {
    adtmas::testing::ShapeEnumerator shapes;
    std::size_t checked = 0;
    for (int n = 1; n <= 4; ++n)
        for (Polarity pol : {Polarity::Attack, Polarity::Defence})
            for (const auto& s : shapes.trees(n, pol)) {
                AdtModel m = parse_or_throw(adtmas::testing::ShapeEnumerator::program(s));
                for (const auto& o : all_outcomes(m)) {
                    ASSERT_EQ(eval_boolean(m, o).at(m.root), formula(m, m.root, o));
                    ++checked;
                }
            }
    EXPECT_GT(checked, 1000u);
}

TEST(EvalBoolean, SharedSubtreeEqualsDuplicate) {
    auto dag = parse_or_throw(R"(tree D {
      node R = and(S1, S2)
      node S1 = sand(a1, a2)
      node S2 = sand(a2, a3)
      leaf a1 : attack
      leaf a2 : attack
      leaf a3 : attack })");
    auto tree = parse_or_throw(R"(tree D {
      node R = and(S1, S2)
      node S1 = sand(a1, a2)
      node S2 = sand(a2b, a3)
      leaf a1 : attack
      leaf a2 : attack
      leaf a2b : attack
      leaf a3 : attack })");
    for (const auto& o : all_outcomes(dag)) {
        auto o2 = o;
        o2["a2b"] = o.at("a2");
        EXPECT_EQ(eval_boolean(dag, o).at("R"), eval_boolean(tree, o2).at("R"));
    }
}

TEST(AdtModel, TopologicalOrderPutsChildrenFirst) {
    auto m = load_model("forestall");
    auto order = m.topological_order();
    std::map<NodeId, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const auto& n : m.nodes())
        for (const auto& c : n.children) EXPECT_LT(pos.at(c), pos.at(n.id));
    EXPECT_EQ(order.back(), m.root);
}

TEST(AdtModel, AgentAssignments) {
    auto m = load_model("treasure");
    auto single = single_assignment(m);
    auto par = parallel_assignment(m);
    std::set<AgentId> s, p;
    for (const auto& [n, a] : single) s.insert(a);
    for (const auto& [n, a] : par) p.insert(a);
    EXPECT_EQ(s.size(), 2u);
    EXPECT_EQ(p.size(), m.nodes().size());
    m.agents = single;
    EXPECT_TRUE(validate(m).empty());
}
