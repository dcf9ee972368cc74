#include "adtmas/dsl.hpp"
#include "support/random_models.hpp"

#include <gtest/gtest.h>

using namespace adtmas;
using adtmas::testing::load_model;

namespace {

int count_lines(std::string_view text) { return 1 + static_cast<int>(std::count(text.begin(), text.end(), '\n')); }

void expect_spans_inside(const ParseResult& r, std::string_view text) {
    for (const auto& e : r.errors) {
        EXPECT_GE(e.span.line, 1);
        EXPECT_LE(e.span.line, count_lines(text)) << e.str();
        EXPECT_GE(e.span.column, 1);
    }
}

}  // namespace

TEST(Parse, TreasureFile) {
    AdtModel m = load_model("treasure");
    EXPECT_EQ(m.nodes().size(), 9u);
    EXPECT_EQ(m.root, "TS");
    EXPECT_EQ(m.node("TS").kind, NodeKind::Counter);
    ASSERT_TRUE(m.node("TS").condition.has_value());
    EXPECT_EQ(m.node("TS").condition->op, Cmp::Gt);
    EXPECT_EQ(m.node("b").intrinsic("time"), 60);
    EXPECT_EQ(m.node("b").intrinsic("cost"), 500);
    EXPECT_EQ(m.node("p").polarity, Polarity::Defence);
    EXPECT_EQ(m.agents.at("f"), "thief2");
    EXPECT_EQ(m.agents.at("b"), "thief1");
    ASSERT_EQ(m.params.size(), 1u);
    EXPECT_EQ(m.params[0].str(), "p.time");
}

TEST(Parse, MinimalProgram) {
    auto r = parse("tree T { leaf a : attack }");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.model->root, "a");
    EXPECT_EQ(r.model->nodes().size(), 1u);
}

TEST(Parse, UnknownChildSpan) {
    std::string text = "tree T { node X = and(a) }";
    auto r = parse(text, "t.adt");
    ASSERT_FALSE(r.ok());
    ASSERT_EQ(r.errors.size(), 1u);
    EXPECT_EQ(r.errors[0].message, "unknown node 'a'");
    EXPECT_EQ(r.errors[0].span.line, 1);
    EXPECT_EQ(r.errors[0].span.column, static_cast<int>(text.find("a)")) + 1);
    EXPECT_TRUE(r.errors[0].semantic);
    EXPECT_EQ(r.errors[0].str(), "t.adt:1:" + std::to_string(r.errors[0].span.column) + ": unknown node 'a'");
}

TEST(Parse, SyntaxErrorsCarrySpans) {
    const char* bad[] = {
        "tree T { leaf a attack }",
        "tree T { leaf a : attack [cost=] }",
        "tree { leaf a : attack }",
        "tree T { node X = maybe(a) leaf a : attack }",
        "tree T {\n  leaf a : attack [time=3 weeks]\n}",
        "tree T { leaf a : attack",
        "tree T { leaf a : attack $ }",
        "",
    };
    for (const char* text : bad) {
        auto r = parse(text);
        EXPECT_FALSE(r.ok()) << text;
        EXPECT_FALSE(r.errors.empty()) << text;
        EXPECT_TRUE(r.has_syntax_errors()) << text;
        expect_spans_inside(r, text);
    }
}

TEST(Parse, TimeUnitsConvertToMinutes) {
    auto r = parse("tree T { node A = and(a, b) [time=1 d] leaf a : attack [time=2 h] leaf b : attack [time=1/2 min] }");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.model->node("A").intrinsic("time"), 1440);
    EXPECT_EQ(r.model->node("a").intrinsic("time"), 120);
    EXPECT_EQ(r.model->node("b").intrinsic("time"), Rational(1) / 2);
    EXPECT_EQ(r.model->display_time_unit().symbol, "d");
}

TEST(Parse, DefaultAgentsSplitBySide) {
    auto r = parse("tree T { node C = counter(a, d) leaf a : attack leaf d : defence }");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.model->agents.at("C"), r.model->agents.at("a"));
    EXPECT_NE(r.model->agents.at("a"), r.model->agents.at("d"));
}

TEST(Parse, GoalAndParams) {
    auto r = parse("tree T { node C = counter(a, d) leaf a : attack leaf d : defence param d.time goal C_nok }");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.model->goal, "C_nok");
    auto bad = parse("tree T { leaf a : attack param a.time param a.time }");
    EXPECT_FALSE(bad.ok());
    auto unknown = parse("tree T { leaf a : attack param z.time }");
    EXPECT_FALSE(unknown.ok());
}

TEST(Serialize, RoundTripShippedModels) {
    for (const char* name : {"treasure", "forestall", "forestall-id", "iot-dev", "iot-dev-inc", "gain-admin",
                             "gain-admin-tla"}) {
        AdtModel m = load_model(name);
        std::string text = serialize(m);
        auto r = parse(text);
        ASSERT_TRUE(r.ok()) << name << ": " << (r.errors.empty() ? "" : r.errors[0].str());
        EXPECT_TRUE(structurally_equal(*r.model, m)) << name;
        EXPECT_EQ(serialize(*r.model), text) << name;
        EXPECT_EQ(serialize(m), text) << name;
    }
}

TEST(Serialize, RoundTripRandomModels) {
    adtmas::testing::RandomModels gen(2024);
    for (int i = 0; i < 300; ++i) {
        adtmas::testing::RandomOptions opt;
        opt.params = i % 3 == 0;
        AdtModel m = gen.next(opt);
        std::string text = serialize(m);
        auto r = parse(text);
        ASSERT_TRUE(r.ok()) << text << (r.errors.empty() ? "" : r.errors[0].str());
        EXPECT_TRUE(structurally_equal(*r.model, m)) << text;
    }
}
