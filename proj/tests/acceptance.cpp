#include "adtmas/dsl.hpp"
#include "adtmas/engine.hpp"
#include "adtmas/oracle.hpp"
#include "adtmas/synth.hpp"
#include "adtmas/transform.hpp"
#include "support/random_models.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <regex>
#include <sys/wait.h>

#ifndef ADTMAS_DATA_DIR
#define ADTMAS_DATA_DIR "tests/data"
#endif
#ifndef ADTMAS_CLI
#define ADTMAS_CLI ""
#endif

using namespace adtmas;
using adtmas::testing::load_model;

namespace {

const Rational kDay = 1440;
constexpr double kBudgetSeconds = 10.0;

class Criterion {
public:
    explicit Criterion(int id) : id_(id) {}

    void expect(bool ok, const std::string& what) {
        if (!ok) failures_.push_back(what);
        ++checks_;
    }
    template <class F>
    void guard(const std::string& what, F&& f) {
        try {
            f();
        } catch (const std::exception& e) {
            expect(false, what + ": " + e.what());
        }
    }
    bool report() const {
        bool ok = failures_.empty();
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id_ << " (" << checks_ << " checks)";
        for (const auto& f : failures_) std::cout << "\n    " << f;
        std::cout << std::endl;
        return ok;
    }

private:
    int id_;
    int checks_ = 0;
    std::vector<std::string> failures_;
};

AdtModel with_agents(AdtModel m, std::map<NodeId, AgentId> agents) {
    m.agents = std::move(agents);
    return m;
}

// Runs a case-study query and checks both the exact value and the time budget.
void expect_value(Criterion& c, const std::string& label, const AdtModel& m, QueryKind k, const std::string& attr,
                  const Rational& want) {
    c.guard(label, [&] {
        auto start = std::chrono::steady_clock::now();
        auto r = check(transform(m), Query{k, attr, "root_ok"});
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string got = r.value ? to_string(*r.value) : "none";
        c.expect(r.value == want, label + ": got " + got + ", want " + to_string(want));
        c.expect(secs < kBudgetSeconds, label + ": took " + std::to_string(secs) + " s");
    });
}

bool concrete_feasible(const AdtModel& m, const Rational& v) {
    auto inst = instantiate(m, {v});
    return check(transform(inst), Query{QueryKind::Feasible, "time", m.goal.value_or("root_ok")}).feasible;
}

template <class F>
double timed(F&& f) {
    auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void criterion1(Criterion& c) {
    auto m = load_model("forestall");
    expect_value(c, "forestall min time", m, QueryKind::MinAttr, "time", 43 * kDay);
    expect_value(c, "forestall max time single", with_agents(m, single_assignment(m)), QueryKind::MaxAttr, "time",
                 92 * kDay);
    expect_value(c, "forestall max time parallel", with_agents(m, parallel_assignment(m)), QueryKind::MaxAttr, "time",
                 55 * kDay);
    expect_value(c, "forestall min cost", m, QueryKind::MinAttr, "cost", 4000);
    expect_value(c, "forestall max cost", m, QueryKind::MaxAttr, "cost", 10500);
}

void criterion2(Criterion& c) {
    auto m = load_model("iot-dev");
    auto single = with_agents(m, single_assignment(m));
    expect_value(c, "iot-dev min cost", m, QueryKind::MinAttr, "cost", 270);
    expect_value(c, "iot-dev max cost", m, QueryKind::MaxAttr, "cost", 380);
    expect_value(c, "iot-dev min time distinct agents", m, QueryKind::MinAttr, "time", 694);
    expect_value(c, "iot-dev min time single agent", single, QueryKind::MinAttr, "time", 784);
    expect_value(c, "iot-dev max time", single, QueryKind::MaxAttr, "time", 1204);
}

void criterion3(Criterion& c) {
    auto m = load_model("gain-admin");
    expect_value(c, "gain-admin min time", m, QueryKind::MinAttr, "time", 2942);
    expect_value(c, "gain-admin max time parallel", with_agents(m, parallel_assignment(m)), QueryKind::MaxAttr, "time",
                 23070);
    expect_value(c, "gain-admin min cost", m, QueryKind::MinAttr, "cost", 100);
    expect_value(c, "gain-admin max cost", m, QueryKind::MaxAttr, "cost", 15820);
}

void criterion4(Criterion& c) {
    c.guard("treasure synthesis", [&] {
        auto m = load_model("treasure");
        std::string block, feas;
        double secs = timed([&] {
            block = synthesize_blocking(m).str();
            feas = synthesize_feasible(m).str();
        });
        c.expect(block == "0 <= p.time <= 5", "blocking: " + block);
        c.expect(feas == "p.time > 5", "feasible: " + feas);
        c.expect(!concrete_feasible(m, 5), "p.time = 5 should be infeasible");
        c.expect(concrete_feasible(m, 6), "p.time = 6 should be feasible");
        c.expect(secs < 2 * kBudgetSeconds, "synthesis took " + std::to_string(secs) + " s");
    });
}

void criterion5(Criterion& c) {
    auto synth = [&](const std::string& name, bool blocking, const std::string& want) {
        c.guard(name, [&] {
            auto m = load_model(name);
            std::string got;
            double secs = timed([&] { got = (blocking ? synthesize_blocking(m) : synthesize_feasible(m)).str(); });
            c.expect(got == want, name + (blocking ? " blocking: " : " feasible: ") + got + ", want " + want);
            c.expect(secs < kBudgetSeconds, name + ": took " + std::to_string(secs) + " s");
        });
    };
    synth("forestall-id", true, "0 <= id.time <= 1440");
    synth("forestall-id", false, "id.time > 1440");
    synth("iot-dev-inc", true, "0 <= inc.time <= 3");
    synth("iot-dev-inc", false, "inc.time > 3");
    synth("gain-admin-tla", false, "true");
    synth("gain-admin-tla", true, "false");
}

void criterion6(Criterion& c) {
    c.guard("random oracle equivalence", [&] {
        adtmas::testing::RandomModels gen(20240611);
        int matched = 0;
        for (int i = 0; i < 200; ++i) {
            AdtModel m = gen.next();
            auto rep = cross_check(m);
            if (rep.match) ++matched;
            c.expect(rep.match, "model " + std::to_string(i) + ": " + (rep.mismatches.empty() ? "" : rep.mismatches.front()));
        }
        c.expect(matched == 200, std::to_string(matched) + "/200 random models matched");
    });
    c.guard("boolean adequacy", [&] {
        adtmas::testing::ShapeEnumerator shapes;
        std::size_t count = 0, bad = 0;
        for (int n = 1; n <= 4; ++n)
            for (Polarity pol : {Polarity::Attack, Polarity::Defence})
                for (const auto& s : shapes.trees(n, pol)) {
                    ++count;
                    auto m = adtmas::testing::parse_or_throw(adtmas::testing::ShapeEnumerator::program(s));
                    auto net = transform(m);
                    auto ls = m.leaves();
                    for (unsigned bits = 0; bits < (1U << ls.size()); ++bits) {
                        std::map<NodeId, bool> o;
                        for (std::size_t i = 0; i < ls.size(); ++i) o[ls[i]] = ((bits >> i) & 1U) != 0;
                        bool expected = eval_boolean(m, o).at(m.root);
                        auto forced = adtmas::testing::force_leaves(net, o);
                        bool ok = check(forced, Query{QueryKind::Feasible, "time", "root_ok"}).feasible;
                        bool nok = check(forced, Query{QueryKind::Feasible, "time", "root_nok"}).feasible;
                        if (ok != expected || nok == expected) {
                            if (++bad <= 3) c.expect(false, "shape mismatch:\n" + serialize(m));
                        }
                    }
                }
        c.expect(bad == 0, std::to_string(bad) + " adequacy mismatches");
        c.expect(count == 2 * (1 + 6 + 75 + 1173), std::to_string(count) + " shapes enumerated");
    });
}

std::set<std::string> outcome_set(const EamasNetwork& net, const EngineOptions& opt) {
    std::set<std::string> out;
    for (const auto& o : check(net, Query{QueryKind::EnumerateOutcomes, "", "root_ok"}, opt).outcomes)
        out.insert(outcome_key(o.verdict, o.values));
    return out;
}

void criterion7(Criterion& c) {
    c.guard("worker determinism", [&] {
        std::vector<EamasNetwork> nets;
        for (const char* name : {"treasure", "forestall", "iot-dev", "gain-admin"}) nets.push_back(transform(load_model(name)));
        adtmas::testing::RandomModels gen(31337);
        for (int i = 0; i < 60; ++i) nets.push_back(transform(gen.next()));
        for (std::size_t n = 0; n < nets.size(); ++n) {
            const auto& net = nets[n];
            EngineOptions one;
            auto base = outcome_set(net, one);
            bool feasible = check(net, Query{QueryKind::Feasible}, one).feasible;
            for (unsigned w : {2U, 8U}) {
                EngineOptions many;
                many.workers = w;
                c.expect(outcome_set(net, many) == base, "outcomes differ with " + std::to_string(w) + " workers, net " +
                                                             std::to_string(n));
                if (!feasible) continue;
                for (QueryKind k : {QueryKind::MinAttr, QueryKind::MaxAttr}) {
                    auto a = check(net, Query{k, "time", "root_ok"}, one);
                    auto b = check(net, Query{k, "time", "root_ok"}, many);
                    c.expect(a.value == b.value && a.witness.steps == b.witness.steps,
                             "optimum differs with " + std::to_string(w) + " workers, net " + std::to_string(n));
                }
            }
        }
    });
    c.guard("monotone traces", [&] {
        adtmas::testing::RandomModels gen(9);
        std::mt19937 rng(2);
        std::size_t steps = 0, bad = 0;
        for (int i = 0; i < 100; ++i) {
            auto net = transform(gen.next());
            for (int walk = 0; walk < 20; ++walk) {
                GlobalState s = initial_state(net);
                for (;;) {
                    auto next = successors(net, s);
                    if (next.empty()) break;
                    const auto& t = next[std::uniform_int_distribution<std::size_t>(0, next.size() - 1)(rng)];
                    for (std::size_t v = 0; v < s.valuation.size(); ++v)
                        if (t.next.valuation[v].constant() < s.valuation[v].constant()) ++bad;
                    s = t.next;
                    ++steps;
                }
            }
        }
        c.expect(bad == 0, std::to_string(bad) + " decreasing updates over " + std::to_string(steps) + " steps");
    });
    c.guard("parallel min time", [&] {
        adtmas::testing::RandomModels gen(4711);
        for (int i = 0; i < 80; ++i) {
            AdtModel m = gen.next();
            auto ns = transform(with_agents(m, single_assignment(m)));
            if (!check(ns, Query{QueryKind::Feasible}).feasible) continue;
            auto s = check(ns, Query{QueryKind::MinAttr, "time", "root_ok"}).value;
            auto p = check(transform(with_agents(m, parallel_assignment(m))), Query{QueryKind::MinAttr, "time", "root_ok"})
                         .value;
            c.expect(p && s && *p <= *s, "parallel exceeds single on:\n" + serialize(m));
        }
    });
}

struct Run {
    int code = -1;
    std::string out;
};

Run run_cli(const std::string& args) {
    Run r;
    std::string cmd = std::string(ADTMAS_CLI) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    while (!r.out.empty() && std::isspace(static_cast<unsigned char>(r.out.back()))) r.out.pop_back();
    return r;
}

int stderr_lines(const std::string& args) {
    std::string cmd = std::string(ADTMAS_CLI) + " " + args + " 2>&1 >/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return -1;
    int lines = 0;
    int ch = 0, prev = '\n';
    while ((ch = fgetc(p)) != EOF) {
        if (ch == '\n' && prev != '\n') ++lines;
        prev = ch;
    }
    if (prev != '\n') ++lines;
    pclose(p);
    return lines;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion8(Criterion& c) {
    c.guard("round trip", [&] {
        for (const char* name : {"treasure", "forestall", "forestall-id", "iot-dev", "iot-dev-inc", "gain-admin",
                                 "gain-admin-tla"}) {
            auto m = load_model(name);
            auto text = serialize(m);
            auto r = parse(text);
            c.expect(r.ok() && structurally_equal(*r.model, m) && serialize(*r.model) == text,
                     std::string("round trip of ") + name);
        }
        adtmas::testing::RandomModels gen(2024);
        for (int i = 0; i < 300; ++i) {
            adtmas::testing::RandomOptions opt;
            opt.params = i % 3 == 0;
            auto m = gen.next(opt);
            auto r = parse(serialize(m));
            c.expect(r.ok() && structurally_equal(*r.model, m), "round trip of random model " + std::to_string(i));
        }
    });

    if (std::string(ADTMAS_CLI).empty()) {
        c.expect(false, "command-line tool not built");
        return;
    }
    const std::string models = ADTMAS_MODELS_DIR, data = ADTMAS_DATA_DIR;
    auto golden = [&](const std::string& args, int code, std::optional<std::string> out) {
        auto r = run_cli(args);
        c.expect(r.code == code, "`" + args + "` exited " + std::to_string(r.code) + ", want " + std::to_string(code));
        if (out) c.expect(r.out == *out, "`" + args + "` printed '" + r.out + "', want '" + *out + "'");
    };
    golden("validate " + models + "/treasure.adt", 0, "");
    golden("validate " + data + "/unknown_child.adt", 1, std::nullopt);
    c.expect(stderr_lines("validate " + data + "/unknown_child.adt") == 1, "unknown child gives one diagnostic");
    golden("validate " + data + "/does_not_exist.adt", 66, std::nullopt);
    golden("check " + models + "/forestall.adt --query min --attr time", 0, "61920 min (43 d)");
    golden("check " + models + "/iot-dev.adt --query min --attr time --agents single:ALL", 0, "784 min");
    golden("check " + models + "/treasure.adt --query feasible", 0, "true");
    golden("synth " + models + "/treasure.adt --mode blocking", 0, "0 <= p.time <= 5");
    golden("synth " + models + "/gain-admin.adt --mode feasible", 0, "true");
    golden("synth " + data + "/no_param.adt --mode feasible", 64, std::nullopt);

    auto dir = std::filesystem::temp_directory_path() / ("adtmas_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    auto count = [](const std::string& text, const std::regex& re) {
        return std::distance(std::sregex_iterator(text.begin(), text.end(), re), std::sregex_iterator());
    };
    struct Export {
        std::string format;
        std::regex item;
    };
    for (const auto& e : {Export{"dot-adt", std::regex(R"(^\s*"[^"]+"\s*\[)", std::regex::multiline)},
                          Export{"dot-eamas", std::regex("subgraph \"?cluster_")}}) {
        auto a = dir / (e.format + "_a.dot"), b = dir / (e.format + "_b.dot");
        golden("export " + models + "/treasure.adt --format " + e.format + " -o " + a.string(), 0, "");
        golden("export " + models + "/treasure.adt --format " + e.format + " -o " + b.string(), 0, "");
        auto ta = slurp(a);
        auto n = count(ta, e.item);
        c.expect(n == 9, e.format + ": " + std::to_string(n) + " items, want 9");
        c.expect(!ta.empty() && ta == slurp(b), e.format + ": exports differ");
    }
    std::filesystem::remove_all(dir);
}

}  // namespace

int main() {
    std::vector<void (*)(Criterion&)> all = {criterion1, criterion2, criterion3, criterion4,
                                             criterion5, criterion6, criterion7, criterion8};
    int failed = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        Criterion c(static_cast<int>(i + 1));
        all[i](c);
        if (!c.report()) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
