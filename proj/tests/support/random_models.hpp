#pragma once

#include "adtmas/adt.hpp"
#include "adtmas/dsl.hpp"
#include "adtmas/eamas.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef ADTMAS_MODELS_DIR
#define ADTMAS_MODELS_DIR "models"
#endif

namespace adtmas::testing {

inline AdtModel load_model(const std::string& name) {
    std::string path = std::string(ADTMAS_MODELS_DIR) + "/" + name + ".adt";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto r = parse(ss.str(), path);
    if (!r.ok()) throw std::runtime_error("invalid model " + path + ": " + r.errors.front().str());
    return *r.model;
}

inline AdtModel parse_or_throw(const std::string& text) {
    auto r = parse(text);
    if (!r.ok()) throw std::runtime_error(r.errors.empty() ? "parse failed" : r.errors.front().str());
    return *r.model;
}

struct RandomOptions {
    int max_leaves = 6;
    bool sharing = true;
    bool conditions = true;
    bool params = false;     // declare a parameter on a defence leaf when one exists
    int max_gates = 6;
};

// A valid random ADT over every gate kind, with optional DAG sharing and counter conditions.
class RandomModels {
public:
    explicit RandomModels(unsigned seed) : rng_(seed) {}

    AdtModel next(const RandomOptions& opt = {}) {
        for (;;) {
            if (auto m = attempt(opt)) return *m;
        }
    }

private:
    struct Entry {
        NodeId id;
        Polarity pol;
    };

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

    std::optional<AdtModel> attempt(const RandomOptions& opt) {
        AdtModel m;
        m.name = "R" + std::to_string(serial_++);
        std::vector<Entry> all;
        std::vector<Entry> roots;
        int leaves = uniform(1, opt.max_leaves);
        for (int i = 0; i < leaves; ++i) {
            Node n;
            n.id = "l" + std::to_string(i);
            n.polarity = coin(0.7) ? Polarity::Attack : Polarity::Defence;
            n.attributes["cost"] = uniform(0, 9);
            n.attributes["time"] = uniform(0, 9);
            m.add(n);
            all.push_back({n.id, n.polarity});
            roots.push_back(all.back());
        }
        int gates = 0;
        const NodeKind kinds[] = {NodeKind::And, NodeKind::Or, NodeKind::Sand,
                                  NodeKind::Counter, NodeKind::NoCounter, NodeKind::SCounter};
        for (int round = 0; roots.size() > 1 || (gates == 0 && coin(0.5)); ++round) {
            if (round > 40 || gates >= opt.max_gates) return std::nullopt;
            NodeKind kind = kinds[uniform(0, 5)];
            std::size_t pick = static_cast<std::size_t>(uniform(0, static_cast<int>(roots.size()) - 1));
            Entry first = roots[pick];
            std::vector<NodeId> children{first.id};
            std::vector<NodeId> consumed{first.id};
            if (is_countering(kind)) {
                std::vector<Entry> other;
                for (const auto& r : roots)
                    if (r.pol != first.pol) other.push_back(r);
                bool from_roots = !other.empty();
                if (!from_roots && opt.sharing)
                    for (const auto& e : all)
                        if (e.pol != first.pol) other.push_back(e);
                if (other.empty()) continue;
                const Entry& second = other[static_cast<std::size_t>(uniform(0, static_cast<int>(other.size()) - 1))];
                children.push_back(second.id);
                if (from_roots) consumed.push_back(second.id);
            } else {
                std::vector<Entry> same;
                for (const auto& r : roots)
                    if (r.pol == first.pol && r.id != first.id) same.push_back(r);
                std::shuffle(same.begin(), same.end(), rng_);
                int extra = uniform(0, std::min<int>(2, static_cast<int>(same.size())));
                for (int i = 0; i < extra; ++i) {
                    children.push_back(same[static_cast<std::size_t>(i)].id);
                    consumed.push_back(same[static_cast<std::size_t>(i)].id);
                }
                if (opt.sharing && coin(0.35)) {
                    std::vector<NodeId> inner;
                    for (const auto& e : all) {
                        bool is_root = std::any_of(roots.begin(), roots.end(), [&](const Entry& r) { return r.id == e.id; });
                        if (!is_root && e.pol == first.pol) inner.push_back(e.id);
                    }
                    if (!inner.empty()) {
                        NodeId s = inner[static_cast<std::size_t>(uniform(0, static_cast<int>(inner.size()) - 1))];
                        if (std::find(children.begin(), children.end(), s) == children.end()) children.push_back(s);
                    }
                }
                std::shuffle(children.begin(), children.end(), rng_);
            }
            Node g;
            g.id = "G" + std::to_string(gates++);
            g.kind = kind;
            g.polarity = first.pol;
            g.children = children;
            if (coin(0.3)) g.attributes["time"] = uniform(1, 3);
            if (coin(0.3)) g.attributes["cost"] = uniform(1, 3);
            if (opt.conditions && is_countering(kind) && coin(0.4)) g.condition = random_condition(g);
            m.add(g);
            roots.erase(std::remove_if(roots.begin(), roots.end(),
                                       [&](const Entry& r) {
                                           return std::find(consumed.begin(), consumed.end(), r.id) != consumed.end();
                                       }),
                        roots.end());
            all.push_back({g.id, first.pol});
            roots.push_back(all.back());
        }
        m.root = roots.front().id;
        for (const auto& e : all) m.agents[e.id] = e.pol == Polarity::Attack ? (coin(0.5) ? "A1" : "A2") : (coin(0.5) ? "D1" : "D2");
        if (opt.params) {
            for (const auto& e : all)
                if (e.pol == Polarity::Defence && m.node(e.id).kind == NodeKind::Leaf) {
                    m.params.push_back({e.id, "time"});
                    break;
                }
        }
        if (!validate(m).empty()) return std::nullopt;
        return m;
    }

    Condition random_condition(const Node& g) {
        Condition c;
        const NodeId& own = g.children[0];
        const NodeId& other = g.children[1];
        bool use_value = g.kind != NodeKind::NoCounter && coin(0.5);
        c.lhs.terms.push_back(Term{TermKind::Init, {other, "time"}, 1});
        c.rhs.terms.push_back(Term{use_value ? TermKind::Value : TermKind::Init, {own, "time"}, 1});
        c.rhs.constant = uniform(0, 3);
        const Cmp ops[] = {Cmp::Gt, Cmp::Ge, Cmp::Lt, Cmp::Le};
        c.op = ops[uniform(0, 3)];
        return c;
    }

    std::mt19937 rng_;
    int serial_ = 0;
};

// Keeps only the branch of every leaf that matches the given outcome.
inline EamasNetwork force_leaves(EamasNetwork net, const std::map<NodeId, bool>& outcome) {
    for (auto& lm : net.models) {
        auto it = outcome.find(lm.id);
        if (it == outcome.end()) continue;
        std::string drop = lm.id + (it->second ? ":nok" : ":ok");
        std::erase_if(lm.transitions, [&](const Transition& t) { return t.choice == drop; });
    }
    net.finalize();
    return net;
}

// Every tree of the given polarity with exactly `leaves` leaves, written as DSL node lines.
// Non-counter gates take two or more subtrees; counter gates one subtree of each polarity.
class ShapeEnumerator {
public:
    struct Shape {
        std::string root;
        std::vector<std::string> lines;
        std::vector<std::pair<std::string, Polarity>> leaves;
    };

    std::vector<Shape> trees(int leaves, Polarity pol) {
        next_leaf_ = 0;
        next_gate_ = 0;
        return build(leaves, pol);
    }

    static std::string program(const Shape& s) {
        std::string out = "tree S {\n";
        for (const auto& l : s.lines) out += "  " + l + "\n";
        for (const auto& [id, pol] : s.leaves)
            out += "  leaf " + id + " : " + (pol == Polarity::Attack ? "attack" : "defence") + " [cost=1, time=1 min]\n";
        return out + "}\n";
    }

private:
    std::vector<Shape> build(int n, Polarity pol) {
        std::vector<Shape> out;
        if (n == 1) {
            Shape s;
            s.root = "x" + std::to_string(next_leaf_++);
            s.leaves.push_back({s.root, pol});
            out.push_back(s);
            return out;
        }
        const char* kw[] = {"and", "or", "sand"};
        for (const auto& parts : compositions(n)) {
            std::vector<std::vector<Shape>> options;
            for (int p : parts) options.push_back(build(p, pol));
            for (const auto& combo : product(options))
                for (const char* k : kw) out.push_back(gate(k, pol, combo));
        }
        const char* ckw[] = {"counter", "nocounter", "scounter"};
        for (int i = 1; i < n; ++i) {
            auto own = build(i, pol);
            auto other = build(n - i, opposite(pol));
            for (const auto& a : own)
                for (const auto& b : other)
                    for (const char* k : ckw) out.push_back(gate(k, pol, {a, b}));
        }
        return out;
    }

    Shape gate(const char* kw, Polarity pol, const std::vector<Shape>& parts) {
        Shape s;
        std::string args;
        for (const auto& p : parts) {
            Shape r = relabel(p);
            args += (args.empty() ? "" : ", ") + r.root;
            s.lines.insert(s.lines.end(), r.lines.begin(), r.lines.end());
            s.leaves.insert(s.leaves.end(), r.leaves.begin(), r.leaves.end());
        }
        s.root = "G" + std::to_string(next_gate_++);
        s.lines.push_back("node " + s.root + (pol == Polarity::Defence ? " : defence" : "") + " = " + kw + "(" + args + ")");
        return s;
    }

    // Fresh ids so repeated subtrees within one shape stay distinct.
    Shape relabel(const Shape& s) {
        std::map<std::string, std::string> ren;
        for (const auto& [id, pol] : s.leaves) ren[id] = "x" + std::to_string(next_leaf_++);
        for (const auto& l : s.lines) {
            std::string head = l.substr(5, l.find(' ', 5) - 5);
            ren[head] = "G" + std::to_string(next_gate_++);
        }
        auto sub = [&](const std::string& text) {
            std::string out, tok;
            auto flush = [&] {
                auto it = ren.find(tok);
                out += it == ren.end() ? tok : it->second;
                tok.clear();
            };
            for (char c : text) {
                if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                    tok += c;
                } else {
                    flush();
                    out += c;
                }
            }
            flush();
            return out;
        };
        Shape r;
        r.root = ren.at(s.root);
        for (const auto& l : s.lines) r.lines.push_back(sub(l));
        for (const auto& [id, pol] : s.leaves) r.leaves.push_back({ren.at(id), pol});
        return r;
    }

    static std::vector<std::vector<int>> compositions(int n) {
        std::vector<std::vector<int>> out;
        std::vector<int> cur;
        std::function<void(int)> rec = [&](int left) {
            if (left == 0) {
                if (cur.size() >= 2) out.push_back(cur);
                return;
            }
            for (int k = 1; k <= left; ++k) {
                cur.push_back(k);
                rec(left - k);
                cur.pop_back();
            }
        };
        rec(n);
        return out;
    }

    static std::vector<std::vector<Shape>> product(const std::vector<std::vector<Shape>>& options) {
        std::vector<std::vector<Shape>> out{{}};
        for (const auto& opts : options) {
            std::vector<std::vector<Shape>> next;
            for (const auto& prefix : out)
                for (const auto& o : opts) {
                    auto p = prefix;
                    p.push_back(o);
                    next.push_back(std::move(p));
                }
            out = std::move(next);
        }
        return out;
    }

    int next_leaf_ = 0;
    int next_gate_ = 0;
};

}  // namespace adtmas::testing
