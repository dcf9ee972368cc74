#include "adtmas/transform.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace adtmas {

namespace {

std::map<NodeId, std::set<NodeId>> value_descendants(const AdtModel& m) {
    std::map<NodeId, std::set<NodeId>> out;
    for (const auto& id : m.topological_order()) {
        auto& d = out[id];
        d.insert(id);
        for (const auto& c : value_children(m.node(id))) d.insert(out[c].begin(), out[c].end());
    }
    return out;
}

std::set<NodeId> shared_set(const AdtModel& m) {
    std::map<NodeId, int> vparents;
    for (const auto& n : m.nodes())
        for (const auto& c : value_children(n)) vparents[c]++;
    std::set<NodeId> shared;
    auto order = m.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const NodeId& id = *it;
        if (vparents[id] >= 2) shared.insert(id);
        if (shared.count(id))
            for (const auto& c : value_children(m.node(id))) shared.insert(c);
    }
    return shared;
}

class Builder {
public:
    explicit Builder(std::string id) { lm.id = std::move(id); }

    int loc(const std::string& name) {
        auto it = index_.find(name);
        if (it != index_.end()) return it->second;
        int i = static_cast<int>(lm.locations.size());
        lm.locations.push_back(name);
        index_[name] = i;
        return i;
    }
    Transition& add(int from, int to, std::string action, std::optional<Message> msg = std::nullopt) {
        Transition t;
        t.from = from;
        t.to = to;
        t.action = std::move(action);
        t.message = msg;
        lm.transitions.push_back(std::move(t));
        return lm.transitions.back();
    }
    Transition& receive(int from, int to, const NodeId& child, Payload p) {
        return add(from, to, child, Message{MsgDir::Receive, p});
    }

    LocalModel lm;

private:
    std::map<std::string, int> index_;
};

class Transformer {
public:
    Transformer(const AdtModel& m, const TransformOptions& opt) : m_(m), opt_(opt) {}

    EamasNetwork run() {
        attrs_ = m_.attribute_names();
        vdesc_ = value_descendants(m_);
        shared_ = shared_set(m_);
        for (const auto& [id, desc] : vdesc_)
            for (const auto& n : desc) agents_[id].insert(m_.agents.count(n) ? m_.agents.at(n) : n);

        if (opt_.symbolic_params) {
            for (std::size_t i = 0; i < m_.params.size(); ++i) {
                net_.params.push_back(m_.params[i].str());
                net_.domain.push_back({AffineExpr::param(static_cast<int>(i)), Cmp::Ge});
            }
        }

        order_ = m_.topological_order();
        for (std::size_t i = 0; i < order_.size(); ++i) model_of_[order_[i]] = static_cast<int>(i);
        for (const auto& id : order_) {
            for (const auto& a : attrs_) declare(id + "." + a, id);
            for (const auto& n : vdesc_[id])
                if (shared_.count(n)) declare(id + ".has." + n, id);
        }
        for (const auto& id : order_) net_.models.push_back(pattern(m_.node(id)));

        for (const auto& id : order_) {
            const LocalModel& lm = net_.models[static_cast<std::size_t>(model_of_[id])];
            net_.labels[id + "_ok"] = GoalLabel{model_of_[id], lm.ok_locations};
            net_.labels[id + "_nok"] = GoalLabel{model_of_[id], lm.nok_locations};
            net_.hints[id + "_ok"] = hint(id);
        }
        net_.labels["root_ok"] = net_.labels.at(m_.root + "_ok");
        net_.labels["root_nok"] = net_.labels.at(m_.root + "_nok");
        net_.hints["root_ok"] = net_.hints.at(m_.root + "_ok");
        net_.reduction_safe = true;
        net_.finalize();
        return std::move(net_);
    }

private:
    void declare(const std::string& name, const NodeId& owner) {
        var_[name] = static_cast<int>(net_.attrs.size());
        net_.attrs.push_back(AttrDecl{name, model_of_.at(owner), AffineExpr(Rational(0))});
    }
    int var(const NodeId& n, const std::string& a) const { return var_.at(n + "." + a); }
    int has(const NodeId& holder, const NodeId& n) const { return var_.at(holder + ".has." + n); }

    AffineExpr intrinsic_value(const NodeId& n, const std::string& a) const {
        if (opt_.symbolic_params)
            if (auto i = m_.param_index(AttrRef{n, a})) return AffineExpr::param(static_cast<int>(*i));
        return AffineExpr(m_.node(n).intrinsic(a));
    }
    Expr intrinsic(const NodeId& n, const std::string& a) const { return Expr::constant(intrinsic_value(n, a)); }

    // Groups of consumed children whose acting agents overlap (transitively).
    std::vector<std::vector<NodeId>> components(const std::vector<NodeId>& consumed) const {
        std::vector<int> parent(consumed.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
            return x;
        };
        for (std::size_t i = 0; i < consumed.size(); ++i) {
            for (std::size_t j = i + 1; j < consumed.size(); ++j) {
                const auto& a = agents_.at(consumed[i]);
                const auto& b = agents_.at(consumed[j]);
                bool overlap = std::any_of(a.begin(), a.end(), [&](const AgentId& x) { return b.count(x) != 0; });
                if (overlap) parent[static_cast<std::size_t>(find(static_cast<int>(j)))] = find(static_cast<int>(i));
            }
        }
        std::map<int, std::vector<NodeId>> groups;
        for (std::size_t i = 0; i < consumed.size(); ++i) groups[find(static_cast<int>(i))].push_back(consumed[i]);
        std::vector<std::vector<NodeId>> out;
        for (auto& [root, g] : groups) out.push_back(std::move(g));
        return out;
    }

    // Sum over a group with shared intrinsics counted once; optionally never below the largest member.
    Expr group_sum(const std::vector<NodeId>& group, const std::string& a, bool floor_at_max) const {
        std::vector<Expr> terms;
        for (const auto& c : group) terms.push_back(Expr::variable(var(c, a)));
        for (const auto& n : shared_) {
            std::vector<Expr> indicators;
            for (const auto& c : group)
                if (vdesc_.at(c).count(n)) indicators.push_back(Expr::variable(has(c, n)));
            if (indicators.size() < 2) continue;
            indicators.push_back(Expr::constant(Rational(-1)));
            Expr extra = Expr::maximum({Expr::constant(Rational(0)), Expr::sum(std::move(indicators))});
            terms.push_back(Expr::product(Expr::product(std::move(extra), intrinsic(n, a)),
                                          Expr::constant(Rational(-1))));
        }
        Expr total = Expr::sum(std::move(terms));
        if (!floor_at_max || group.size() < 2) return total;
        std::vector<Expr> options;
        for (const auto& c : group) options.push_back(Expr::variable(var(c, a)));
        options.push_back(std::move(total));
        return Expr::maximum(std::move(options));
    }

    // Values written when node X terminates after consuming `consumed`.
    std::vector<Assignment> finish(const Node& x, const std::vector<NodeId>& consumed, bool success) const {
        std::vector<Assignment> out;
        bool agent_sensitive = x.kind == NodeKind::And || x.kind == NodeKind::Or;
        for (const auto& a : attrs_) {
            Expr combined = Expr::constant(Rational(0));
            if (!consumed.empty()) {
                if (a == "time" && agent_sensitive) {
                    std::vector<Expr> per_group;
                    for (const auto& g : components(consumed)) per_group.push_back(group_sum(g, a, true));
                    combined = Expr::maximum(std::move(per_group));
                } else {
                    combined = group_sum(consumed, a, a == "time");
                }
            }
            if (success) combined = Expr::sum({std::move(combined), intrinsic(x.id, a)});
            out.push_back({var(x.id, a), std::move(combined)});
        }
        for (const auto& n : vdesc_.at(x.id)) {
            if (!shared_.count(n)) continue;
            if (n == x.id) {
                out.push_back({has(x.id, n), Expr::constant(Rational(success ? 1 : 0))});
                continue;
            }
            std::vector<Expr> seen;
            for (const auto& c : consumed)
                if (vdesc_.at(c).count(n)) seen.push_back(Expr::variable(has(c, n)));
            out.push_back({has(x.id, n), Expr::maximum(std::move(seen))});
        }
        return out;
    }

    Expr side(const LinearSide& s) const {
        std::vector<Expr> terms{Expr::constant(AffineExpr(s.constant))};
        for (const auto& t : s.terms) {
            Expr base = t.kind == TermKind::Init ? intrinsic(t.ref.node, t.ref.attr)
                                                 : Expr::variable(var(t.ref.node, t.ref.attr));
            terms.push_back(Expr::product(std::move(base), Expr::constant(AffineExpr(t.coeff))));
        }
        return Expr::sum(std::move(terms));
    }

    // Own action (success) plus, for conditional gates, the complementary move into the fail sink.
    void act(Builder& b, const Node& x, int from, int ok, int nok, const std::vector<NodeId>& consumed,
             const std::string& choice = "") {
        Transition& t = b.add(from, ok, x.id);
        t.updates = finish(x, consumed, true);
        t.choice = choice;
        if (!x.condition) return;
        Guard g{side(x.condition->lhs), x.condition->op, side(x.condition->rhs)};
        t.guard = g;
        std::vector<Cmp> negs = x.condition->op == Cmp::Eq ? std::vector<Cmp>{Cmp::Lt, Cmp::Gt}
                                                          : std::vector<Cmp>{negate(x.condition->op)};
        for (Cmp c : negs) {
            Transition& f = b.add(from, nok, x.id + "_fail");
            f.guard = Guard{g.lhs, c, g.rhs};
            f.updates = finish(x, consumed, false);
        }
    }

    std::pair<int, int> sinks(Builder& b, const Node& x) {
        int ok = b.loc(x.kind == NodeKind::Leaf ? "l1" : "l_" + x.id);
        int nok = b.loc("l'1");
        b.add(ok, ok, x.id, Message{MsgDir::Send, Payload::Ok});
        b.add(nok, nok, x.id, Message{MsgDir::Send, Payload::Nok});
        b.lm.ok_locations = {ok};
        b.lm.nok_locations = {nok};
        return {ok, nok};
    }

    void fail_on(Transition& t, const Node& x, const std::vector<NodeId>& consumed) {
        t.updates = finish(x, consumed, false);
    }

    LocalModel pattern(const Node& x) {
        Builder b(x.id);
        int l0 = b.loc("l0");
        b.lm.initial = l0;
        const auto& ch = x.children;
        switch (x.kind) {
            case NodeKind::Leaf: {
                auto [ok, nok] = sinks(b, x);
                Transition& fire = b.add(l0, ok, x.id);
                fire.updates = finish(x, {}, true);
                fire.choice = x.id + ":ok";
                // a parentless leaf fails without a message
                std::optional<Message> report;
                if (!m_.parents(x.id).empty()) report = Message{MsgDir::Send, Payload::Nok};
                Transition& fail = b.add(l0, nok, x.id, report);
                fail.choice = x.id + ":nok";
                break;
            }
            case NodeKind::And: {
                // (k, any nok so far); every child is consumed before the verdict
                std::vector<int> clean{l0}, dirty{-1};
                for (std::size_t k = 1; k <= ch.size(); ++k) {
                    clean.push_back(b.loc("l" + std::to_string(k)));
                    dirty.push_back(b.loc("l" + std::to_string(k) + "'"));
                }
                auto [ok, nok] = sinks(b, x);
                for (std::size_t k = 0; k < ch.size(); ++k) {
                    b.receive(clean[k], clean[k + 1], ch[k], Payload::Ok);
                    b.receive(clean[k], dirty[k + 1], ch[k], Payload::Nok);
                    if (k > 0) {
                        b.receive(dirty[k], dirty[k + 1], ch[k], Payload::Ok);
                        b.receive(dirty[k], dirty[k + 1], ch[k], Payload::Nok);
                    }
                }
                act(b, x, clean.back(), ok, nok, ch);
                Transition& f = b.add(dirty.back(), nok, x.id + "_fail");
                fail_on(f, x, ch);
                break;
            }
            case NodeKind::Sand: {
                std::vector<int> at{l0};
                for (std::size_t k = 1; k <= ch.size(); ++k) at.push_back(b.loc("l" + std::to_string(k)));
                auto [ok, nok] = sinks(b, x);
                for (std::size_t k = 0; k < ch.size(); ++k) {
                    b.receive(at[k], at[k + 1], ch[k], Payload::Ok);
                    Transition& f = b.receive(at[k], nok, ch[k], Payload::Nok);
                    fail_on(f, x, std::vector<NodeId>(ch.begin(), ch.begin() + static_cast<long>(k) + 1));
                }
                act(b, x, at.back(), ok, nok, ch);
                break;
            }
            case NodeKind::Or: or_pattern(b, x, l0); break;
            case NodeKind::Counter:
            case NodeKind::SCounter: {
                const NodeId& a = ch[0];
                const NodeId& d = ch[1];
                int l1 = b.loc("l1"), l2 = b.loc("l2");
                int l3 = x.kind == NodeKind::Counter ? b.loc("l3") : -1;
                auto [ok, nok] = sinks(b, x);
                b.receive(l0, l1, a, Payload::Ok);
                fail_on(b.receive(l0, nok, a, Payload::Nok), x, {a});
                b.receive(l1, l2, d, Payload::Nok);
                fail_on(b.receive(l1, nok, d, Payload::Ok), x, {a});
                act(b, x, l2, ok, nok, {a});
                if (l3 >= 0) {
                    b.receive(l0, l3, d, Payload::Ok);
                    fail_on(b.receive(l3, nok, a, Payload::Ok), x, {a});
                    fail_on(b.receive(l3, nok, a, Payload::Nok), x, {a});
                }
                break;
            }
            case NodeKind::NoCounter: {
                const NodeId& a = ch[0];
                const NodeId& d = ch[1];
                int l1 = b.loc("l1"), l2 = b.loc("l2"), l3 = b.loc("l3");
                auto [ok, nok] = sinks(b, x);
                b.receive(l0, l1, a, Payload::Ok).choice = x.id + ":via " + a;
                b.receive(l0, l2, a, Payload::Nok);
                b.receive(l0, l3, d, Payload::Nok).choice = x.id + ":via " + d;
                act(b, x, l1, ok, nok, {a});
                act(b, x, l3, ok, nok, {});
                fail_on(b.receive(l2, nok, d, Payload::Ok), x, {a});
                break;
            }
        }
        return std::move(b.lm);
    }

    static std::string subset_name(unsigned mask, std::size_t n) {
        std::string s;
        for (std::size_t i = 0; i < n; ++i) s += (mask >> i) & 1U ? '1' : '0';
        return s;
    }

    // Locations (k, attempted subset, ok seen); children taken in declared order, each received or skipped.
    void or_pattern(Builder& b, const Node& x, int l0) {
        const auto& ch = x.children;
        std::size_t n = ch.size();
        auto [ok, nok] = sinks(b, x);
        auto name = [&](std::size_t k, unsigned mask, bool seen) {
            if (k == 0) return std::string("l0");
            return "l" + std::to_string(k) + "_" + subset_name(mask, n) + (seen ? "+" : "");
        };
        struct Key {
            std::size_t k;
            unsigned mask;
            bool seen;
        };
        std::vector<Key> work{{0, 0, false}};
        std::set<std::string> done;
        while (!work.empty()) {
            Key key = work.back();
            work.pop_back();
            std::string here_name = name(key.k, key.mask, key.seen);
            if (!done.insert(here_name).second) continue;
            int here = key.k == 0 ? l0 : b.loc(here_name);
            if (key.k == n) {
                std::vector<NodeId> attempted;
                for (std::size_t i = 0; i < n; ++i)
                    if ((key.mask >> i) & 1U) attempted.push_back(ch[i]);
                if (key.seen) {
                    if (!opt_.rational || attempted.size() == 1) {
                        std::string label = x.id + ":{";
                        for (std::size_t i = 0; i < attempted.size(); ++i) label += (i ? "," : "") + attempted[i];
                        act(b, x, here, ok, nok, attempted, label + "}");
                    }
                } else if (attempted.size() == n) {
                    Transition& f = b.add(here, nok, x.id + "_fail");
                    fail_on(f, x, attempted);
                }
                continue;
            }
            unsigned bit = 1U << key.k;
            Key on_ok{key.k + 1, key.mask | bit, true};
            Key on_nok{key.k + 1, key.mask | bit, key.seen};
            Key on_skip{key.k + 1, key.mask, key.seen};
            b.receive(here, b.loc(name(on_ok.k, on_ok.mask, on_ok.seen)), ch[key.k], Payload::Ok);
            b.receive(here, b.loc(name(on_nok.k, on_nok.mask, on_nok.seen)), ch[key.k], Payload::Nok);
            b.add(here, b.loc(name(on_skip.k, on_skip.mask, on_skip.seen)), x.id + "_skip_" + ch[key.k]);
            work.push_back(on_skip);
            work.push_back(on_nok);
            work.push_back(on_ok);
        }
    }

    GoalHint hint(const NodeId& id) const {
        GoalHint h;
        std::set<NodeId> required;
        std::vector<NodeId> work{id};
        while (!work.empty()) {
            NodeId n = work.back();
            work.pop_back();
            if (!required.insert(n).second) continue;
            const Node& node = m_.node(n);
            if (node.kind == NodeKind::And || node.kind == NodeKind::Sand)
                for (const auto& c : node.children) work.push_back(c);
            if (node.kind == NodeKind::Counter || node.kind == NodeKind::SCounter) work.push_back(node.children[0]);
        }
        for (const auto& n : required) h.required.push_back(model_of_.at(n));
        for (const auto& n : vdesc_.at(id)) {
            std::map<std::string, Rational> values;
            for (const auto& a : attrs_) {
                if (opt_.symbolic_params && m_.param_index(AttrRef{n, a})) continue;
                values[a] = m_.node(n).intrinsic(a);
            }
            h.contributors.emplace_back(model_of_.at(n), std::move(values));
        }
        std::sort(h.required.begin(), h.required.end());
        std::sort(h.contributors.begin(), h.contributors.end());
        return h;
    }

    const AdtModel& m_;
    TransformOptions opt_;
    EamasNetwork net_;
    std::vector<std::string> attrs_;
    std::map<NodeId, std::set<NodeId>> vdesc_;
    std::set<NodeId> shared_;
    std::map<NodeId, std::set<AgentId>> agents_;
    std::vector<NodeId> order_;
    std::map<NodeId, int> model_of_;
    std::map<std::string, int> var_;
};

}  // namespace

ComputationSpec computation_spec(const AdtModel& model, const NodeId& node, const std::string& attr) {
    const Node& n = model.node(node);
    ComputationSpec s;
    s.intrinsic = n.intrinsic(attr);
    s.over_attempted_subset = n.kind == NodeKind::Or;
    if (is_countering(n.kind))
        s.rule = CombineRule::OwnChildOnly;
    else if (attr == "time" && (n.kind == NodeKind::And || n.kind == NodeKind::Or))
        s.rule = CombineRule::TimeC;
    else
        s.rule = CombineRule::Sum;
    return s;
}

std::vector<AgentId> acting_agents(const AdtModel& model, const NodeId& node) {
    auto vd = value_descendants(model);
    std::set<AgentId> out;
    for (const auto& n : vd.at(node)) out.insert(model.agents.count(n) ? model.agents.at(n) : n);
    return {out.begin(), out.end()};
}

std::vector<NodeId> shared_nodes(const AdtModel& model) {
    auto s = shared_set(model);
    return {s.begin(), s.end()};
}

EamasNetwork transform(const AdtModel& model, const TransformOptions& options) {
    return Transformer(model, options).run();
}

std::vector<PatternInstance> pattern_instances(const AdtModel& model, const EamasNetwork& net) {
    std::vector<PatternInstance> out;
    for (const auto& n : model.nodes()) {
        PatternInstance p;
        p.source = n.id;
        p.model = net.model_index(n.id);
        p.sends = {n.id + "_ok", n.id + "_nok"};
        for (const auto& c : n.children) {
            p.receives.push_back(c + "_ok");
            p.receives.push_back(c + "_nok");
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Diagnostic> structural_check(const EamasNetwork& net, const AdtModel& model) {
    std::vector<Diagnostic> out;
    for (const auto& n : model.nodes()) {
        int mi = -1;
        for (std::size_t i = 0; i < net.models.size(); ++i)
            if (net.models[i].id == n.id) mi = static_cast<int>(i);
        if (mi < 0) {
            out.push_back({"MissingModel", n.id, "no local model for node"});
            continue;
        }
        const LocalModel& lm = net.models[static_cast<std::size_t>(mi)];
        std::vector<bool> seen(lm.locations.size(), false);
        std::vector<int> work{lm.initial};
        while (!work.empty()) {
            int l = work.back();
            work.pop_back();
            if (seen[static_cast<std::size_t>(l)]) continue;
            seen[static_cast<std::size_t>(l)] = true;
            for (const auto& t : lm.transitions)
                if (t.from == l) work.push_back(t.to);
        }
        auto reachable = [&](const std::vector<int>& locs) {
            return std::any_of(locs.begin(), locs.end(), [&](int l) { return seen[static_cast<std::size_t>(l)]; });
        };
        if (!reachable(lm.ok_locations)) out.push_back({"MissingOkExit", n.id, "success sink unreachable"});
        if (!reachable(lm.nok_locations)) out.push_back({"MissingFailExit", n.id, "fail sink unreachable"});
        auto emits = [&](const std::vector<int>& locs, Payload p) {
            return std::any_of(lm.transitions.begin(), lm.transitions.end(), [&](const Transition& t) {
                return t.message && t.message->dir == MsgDir::Send && t.message->payload == p && t.from == t.to &&
                       std::find(locs.begin(), locs.end(), t.from) != locs.end();
            });
        };
        if (!emits(lm.ok_locations, Payload::Ok)) out.push_back({"SilentOkSink", n.id, "success sink does not report"});
        if (!emits(lm.nok_locations, Payload::Nok)) out.push_back({"SilentFailSink", n.id, "fail sink does not report"});
        for (const auto& t : lm.transitions) {
            if (!t.message || t.message->dir != MsgDir::Receive) continue;
            if (net.senders_of(t).empty())
                out.push_back({"UnmatchedReceive", n.id, "no sender for " + t.action + "_" + name(t.message->payload)});
        }
        // every child's ok report must be receivable here
        for (const auto& c : n.children) {
            bool hears = std::any_of(lm.transitions.begin(), lm.transitions.end(), [&](const Transition& t) {
                return t.message && t.message->dir == MsgDir::Receive && t.message->payload == Payload::Ok && t.action == c;
            });
            if (!hears) out.push_back({"MissingFanOut", n.id, "never receives " + c + "_ok"});
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace adtmas
