#include "adtmas/oracle.hpp"

#include "adtmas/transform.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace adtmas {

namespace {

struct Run {
    Verdict verdict = Verdict::Stuck;
    std::map<std::string, Rational> values;
    std::set<NodeId> counted;  // successful nodes whose intrinsic values are included
};

class Oracle {
public:
    Oracle(const AdtModel& m, const ChoiceVector& c, const OracleOptions& o) : m_(m), c_(c), o_(o) {
        attrs_ = m.attribute_names();
    }

    const Run& run(const NodeId& id) {
        auto it = memo_.find(id);
        if (it != memo_.end()) return it->second;
        Run r = compute(m_.node(id));
        return memo_.emplace(id, std::move(r)).first->second;
    }

private:
    const std::set<AgentId>& agents(const NodeId& id) {
        auto it = agents_.find(id);
        if (it != agents_.end()) return it->second;
        std::set<AgentId> out{m_.agents.count(id) ? m_.agents.at(id) : id};
        const Node& n = m_.node(id);
        std::vector<NodeId> vc = is_countering(n.kind) ? std::vector<NodeId>{n.children.front()} : n.children;
        for (const auto& c : vc) {
            const auto& sub = agents(c);
            out.insert(sub.begin(), sub.end());
        }
        return agents_.emplace(id, std::move(out)).first->second;
    }

    Rational group_time(const std::vector<NodeId>& group) {
        Rational sum = 0, peak = 0;
        std::map<NodeId, int> mult;
        for (const auto& c : group) {
            const Run& r = run(c);
            sum += r.values.at("time");
            peak = std::max(peak, r.values.at("time"));
            for (const auto& n : r.counted) mult[n]++;
        }
        for (const auto& [n, k] : mult)
            if (k > 1) sum -= Rational(k - 1) * m_.node(n).intrinsic("time");
        return std::max(peak, sum);
    }

    Run settle(const Node& x, const std::vector<NodeId>& consumed, bool success) {
        Run r;
        r.verdict = success ? Verdict::Ok : Verdict::Nok;
        for (const auto& c : consumed) {
            const auto& s = run(c).counted;
            r.counted.insert(s.begin(), s.end());
        }
        if (success) r.counted.insert(x.id);
        for (const auto& a : attrs_) {
            if (a != "time") {
                Rational total = 0;
                for (const auto& n : r.counted) total += m_.node(n).intrinsic(a);
                r.values[a] = total;
                continue;
            }
            Rational t = 0;
            if (!consumed.empty()) {
                if (x.kind == NodeKind::And || x.kind == NodeKind::Or) {
                    // partition by shared agents
                    std::vector<std::vector<NodeId>> groups;
                    std::vector<std::set<AgentId>> group_agents;
                    for (const auto& c : consumed) {
                        std::set<AgentId> mine = agents(c);
                        std::vector<NodeId> merged{c};
                        for (std::size_t g = groups.size(); g-- > 0;) {
                            bool overlap = std::any_of(mine.begin(), mine.end(),
                                                       [&](const AgentId& a) { return group_agents[g].count(a) != 0; });
                            if (!overlap) continue;
                            merged.insert(merged.end(), groups[g].begin(), groups[g].end());
                            mine.insert(group_agents[g].begin(), group_agents[g].end());
                            groups.erase(groups.begin() + static_cast<long>(g));
                            group_agents.erase(group_agents.begin() + static_cast<long>(g));
                        }
                        groups.push_back(std::move(merged));
                        group_agents.push_back(std::move(mine));
                    }
                    for (const auto& g : groups) t = std::max(t, group_time(g));
                } else {
                    t = group_time(consumed);
                }
            }
            if (success) t += x.intrinsic("time");
            r.values["time"] = t;
        }
        return r;
    }

    Rational side(const LinearSide& s) {
        Rational v = s.constant;
        for (const auto& t : s.terms) {
            Rational base = t.kind == TermKind::Init ? m_.node(t.ref.node).intrinsic(t.ref.attr)
                                                     : run(t.ref.node).values.at(t.ref.attr);
            v += t.coeff * base;
        }
        return v;
    }

    bool condition(const Node& x) {
        if (!x.condition) return true;
        return compare(side(x.condition->lhs), x.condition->op, side(x.condition->rhs));
    }

    Run guarded(const Node& x, const std::vector<NodeId>& consumed) { return settle(x, consumed, condition(x)); }

    Run compute(const Node& x) {
        const auto& ch = x.children;
        switch (x.kind) {
            case NodeKind::Leaf: {
                auto it = c_.leaves.find(x.id);
                if (it == c_.leaves.end()) throw std::invalid_argument("no outcome for leaf " + x.id);
                return settle(x, {}, it->second);
            }
            case NodeKind::And: {
                bool all_ok = true;
                for (const auto& c : ch) {
                    Verdict v = run(c).verdict;
                    if (v == Verdict::Stuck) return {};
                    all_ok = all_ok && v == Verdict::Ok;
                }
                return all_ok ? guarded(x, ch) : settle(x, ch, false);
            }
            case NodeKind::Sand: {
                for (std::size_t k = 0; k < ch.size(); ++k) {
                    Verdict v = run(ch[k]).verdict;
                    if (v == Verdict::Stuck) return {};
                    if (v == Verdict::Nok)
                        return settle(x, std::vector<NodeId>(ch.begin(), ch.begin() + static_cast<long>(k) + 1), false);
                }
                return guarded(x, ch);
            }
            case NodeKind::Or: {
                auto it = c_.attempted.find(x.id);
                if (it == c_.attempted.end() || it->second.empty())
                    throw std::invalid_argument("no attempted subset for " + x.id);
                std::vector<NodeId> s;
                for (const auto& c : ch)
                    if (it->second.count(c)) s.push_back(c);
                bool any_ok = false;
                for (const auto& c : s) {
                    Verdict v = run(c).verdict;
                    if (v == Verdict::Stuck) return {};
                    any_ok = any_ok || v == Verdict::Ok;
                }
                if (any_ok) {
                    if (o_.rational && s.size() != 1) return {};
                    return guarded(x, s);
                }
                if (s.size() == ch.size()) return settle(x, s, false);
                return {};
            }
            case NodeKind::Counter:
            case NodeKind::SCounter: {
                const NodeId& a = ch[0];
                Verdict va = run(a).verdict;
                if (va == Verdict::Stuck) return {};
                if (va == Verdict::Nok) return settle(x, {a}, false);
                Verdict vd = run(ch[1]).verdict;
                if (vd == Verdict::Stuck) return {};
                if (vd == Verdict::Ok) return settle(x, {a}, false);
                return guarded(x, {a});
            }
            case NodeKind::NoCounter: {
                const NodeId& a = ch[0];
                const NodeId& d = ch[1];
                Verdict va = run(a).verdict;
                Verdict vd = run(d).verdict;
                bool via_a = va == Verdict::Ok;
                bool via_d = vd == Verdict::Nok;
                if (via_a && via_d) {
                    auto it = c_.route.find(x.id);
                    if (it != c_.route.end() && it->second == d) via_a = false;
                }
                if (via_a) return guarded(x, {a});
                if (via_d) return guarded(x, {});
                if (va == Verdict::Nok && vd == Verdict::Ok) return settle(x, {a}, false);
                return {};
            }
        }
        return {};
    }

    const AdtModel& m_;
    const ChoiceVector& c_;
    OracleOptions o_;
    std::vector<std::string> attrs_;
    std::map<NodeId, Run> memo_;
    std::map<NodeId, std::set<AgentId>> agents_;
};

}  // namespace

OracleResult oracle_eval(const AdtModel& model, const ChoiceVector& choice, const OracleOptions& opt) {
    Oracle o(model, choice, opt);
    const Run& r = o.run(model.root);
    OracleResult out;
    out.verdict = r.verdict;
    if (r.verdict != Verdict::Stuck) out.values = r.values;
    return out;
}

std::vector<ChoiceVector> all_choice_vectors(const AdtModel& model, std::size_t limit) {
    std::vector<std::function<std::size_t()>> dims;
    std::vector<std::function<void(ChoiceVector&, std::size_t)>> set;
    for (const auto& n : model.nodes()) {
        if (n.kind == NodeKind::Leaf) {
            dims.emplace_back([] { return std::size_t{2}; });
            set.emplace_back([id = n.id](ChoiceVector& c, std::size_t i) { c.leaves[id] = i == 0; });
        } else if (n.kind == NodeKind::Or) {
            std::size_t k = n.children.size();
            dims.emplace_back([k] { return (std::size_t{1} << k) - 1; });
            set.emplace_back([id = n.id, ch = n.children](ChoiceVector& c, std::size_t i) {
                std::set<NodeId> s;
                for (std::size_t b = 0; b < ch.size(); ++b)
                    if (((i + 1) >> b) & 1U) s.insert(ch[b]);
                c.attempted[id] = std::move(s);
            });
        } else if (n.kind == NodeKind::NoCounter) {
            dims.emplace_back([] { return std::size_t{2}; });
            set.emplace_back([id = n.id, ch = n.children](ChoiceVector& c, std::size_t i) { c.route[id] = ch[i]; });
        }
    }
    std::size_t total = 1;
    for (const auto& d : dims) {
        total *= d();
        if (total > limit) throw std::length_error("more than " + std::to_string(limit) + " choice vectors");
    }
    std::vector<ChoiceVector> out;
    out.reserve(total);
    for (std::size_t code = 0; code < total; ++code) {
        ChoiceVector c;
        std::size_t rest = code;
        for (std::size_t i = 0; i < dims.size(); ++i) {
            std::size_t d = dims[i]();
            set[i](c, rest % d);
            rest /= d;
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::string outcome_key(const std::string& verdict, const std::map<std::string, Rational>& values) {
    std::string s = verdict;
    for (const auto& [k, v] : values) s += " " + k + "=" + to_string(v);
    return s;
}

CrossCheckReport cross_check(const AdtModel& model, const EngineOptions& engine, const OracleOptions& opt,
                             std::size_t limit) {
    CrossCheckReport rep;
    auto choices = all_choice_vectors(model, limit);
    rep.choice_vectors = choices.size();
    for (const auto& c : choices) {
        auto r = oracle_eval(model, c, opt);
        if (r.verdict == Verdict::Stuck) continue;
        rep.oracle_outcomes.insert(outcome_key(r.verdict == Verdict::Ok ? "root_ok" : "root_nok", r.values));
    }
    TransformOptions to;
    to.rational = opt.rational;
    auto net = transform(model, to);
    auto res = check(net, Query{QueryKind::EnumerateOutcomes, "", "root_ok"}, engine);
    for (const auto& o : res.outcomes) rep.engine_outcomes.insert(outcome_key(o.verdict, o.values));
    for (const auto& k : rep.engine_outcomes)
        if (!rep.oracle_outcomes.count(k)) rep.mismatches.push_back("engine only: " + k);
    for (const auto& k : rep.oracle_outcomes)
        if (!rep.engine_outcomes.count(k)) rep.mismatches.push_back("oracle only: " + k);
    rep.match = rep.mismatches.empty();
    return rep;
}

}  // namespace adtmas
