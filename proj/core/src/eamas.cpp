#include "adtmas/eamas.hpp"

#include "adtmas/fm.hpp"

#include <algorithm>

namespace adtmas {

const char* name(Payload p) { return p == Payload::Ok ? "ok" : "nok"; }

Expr Expr::constant(AffineExpr v) {
    Expr e;
    e.op = Op::Const;
    e.value = std::move(v);
    return e;
}

Expr Expr::variable(int index) {
    Expr e;
    e.op = Op::Var;
    e.var = index;
    return e;
}

Expr Expr::sum(std::vector<Expr> terms) {
    if (terms.empty()) return constant(Rational(0));
    if (terms.size() == 1) return std::move(terms.front());
    Expr e;
    e.op = Op::Add;
    e.args = std::move(terms);
    return e;
}

Expr Expr::product(Expr a, Expr b) {
    Expr e;
    e.op = Op::Mul;
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
}

Expr Expr::maximum(std::vector<Expr> terms) {
    if (terms.empty()) return constant(Rational(0));
    if (terms.size() == 1) return std::move(terms.front());
    Expr e;
    e.op = Op::Max;
    e.args = std::move(terms);
    return e;
}

void Expr::collect_vars(std::vector<int>& out) const {
    if (op == Op::Var) out.push_back(var);
    for (const auto& a : args) a.collect_vars(out);
}

void EamasNetwork::finalize() {
    senders_.clear();
    receivers_.clear();
    model_index_.clear();
    attr_index_.clear();
    for (int m = 0; m < static_cast<int>(models.size()); ++m) {
        auto& lm = models[static_cast<std::size_t>(m)];
        model_index_[lm.id] = m;
        lm.outgoing.assign(lm.locations.size(), {});
        for (int t = 0; t < static_cast<int>(lm.transitions.size()); ++t) {
            const auto& tr = lm.transitions[static_cast<std::size_t>(t)];
            lm.outgoing.at(static_cast<std::size_t>(tr.from)).push_back(t);
            if (!tr.message) continue;
            auto key = std::make_pair(tr.action, tr.message->payload);
            (tr.message->dir == MsgDir::Send ? senders_ : receivers_)[key].push_back({m, t});
        }
    }
    for (int a = 0; a < static_cast<int>(attrs.size()); ++a) attr_index_[attrs[static_cast<std::size_t>(a)].name] = a;
}

int EamasNetwork::model_index(const std::string& id) const {
    auto it = model_index_.find(id);
    return it == model_index_.end() ? -1 : it->second;
}

int EamasNetwork::attr_index(const std::string& name) const {
    auto it = attr_index_.find(name);
    return it == attr_index_.end() ? -1 : it->second;
}

const std::vector<EamasNetwork::Endpoint>& EamasNetwork::senders_of(const Transition& receive) const {
    static const std::vector<Endpoint> none;
    auto it = senders_.find({receive.action, receive.message->payload});
    return it == senders_.end() ? none : it->second;
}

const std::vector<EamasNetwork::Endpoint>& EamasNetwork::receivers_of(const Transition& send) const {
    static const std::vector<Endpoint> none;
    auto it = receivers_.find({send.action, send.message->payload});
    return it == receivers_.end() ? none : it->second;
}

namespace {

bool sat_with(const Conjunction& pc, const Conjunction& added) {
    Conjunction all = pc;
    all.insert(all.end(), added.begin(), added.end());
    return is_satisfiable(all);
}

AffineExpr eval_concrete(const Expr& e, const StateView& view) {
    switch (e.op) {
        case Expr::Op::Const: return e.value;
        case Expr::Op::Var: return view.value(e.var);
        case Expr::Op::Add: {
            Rational acc = 0;
            for (const auto& a : e.args) acc += eval_concrete(a, view).constant();
            return AffineExpr(acc);
        }
        case Expr::Op::Mul:
            return AffineExpr(eval_concrete(e.args[0], view).constant() * eval_concrete(e.args[1], view).constant());
        case Expr::Op::Max: {
            Rational best = eval_concrete(e.args[0], view).constant();
            for (std::size_t i = 1; i < e.args.size(); ++i) best = std::max(best, eval_concrete(e.args[i], view).constant());
            return AffineExpr(best);
        }
    }
    return {};
}

std::vector<Alternative> combine(const std::vector<Alternative>& xs, const std::vector<Alternative>& ys,
                                 const Conjunction& pc, Expr::Op op) {
    std::vector<Alternative> out;
    for (const auto& x : xs) {
        for (const auto& y : ys) {
            Conjunction added = x.added;
            added.insert(added.end(), y.added.begin(), y.added.end());
            if (!y.added.empty() && !x.added.empty() && !sat_with(pc, added)) continue;
            switch (op) {
                case Expr::Op::Add: out.push_back({x.value + y.value, std::move(added)}); break;
                case Expr::Op::Mul:
                    if (x.value.is_constant())
                        out.push_back({y.value * x.value.constant(), std::move(added)});
                    else if (y.value.is_constant())
                        out.push_back({x.value * y.value.constant(), std::move(added)});
                    else
                        throw NonAffineParameterFlow("product of two parameter-dependent values");
                    break;
                case Expr::Op::Max: {
                    AffineExpr d = x.value - y.value;
                    if (d.is_constant()) {
                        out.push_back({d.constant() >= 0 ? x.value : y.value, std::move(added)});
                        break;
                    }
                    Conjunction first = added, second = added;
                    first.push_back({d, Cmp::Ge});
                    second.push_back({d, Cmp::Lt});
                    if (sat_with(pc, first)) out.push_back({x.value, std::move(first)});
                    if (sat_with(pc, second)) out.push_back({y.value, std::move(second)});
                    break;
                }
                default: break;
            }
        }
    }
    return out;
}

// Guard alternatives: the added constraints under which the guard holds.
std::vector<Conjunction> guard_alternatives(const Guard& g, const StateView& view, const Conjunction& pc) {
    std::vector<Conjunction> out;
    auto ls = evaluate(g.lhs, view, pc, true);
    auto rs = evaluate(g.rhs, view, pc, true);
    for (const auto& l : ls) {
        for (const auto& r : rs) {
            Conjunction added = l.added;
            added.insert(added.end(), r.added.begin(), r.added.end());
            AffineExpr d = l.value - r.value;
            if (d.is_constant()) {
                if (compare(d.constant(), g.op, Rational(0)) && (added.empty() || sat_with(pc, added)))
                    out.push_back(std::move(added));
                continue;
            }
            added.push_back({d, g.op});
            if (sat_with(pc, added)) out.push_back(std::move(added));
        }
    }
    return out;
}

bool guard_holds(const Guard& g, const StateView& view) {
    return compare(eval_concrete(g.lhs, view).constant(), g.op, eval_concrete(g.rhs, view).constant());
}

class OverlayView : public StateView {
public:
    OverlayView(const StateView& base, const std::vector<std::pair<int, AffineExpr>>& writes)
        : base_(base), writes_(writes) {}
    int location(int model) const override { return base_.location(model); }
    const AffineExpr& value(int var) const override {
        for (auto it = writes_.rbegin(); it != writes_.rend(); ++it)
            if (it->first == var) return it->second;
        return base_.value(var);
    }

private:
    const StateView& base_;
    const std::vector<std::pair<int, AffineExpr>>& writes_;
};

struct Partial {
    std::vector<std::pair<int, AffineExpr>> writes;
    Conjunction added;
};

// Applies a transition's updates to every partial result, splitting as needed.
std::vector<Partial> apply_updates(const Transition& t, const StateView& view, const Conjunction& pc,
                                   std::vector<Partial> partials) {
    for (const auto& u : t.updates) {
        std::vector<Partial> next;
        for (auto& p : partials) {
            OverlayView ov(view, p.writes);
            Conjunction scope = pc;
            scope.insert(scope.end(), p.added.begin(), p.added.end());
            for (auto& alt : evaluate(u.expr, ov, scope, true)) {
                Partial q = p;
                q.writes.emplace_back(u.var, std::move(alt.value));
                q.added.insert(q.added.end(), alt.added.begin(), alt.added.end());
                next.push_back(std::move(q));
            }
        }
        partials = std::move(next);
    }
    return partials;
}

std::vector<Partial> apply_guard(const Transition& t, const StateView& view, const Conjunction& pc,
                                 std::vector<Partial> partials) {
    if (!t.guard) return partials;
    std::vector<Partial> next;
    for (auto& p : partials) {
        Conjunction scope = pc;
        scope.insert(scope.end(), p.added.begin(), p.added.end());
        OverlayView ov(view, p.writes);
        for (auto& g : guard_alternatives(*t.guard, ov, scope)) {
            Partial q = p;
            q.added.insert(q.added.end(), g.begin(), g.end());
            next.push_back(std::move(q));
        }
    }
    return next;
}

void concrete_writes(const Transition& t, const StateView& view, std::vector<std::pair<int, AffineExpr>>& writes) {
    for (const auto& u : t.updates) {
        OverlayView ov(view, writes);
        writes.emplace_back(u.var, eval_concrete(u.expr, ov));
    }
}

}  // namespace

std::vector<Alternative> evaluate(const Expr& e, const StateView& view, const Conjunction& pc, bool symbolic) {
    if (!symbolic) return {Alternative{eval_concrete(e, view), {}}};
    switch (e.op) {
        case Expr::Op::Const: return {Alternative{e.value, {}}};
        case Expr::Op::Var: return {Alternative{view.value(e.var), {}}};
        case Expr::Op::Add:
        case Expr::Op::Mul:
        case Expr::Op::Max: {
            std::vector<Alternative> acc = evaluate(e.args[0], view, pc, true);
            for (std::size_t i = 1; i < e.args.size(); ++i) acc = combine(acc, evaluate(e.args[i], view, pc, true), pc, e.op);
            return acc;
        }
    }
    return {};
}

void moves_of(const EamasNetwork& net, const StateView& view, const Conjunction& pc, int model, bool symbolic,
              std::vector<Move>& out) {
    const LocalModel& lm = net.models[static_cast<std::size_t>(model)];
    int loc = view.location(model);
    for (int ti : lm.outgoing[static_cast<std::size_t>(loc)]) {
        const Transition& t = lm.transitions[static_cast<std::size_t>(ti)];
        if (t.message && t.message->dir == MsgDir::Send) continue;
        if (!t.message) {
            if (!symbolic) {
                if (t.guard && !guard_holds(*t.guard, view)) continue;
                Move mv{model, ti, -1, -1, {}, {}};
                concrete_writes(t, view, mv.writes);
                out.push_back(std::move(mv));
                continue;
            }
            auto parts = apply_updates(t, view, pc, apply_guard(t, view, pc, {Partial{}}));
            for (auto& p : parts) out.push_back(Move{model, ti, -1, -1, std::move(p.writes), std::move(p.added)});
            continue;
        }
        for (const auto& ep : net.senders_of(t)) {
            if (ep.model == model) continue;
            const Transition& st = net.models[static_cast<std::size_t>(ep.model)].transitions[static_cast<std::size_t>(ep.transition)];
            if (view.location(ep.model) != st.from) continue;
            if (!symbolic) {
                if (st.guard && !guard_holds(*st.guard, view)) continue;
                if (t.guard && !guard_holds(*t.guard, view)) continue;
                Move mv{model, ti, ep.model, ep.transition, {}, {}};
                concrete_writes(st, view, mv.writes);  // sender first
                concrete_writes(t, view, mv.writes);
                out.push_back(std::move(mv));
                continue;
            }
            std::vector<Partial> parts{Partial{}};
            parts = apply_guard(st, view, pc, std::move(parts));
            parts = apply_guard(t, view, pc, std::move(parts));
            parts = apply_updates(st, view, pc, std::move(parts));
            parts = apply_updates(t, view, pc, std::move(parts));
            for (auto& p : parts)
                out.push_back(Move{model, ti, ep.model, ep.transition, std::move(p.writes), std::move(p.added)});
        }
    }
}

namespace {

class FullView : public StateView {
public:
    explicit FullView(const GlobalState& s) : s_(s) {}
    int location(int model) const override { return s_.locations[static_cast<std::size_t>(model)]; }
    const AffineExpr& value(int var) const override { return s_.valuation[static_cast<std::size_t>(var)]; }

private:
    const GlobalState& s_;
};

}  // namespace

GlobalState initial_state(const EamasNetwork& net) {
    GlobalState s;
    for (const auto& m : net.models) s.locations.push_back(m.initial);
    for (const auto& a : net.attrs) s.valuation.push_back(a.initial);
    s.constraint = canonical(net.domain);
    return s;
}

std::vector<GlobalTransition> successors(const EamasNetwork& net, const GlobalState& s) {
    bool symbolic = !net.params.empty();
    FullView view(s);
    std::vector<Move> moves;
    for (int m = 0; m < static_cast<int>(net.models.size()); ++m) moves_of(net, view, s.constraint, m, symbolic, moves);
    std::vector<GlobalTransition> out;
    out.reserve(moves.size());
    for (auto& mv : moves) {
        GlobalTransition gt;
        const Transition& mt = net.models[static_cast<std::size_t>(mv.mover)].transitions[static_cast<std::size_t>(mv.mover_transition)];
        gt.action = mt.action;
        gt.next = s;
        gt.next.locations[static_cast<std::size_t>(mv.mover)] = mt.to;
        if (mv.sender >= 0) {
            const Transition& st = net.models[static_cast<std::size_t>(mv.sender)].transitions[static_cast<std::size_t>(mv.sender_transition)];
            gt.next.locations[static_cast<std::size_t>(mv.sender)] = st.to;
            gt.action += std::string("_") + name(st.message->payload);
            gt.sender = mv.sender;
            gt.sender_transition = mv.sender_transition;
            gt.receiver = mv.mover;
            gt.receiver_transition = mv.mover_transition;
        } else {
            gt.sender = mv.mover;
            gt.sender_transition = mv.mover_transition;
        }
        for (auto& [var, val] : mv.writes) gt.next.valuation[static_cast<std::size_t>(var)] = std::move(val);
        if (!mv.added.empty()) {
            Conjunction c = s.constraint;
            c.insert(c.end(), mv.added.begin(), mv.added.end());
            gt.next.constraint = canonical(std::move(c));
        }
        out.push_back(std::move(gt));
    }
    return out;
}

bool is_goal(const EamasNetwork& net, const GlobalState& s, const std::string& label) {
    auto it = net.labels.find(label);
    if (it == net.labels.end()) throw UnknownLabel(label);
    int loc = s.locations.at(static_cast<std::size_t>(it->second.model));
    const auto& locs = it->second.locations;
    return std::find(locs.begin(), locs.end(), loc) != locs.end();
}

}  // namespace adtmas
