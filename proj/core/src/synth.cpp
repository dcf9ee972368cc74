#include "adtmas/synth.hpp"

#include "adtmas/fm.hpp"
#include "adtmas/transform.hpp"

#include <algorithm>

namespace adtmas {

bool Interval::contains(const Rational& x) const {
    if (lo_open ? x <= lo : x < lo) return false;
    if (hi && (hi_open ? x >= *hi : x > *hi)) return false;
    return true;
}

namespace {

// Upper end a ends before upper end b (no bound = +inf; open ends before closed at the same value).
bool hi_less(const Interval& a, const Interval& b) {
    if (!a.hi) return false;
    if (!b.hi) return true;
    if (*a.hi != *b.hi) return *a.hi < *b.hi;
    return a.hi_open && !b.hi_open;
}

std::optional<Interval> interval_of(const Conjunction& conj) {
    if (!is_satisfiable(conj)) return std::nullopt;
    Interval iv;
    for (const auto& c : conj) {
        Rational a = c.expr.coeff(0);
        Rational k = c.expr.constant();
        if (a == 0) continue;  // satisfiable constant constraints are true
        Rational bound = -k / a;
        Cmp op = a > 0 ? c.op : mirror(c.op);  // p op bound
        auto raise = [&](bool open) {
            if (bound > iv.lo || (bound == iv.lo && open)) {
                iv.lo = bound;
                iv.lo_open = open;
            }
        };
        auto lower = [&](bool open) {
            if (!iv.hi || bound < *iv.hi || (bound == *iv.hi && open)) {
                iv.hi = bound;
                iv.hi_open = open;
            }
        };
        switch (op) {
            case Cmp::Gt: raise(true); break;
            case Cmp::Ge: raise(false); break;
            case Cmp::Lt: lower(true); break;
            case Cmp::Le: lower(false); break;
            case Cmp::Eq:
                raise(false);
                lower(false);
                break;
        }
    }
    if (iv.lo < 0) {
        iv.lo = 0;
        iv.lo_open = false;
    }
    return iv;
}

std::string bound_str(const Rational& r) { return to_string(r); }

}  // namespace

std::vector<Interval> to_intervals(const std::vector<Conjunction>& disjuncts) {
    std::vector<Interval> ivs;
    for (const auto& d : disjuncts)
        if (auto iv = interval_of(d)) ivs.push_back(*iv);
    std::sort(ivs.begin(), ivs.end(), [](const Interval& a, const Interval& b) {
        if (a.lo != b.lo) return a.lo < b.lo;
        return !a.lo_open && b.lo_open;
    });
    std::vector<Interval> out;
    for (const auto& iv : ivs) {
        if (!out.empty()) {
            Interval& last = out.back();
            // touching or overlapping: last.hi >= iv.lo, and not both ends open at the same point
            bool joins = !last.hi || *last.hi > iv.lo || (*last.hi == iv.lo && !(last.hi_open && iv.lo_open));
            if (joins) {
                if (hi_less(last, iv)) {
                    last.hi = iv.hi;
                    last.hi_open = iv.hi_open;
                }
                continue;
            }
        }
        out.push_back(iv);
    }
    return out;
}

std::vector<Interval> complement(const std::vector<Interval>& intervals) {
    std::vector<Interval> out;
    Interval gap;  // starts at 0 closed
    bool open_gap = true;
    for (const auto& iv : intervals) {
        if (open_gap && (iv.lo > gap.lo || (iv.lo == gap.lo && iv.lo_open && !gap.lo_open))) {
            Interval g = gap;
            g.hi = iv.lo;
            g.hi_open = !iv.lo_open;
            out.push_back(g);
        }
        if (!iv.hi) {
            open_gap = false;
            break;
        }
        gap.lo = *iv.hi;
        gap.lo_open = !iv.hi_open;
        open_gap = true;
    }
    if (open_gap) out.push_back(gap);
    return out;
}

std::string render(const std::vector<Interval>& intervals, const std::string& p) {
    if (intervals.empty()) return "false";
    std::string out;
    for (const auto& iv : intervals) {
        std::string s;
        bool from_zero = iv.lo == 0 && !iv.lo_open;
        if (!iv.hi) {
            s = from_zero ? "true" : p + (iv.lo_open ? " > " : " >= ") + bound_str(iv.lo);
        } else if (*iv.hi == iv.lo) {
            s = p + " = " + bound_str(iv.lo);
        } else {
            s = bound_str(iv.lo) + (iv.lo_open ? " < " : " <= ") + p + (iv.hi_open ? " < " : " <= ") + bound_str(*iv.hi);
        }
        out += (out.empty() ? "" : " || ") + s;
    }
    return out;
}

std::string render(const ConstraintSet& set, const std::vector<std::string>& params) {
    if (set.disjuncts.empty()) return "false";
    std::string out;
    for (const auto& d : set.disjuncts) {
        Conjunction c = remove_redundant(d);
        std::string s;
        for (const auto& k : c) s += (s.empty() ? "" : " && ") + k.str(params);
        if (s.empty()) return "true";
        out += (out.empty() ? "" : " || ") + (set.disjuncts.size() > 1 && c.size() > 1 ? "(" + s + ")" : s);
    }
    return out;
}

std::string SynthesisResult::str() const {
    if (params.size() == 1) return render(intervals, params.front());
    return render(set, params);
}

namespace {

SynthesisResult feasible_regions(const AdtModel& model, const EngineOptions& opt) {
    if (model.params.empty()) throw NoParameters();
    TransformOptions to;
    to.symbolic_params = true;
    EamasNetwork net = transform(model, to);
    SynthesisResult r;
    r.params = net.params;
    auto regions = goal_regions(net, model.goal.value_or("root_ok"), opt, &r.stats);
    for (auto& c : regions) r.set.disjuncts.push_back(remove_redundant(c));
    if (r.params.size() == 1) r.intervals = to_intervals(r.set.disjuncts);
    return r;
}

Constraint bound_constraint(int p, const Rational& v, Cmp op) {
    // p op v  as  p - v op 0
    return Constraint{AffineExpr::param(p) - AffineExpr(v), op};
}

ConstraintSet from_intervals(const std::vector<Interval>& ivs) {
    ConstraintSet s;
    for (const auto& iv : ivs) {
        Conjunction c{bound_constraint(0, iv.lo, iv.lo_open ? Cmp::Gt : Cmp::Ge)};
        if (iv.hi) c.push_back(bound_constraint(0, *iv.hi, iv.hi_open ? Cmp::Lt : Cmp::Le));
        s.disjuncts.push_back(canonical(std::move(c)));
    }
    return s;
}

// Complement of a union of conjunctions within the non-negative orthant.
ConstraintSet complement_set(const ConstraintSet& feasible, std::size_t params) {
    std::vector<Conjunction> acc;
    Conjunction domain;
    for (std::size_t i = 0; i < params; ++i) domain.push_back({AffineExpr::param(static_cast<int>(i)), Cmp::Ge});
    acc.push_back(canonical(domain));
    for (const auto& d : feasible.disjuncts) {
        std::vector<Conjunction> next;
        for (const auto& a : acc)
            for (const auto& lit : d)
                for (const auto& piece : negation(lit)) {
                    Conjunction c = a;
                    c.push_back(piece);
                    if (is_satisfiable(c)) next.push_back(canonical(remove_redundant(c)));
                }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        acc = std::move(next);
    }
    return ConstraintSet{acc};
}

}  // namespace

SynthesisResult synthesize_feasible(const AdtModel& model, const EngineOptions& opt) {
    SynthesisResult r = feasible_regions(model, opt);
    if (r.params.size() == 1) r.set = from_intervals(r.intervals);
    return r;
}

SynthesisResult synthesize_blocking(const AdtModel& model, const EngineOptions& opt) {
    SynthesisResult r = feasible_regions(model, opt);
    if (r.params.size() == 1) {
        r.intervals = complement(r.intervals);
        r.set = from_intervals(r.intervals);
    } else {
        r.set = complement_set(r.set, r.params.size());
    }
    return r;
}

AdtModel instantiate(const AdtModel& model, const std::vector<Rational>& values) {
    AdtModel out = model;
    for (std::size_t i = 0; i < model.params.size() && i < values.size(); ++i) {
        const auto& ref = model.params[i];
        out.node(ref.node).attributes[ref.attr] = values[i];
    }
    out.params.clear();
    return out;
}

}  // namespace adtmas
