#include "adtmas/fm.hpp"

#include <set>

namespace adtmas {

namespace {

// Every constraint rewritten as e > 0 or e >= 0.
Conjunction to_lower_form(const Conjunction& conj) {
    Conjunction out;
    for (const auto& c : conj) {
        switch (c.op) {
            case Cmp::Gt:
            case Cmp::Ge: out.push_back(c); break;
            case Cmp::Lt: out.push_back({-AffineExpr(c.expr), Cmp::Gt}); break;
            case Cmp::Le: out.push_back({-AffineExpr(c.expr), Cmp::Ge}); break;
            case Cmp::Eq:
                out.push_back({c.expr, Cmp::Ge});
                out.push_back({-AffineExpr(c.expr), Cmp::Ge});
                break;
        }
    }
    return out;
}

std::set<int> variables(const Conjunction& conj) {
    std::set<int> vars;
    for (const auto& c : conj)
        for (const auto& t : c.expr.terms()) vars.insert(t.first);
    return vars;
}

bool trivially_false(const Conjunction& conj) {
    for (const auto& c : conj)
        if (c.expr.is_constant() && !compare(c.expr.constant(), c.op, Rational(0))) return true;
    return false;
}

}  // namespace

Conjunction eliminate(const Conjunction& conj, int index) {
    Conjunction lower_form = to_lower_form(conj);
    Conjunction lower, upper, rest;
    for (auto& c : lower_form) {
        Rational k = c.expr.coeff(index);
        if (k > 0)
            lower.push_back(std::move(c));
        else if (k < 0)
            upper.push_back(std::move(c));
        else
            rest.push_back(std::move(c));
    }
    for (const auto& lo : lower) {
        Rational a = lo.expr.coeff(index);
        for (const auto& up : upper) {
            Rational b = -up.expr.coeff(index);
            AffineExpr combined = lo.expr * b + up.expr * a;
            bool strict = lo.op == Cmp::Gt || up.op == Cmp::Gt;
            rest.push_back({std::move(combined), strict ? Cmp::Gt : Cmp::Ge});
        }
    }
    return canonical(std::move(rest));
}

bool is_satisfiable(const Conjunction& conj) {
    Conjunction current = canonical(to_lower_form(conj));
    while (true) {
        if (trivially_false(current)) return false;
        auto vars = variables(current);
        if (vars.empty()) return true;
        current = eliminate(current, *vars.begin());
    }
}

bool implies(const Conjunction& a, const Constraint& b) {
    for (const auto& piece : negation(b)) {
        Conjunction probe = a;
        probe.push_back(piece);
        if (is_satisfiable(probe)) return false;
    }
    return true;
}

Conjunction remove_redundant(const Conjunction& conj) {
    Conjunction current = canonical(conj);
    for (std::size_t i = 0; i < current.size();) {
        Conjunction others;
        for (std::size_t j = 0; j < current.size(); ++j)
            if (j != i) others.push_back(current[j]);
        if (implies(others, current[i]))
            current = std::move(others);
        else
            ++i;
    }
    return current;
}

}  // namespace adtmas
