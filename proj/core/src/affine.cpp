#include "adtmas/affine.hpp"

#include <boost/container_hash/hash.hpp>

#include <algorithm>
#include <stdexcept>

namespace adtmas {

AffineExpr AffineExpr::param(int index, Rational coeff) {
    AffineExpr e;
    if (coeff != 0) e.terms_.emplace_back(index, std::move(coeff));
    return e;
}

Rational AffineExpr::coeff(int index) const {
    for (const auto& [i, k] : terms_)
        if (i == index) return k;
    return 0;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& o) {
    constant_ += o.constant_;
    if (o.terms_.empty()) return *this;
    std::vector<Term> merged;
    merged.reserve(terms_.size() + o.terms_.size());
    auto a = terms_.cbegin(), b = o.terms_.cbegin();
    while (a != terms_.cend() || b != o.terms_.end()) {
        if (b == o.terms_.end() || (a != terms_.cend() && a->first < b->first)) {
            merged.push_back(*a++);
        } else if (a == terms_.cend() || b->first < a->first) {
            merged.push_back(*b++);
        } else {
            Rational k = a->second + b->second;
            if (k != 0) merged.emplace_back(a->first, std::move(k));
            ++a, ++b;
        }
    }
    terms_ = std::move(merged);
    return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& o) { return *this += -AffineExpr(o); }

AffineExpr& AffineExpr::operator*=(const Rational& k) {
    if (k == 0) {
        constant_ = 0;
        terms_.clear();
        return *this;
    }
    constant_ *= k;
    for (auto& t : terms_) t.second *= k;
    return *this;
}

bool operator<(const AffineExpr& a, const AffineExpr& b) {
    if (a.constant_ != b.constant_) return a.constant_ < b.constant_;
    return a.terms_ < b.terms_;
}

std::size_t AffineExpr::hash() const {
    std::size_t seed = hash_value(constant_);
    for (const auto& [i, k] : terms_) {
        boost::hash_combine(seed, i);
        boost::hash_combine(seed, hash_value(k));
    }
    return seed;
}

Rational AffineExpr::evaluate(const std::vector<Rational>& point) const {
    Rational v = constant_;
    for (const auto& [i, k] : terms_) v += k * point.at(static_cast<std::size_t>(i));
    return v;
}

std::string AffineExpr::str(const std::vector<std::string>& names) const {
    std::string out;
    for (const auto& [i, k] : terms_) {
        Rational mag = k < 0 ? Rational(-k) : k;
        if (out.empty())
            out += k < 0 ? "-" : "";
        else
            out += k < 0 ? " - " : " + ";
        if (mag != 1) out += to_string(mag) + "*";
        out += i < static_cast<int>(names.size()) ? names[static_cast<std::size_t>(i)] : "p" + std::to_string(i);
    }
    if (out.empty()) return to_string(constant_);
    if (constant_ > 0) out += " + " + to_string(constant_);
    if (constant_ < 0) out += " - " + to_string(Rational(-constant_));
    return out;
}

const char* symbol(Cmp c) {
    switch (c) {
        case Cmp::Lt: return "<";
        case Cmp::Le: return "<=";
        case Cmp::Eq: return "=";
        case Cmp::Ge: return ">=";
        case Cmp::Gt: return ">";
    }
    return "?";
}

Cmp negate(Cmp c) {
    switch (c) {
        case Cmp::Lt: return Cmp::Ge;
        case Cmp::Le: return Cmp::Gt;
        case Cmp::Ge: return Cmp::Lt;
        case Cmp::Gt: return Cmp::Le;
        case Cmp::Eq: break;
    }
    throw std::logic_error("equality has no single-constraint negation");
}

Cmp mirror(Cmp c) {
    switch (c) {
        case Cmp::Lt: return Cmp::Gt;
        case Cmp::Le: return Cmp::Ge;
        case Cmp::Ge: return Cmp::Le;
        case Cmp::Gt: return Cmp::Lt;
        case Cmp::Eq: return Cmp::Eq;
    }
    return c;
}

bool compare(const Rational& lhs, Cmp op, const Rational& rhs) {
    switch (op) {
        case Cmp::Lt: return lhs < rhs;
        case Cmp::Le: return lhs <= rhs;
        case Cmp::Eq: return lhs == rhs;
        case Cmp::Ge: return lhs >= rhs;
        case Cmp::Gt: return lhs > rhs;
    }
    return false;
}

bool operator<(const Constraint& a, const Constraint& b) {
    if (a.expr.terms() != b.expr.terms()) return a.expr.terms() < b.expr.terms();
    if (a.op != b.op) return a.op < b.op;
    return a.expr.constant() < b.expr.constant();
}

bool Constraint::holds(const std::vector<Rational>& point) const {
    return compare(expr.evaluate(point), op, Rational(0));
}

std::string Constraint::str(const std::vector<std::string>& names) const {
    return expr.str(names) + " " + symbol(op) + " 0";
}

Conjunction canonical(Conjunction c) {
    Conjunction out;
    out.reserve(c.size());
    for (auto& k : c) {
        if (k.expr.is_constant()) {
            if (compare(k.expr.constant(), k.op, Rational(0))) continue;
            return Conjunction{Constraint{AffineExpr(Rational(-1)), Cmp::Ge}};
        }
        // scale so the leading coefficient has magnitude one
        Rational lead = k.expr.terms().front().second;
        Rational scale = lead < 0 ? Rational(-lead) : lead;
        k.expr *= Rational(1) / scale;
        out.push_back(std::move(k));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool holds(const Conjunction& c, const std::vector<Rational>& point) {
    return std::all_of(c.begin(), c.end(), [&](const Constraint& k) { return k.holds(point); });
}

std::size_t hash_value(const Conjunction& c) {
    std::size_t seed = c.size();
    for (const auto& k : c) {
        boost::hash_combine(seed, k.expr.hash());
        boost::hash_combine(seed, static_cast<int>(k.op));
    }
    return seed;
}

std::vector<Constraint> negation(const Constraint& c) {
    if (c.op == Cmp::Eq) return {Constraint{c.expr, Cmp::Lt}, Constraint{c.expr, Cmp::Gt}};
    return {Constraint{c.expr, negate(c.op)}};
}

bool ConstraintSet::contains(const std::vector<Rational>& point) const {
    return std::any_of(disjuncts.begin(), disjuncts.end(),
                       [&](const Conjunction& c) { return holds(c, point); });
}

}  // namespace adtmas
