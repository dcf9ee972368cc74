#pragma once

#include "adtmas/rational.hpp"

#include <string>
#include <utility>
#include <vector>

namespace adtmas {

// constant + sum(coeff_i * p_i) over parameter indices; terms sorted by index, no zero coefficients.
class AffineExpr {
public:
    using Term = std::pair<int, Rational>;

    AffineExpr() = default;
    AffineExpr(Rational c) : constant_(std::move(c)) {}  // NOLINT: implicit on purpose

    static AffineExpr param(int index, Rational coeff = 1);

    const Rational& constant() const { return constant_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_constant() const { return terms_.empty(); }
    Rational coeff(int index) const;

    AffineExpr& operator+=(const AffineExpr& o);
    AffineExpr& operator-=(const AffineExpr& o);
    AffineExpr& operator*=(const Rational& k);
    friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
    friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
    friend AffineExpr operator*(AffineExpr a, const Rational& k) { return a *= k; }
    friend AffineExpr operator-(AffineExpr a) { return a *= Rational(-1); }

    friend bool operator==(const AffineExpr&, const AffineExpr&) = default;
    friend bool operator<(const AffineExpr& a, const AffineExpr& b);

    std::size_t hash() const;
    Rational evaluate(const std::vector<Rational>& point) const;
    std::string str(const std::vector<std::string>& names) const;

private:
    Rational constant_;
    std::vector<Term> terms_;
};

enum class Cmp { Lt, Le, Eq, Ge, Gt };

const char* symbol(Cmp c);
Cmp negate(Cmp c);   // !(x < 0) is x >= 0, and so on; Eq has no single negation
Cmp mirror(Cmp c);   // a ~ b  <=>  b mirror(~) a
bool compare(const Rational& lhs, Cmp op, const Rational& rhs);

// expr ~ 0
struct Constraint {
    AffineExpr expr;
    Cmp op = Cmp::Ge;

    friend bool operator==(const Constraint&, const Constraint&) = default;
    friend bool operator<(const Constraint& a, const Constraint& b);
    bool holds(const std::vector<Rational>& point) const;
    std::string str(const std::vector<std::string>& names) const;
};

using Conjunction = std::vector<Constraint>;

// Sorted, deduplicated, trivially true constraints dropped. A trivially false one collapses the
// conjunction to the single constraint `-1 >= 0`.
Conjunction canonical(Conjunction c);
bool holds(const Conjunction& c, const std::vector<Rational>& point);
std::size_t hash_value(const Conjunction& c);

// The negation of a constraint as a disjunction (two pieces for equality).
std::vector<Constraint> negation(const Constraint& c);

struct ConstraintSet {
    std::vector<Conjunction> disjuncts;  // empty = false

    static ConstraintSet truth() { return ConstraintSet{{Conjunction{}}}; }
    static ConstraintSet falsity() { return ConstraintSet{}; }
    bool contains(const std::vector<Rational>& point) const;
    friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;
};

}  // namespace adtmas
