#pragma once

#include "adtmas/affine.hpp"

namespace adtmas {

// Exact rational satisfiability by Fourier-Motzkin elimination, strict bounds tracked.
bool is_satisfiable(const Conjunction& conj);

// Eliminates parameter `index`; the result is satisfiable iff some value of that parameter
// satisfies the input.
Conjunction eliminate(const Conjunction& conj, int index);

// Drops constraints implied by the others.
Conjunction remove_redundant(const Conjunction& conj);

// True iff every point of `a` satisfies `b`.
bool implies(const Conjunction& a, const Constraint& b);

}  // namespace adtmas
