#pragma once

#include "adtmas/adt.hpp"
#include "adtmas/engine.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adtmas {

class NoParameters : public std::runtime_error {
public:
    NoParameters() : std::runtime_error("model declares no parameters (add `param <node>.<attr>`)") {}
};

// A one-parameter interval; no upper bound when `hi` is empty.
struct Interval {
    Rational lo = 0;
    bool lo_open = false;
    std::optional<Rational> hi;
    bool hi_open = false;

    bool contains(const Rational& x) const;
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct SynthesisResult {
    ConstraintSet set;
    std::vector<std::string> params;
    std::vector<Interval> intervals;  // canonical form when there is exactly one parameter
    ExplorationStats stats;

    std::string str() const;
};

// Parameter valuations (all parameters >= 0) under which the model's goal is reachable.
SynthesisResult synthesize_feasible(const AdtModel& model, const EngineOptions& opt = {});
// The complement of the feasible region within the parameter domain.
SynthesisResult synthesize_blocking(const AdtModel& model, const EngineOptions& opt = {});

// Sorted, merged union of the intervals described by one-parameter conjunctions.
std::vector<Interval> to_intervals(const std::vector<Conjunction>& disjuncts);
std::vector<Interval> complement(const std::vector<Interval>& intervals);
std::string render(const std::vector<Interval>& intervals, const std::string& param);
std::string render(const ConstraintSet& set, const std::vector<std::string>& params);

// The model with every declared parameter replaced by the given value, parameters dropped.
AdtModel instantiate(const AdtModel& model, const std::vector<Rational>& values);

}  // namespace adtmas
