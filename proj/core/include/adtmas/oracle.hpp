#pragma once

#include "adtmas/adt.hpp"
#include "adtmas/engine.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace adtmas {

// One resolution of every nondeterministic decision of a model.
struct ChoiceVector {
    std::map<NodeId, bool> leaves;                   // leaf succeeds?
    std::map<NodeId, std::set<NodeId>> attempted;    // Or gate -> attempted children (nonempty)
    std::map<NodeId, NodeId> route;                  // no-counter gate -> child whose report it acts on
};

enum class Verdict { Ok, Nok, Stuck };

struct OracleOptions {
    bool rational = false;
};

struct OracleResult {
    Verdict verdict = Verdict::Stuck;
    std::map<std::string, Rational> values;  // root attributes; empty when stuck
};

// Bottom-up evaluation of one choice vector, independent of the network translation.
OracleResult oracle_eval(const AdtModel& model, const ChoiceVector& choice, const OracleOptions& opt = {});

// Every choice vector of the model; throws std::length_error beyond `limit`.
std::vector<ChoiceVector> all_choice_vectors(const AdtModel& model, std::size_t limit = 1U << 20U);

struct CrossCheckReport {
    bool match = false;
    std::size_t choice_vectors = 0;
    std::set<std::string> engine_outcomes;
    std::set<std::string> oracle_outcomes;
    std::vector<std::string> mismatches;
};

std::string outcome_key(const std::string& verdict, const std::map<std::string, Rational>& values);

CrossCheckReport cross_check(const AdtModel& model, const EngineOptions& engine = {}, const OracleOptions& opt = {},
                             std::size_t limit = 1U << 20U);

}  // namespace adtmas
