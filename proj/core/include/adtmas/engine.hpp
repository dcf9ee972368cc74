#pragma once

#include "adtmas/eamas.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adtmas {

enum class QueryKind { Feasible, MinAttr, MaxAttr, EnumerateOutcomes };

const char* name(QueryKind k);

struct Query {
    QueryKind kind = QueryKind::Feasible;
    std::string attr = "time";
    std::string goal = "root_ok";
};

struct EngineOptions {
    unsigned workers = 1;
    bool reduction = true;
    std::size_t state_limit = 10'000'000;
};

struct TraceStep {
    std::string actor;   // moving (or receiving) model
    std::string action;  // local action, or <sender>_<payload> for a sync
    std::vector<std::string> choices;
    friend auto operator<=>(const TraceStep&, const TraceStep&) = default;
};

struct Trace {
    std::vector<TraceStep> steps;
    std::vector<std::string> choices() const;  // sorted decision labels along the trace
};

struct OutcomeRecord {
    std::string verdict;                      // root_ok or root_nok
    std::map<std::string, Rational> values;  // root attributes
    Trace trace;
};

struct ExplorationStats {
    std::size_t states = 0;
    std::size_t transitions = 0;
    std::size_t levels = 0;
    std::size_t peak_frontier = 0;
    std::size_t pruned = 0;
    double seconds = 0;
    unsigned workers = 1;
    bool reduced = false;
};

struct QueryResult {
    bool feasible = false;
    std::optional<Rational> value;  // Min/Max
    Trace witness;                  // Feasible/Min/Max
    std::vector<OutcomeRecord> outcomes;
    ExplorationStats stats;
};

class GoalUnreachable : public std::runtime_error {
public:
    explicit GoalUnreachable(const std::string& goal) : std::runtime_error("goal '" + goal + "' is unreachable") {}
};

class StateLimitExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidQuery : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

QueryResult check(const EamasNetwork& net, const Query& q, const EngineOptions& opt = {});

// Parameter regions (one conjunction per reached goal state) under which `goal` is reachable.
std::vector<Conjunction> goal_regions(const EamasNetwork& net, const std::string& goal, const EngineOptions& opt = {},
                                      ExplorationStats* stats = nullptr);

// Re-runs a trace from the initial state; returns the reached state, or nothing if a step does not apply.
std::optional<GlobalState> replay(const EamasNetwork& net, const Trace& trace);

}  // namespace adtmas
