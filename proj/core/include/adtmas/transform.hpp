#pragma once

#include "adtmas/adt.hpp"
#include "adtmas/eamas.hpp"

#include <string>
#include <vector>

namespace adtmas {

struct TransformOptions {
    bool symbolic_params = false;  // declared parameters stay symbolic
    bool rational = false;         // Or gates attempt exactly one child on success
};

struct PatternInstance {
    NodeId source;
    int model = -1;
    std::vector<std::string> sends;     // <id>_ok, <id>_nok
    std::vector<std::string> receives;  // children's ok/nok
};

enum class CombineRule { Sum, TimeC, OwnChildOnly };

struct ComputationSpec {
    CombineRule rule = CombineRule::Sum;
    bool over_attempted_subset = false;  // Or gates
    Rational intrinsic = 0;
};

ComputationSpec computation_spec(const AdtModel& model, const NodeId& node, const std::string& attr);

// Agents acting in the node's own-polarity value subtree, the node included.
std::vector<AgentId> acting_agents(const AdtModel& model, const NodeId& node);

// Nodes reachable along more than one value path; their intrinsic values are counted once.
std::vector<NodeId> shared_nodes(const AdtModel& model);

EamasNetwork transform(const AdtModel& model, const TransformOptions& options = {});
std::vector<PatternInstance> pattern_instances(const AdtModel& model, const EamasNetwork& net);

std::vector<Diagnostic> structural_check(const EamasNetwork& net, const AdtModel& model);

}  // namespace adtmas
