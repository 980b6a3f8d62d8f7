// Single-rule and amalgamated (kernel/multi) rule application.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hengine/graph.hpp"
#include "hengine/matcher.hpp"
#include "hengine/rule.hpp"

namespace hengine {

/// A parameter carries either a primitive value or an object.
using ParamValue = std::variant<Value, ObjectId>;

std::string param_value_text(const ParamValue& v, const InstanceGraph& g);

struct ApplyOutcome {
  bool success = false;
  std::map<std::string, ParamValue> out_values;
  std::size_t edits = 0;
};

/// Applies the first (deterministic order) match satisfying the condition
/// formula and, under forbid-dangling, leaving no dangling link. Deletion
/// order: links, then objects; then creations; then assignments. Failure to
/// match leaves the graph untouched and is not an error; expression errors
/// during the rewrite revert the application and are rethrown.
ApplyOutcome apply_rule(const Rule& rule, InstanceGraph& graph,
                        const std::map<std::string, ParamValue>& pre_bindings, MatchMode mode,
                        DeleteMode dangling);

/// The match apply_rule would use, without mutating the graph.
std::optional<Match> applicable(const Rule& rule, const InstanceGraph& graph,
                                const std::map<std::string, ParamValue>& pre_bindings,
                                MatchMode mode, DeleteMode dangling);

/// One kernel match is fixed (first viable in deterministic order); every
/// multi-rule match extending it is collected against the unmodified graph;
/// kernel and multi effects then apply as one atomic step. Multi variables
/// sharing a kernel variable's name are bound by the kernel match. Zero multi
/// matches is still success; no viable kernel match is failure.
ApplyOutcome apply_amalgamated(const Rule& kernel, const std::vector<const Rule*>& multis,
                               InstanceGraph& graph,
                               const std::map<std::string, ParamValue>& pre_bindings,
                               MatchMode mode, DeleteMode dangling);

}  // namespace hengine
