// Unit execution with parameter flow, rollback, and seeded nondeterminism.
#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "hengine/apply.hpp"
#include "hengine/graph.hpp"
#include "hengine/system.hpp"

namespace hengine {

struct ExecContext {
  InstanceGraph& graph;
  const TransformationSystem& system;
  std::mt19937_64 rng;
  MatchMode mode;
  DeleteMode dangling = DeleteMode::ForbidDangling;
  std::uint64_t max_steps = 100000;
  std::uint64_t steps = 0;

  ExecContext(InstanceGraph& g, const TransformationSystem& sys, std::uint64_t seed = 0)
      : graph(g), system(sys), rng(seed) {}

  /// One step is one unit entry or one rule application attempt.
  void tick();
};

struct ExecResult {
  bool success = false;
  std::map<std::string, ParamValue> out_values;
};

/// Runs the unit. A failing execution leaves the graph exactly as it was;
/// engine errors (expression faults, step exhaustion) are thrown, also after
/// reverting. `in_values` seed the unit's own parameter store.
ExecResult execute(const Unit& unit, ExecContext& ctx,
                   const std::map<std::string, ParamValue>& in_values = {});

/// Validates external bindings against the root unit's declared parameters:
/// every name must exist and be in or inout direction.
void bind_parameters(const Unit& unit, const std::map<std::string, ParamValue>& external);

/// Wraps a rule so it can be executed like a unit: same name, same
/// parameters, no mappings.
Unit rule_call_unit(const Rule& rule);

}  // namespace hengine
