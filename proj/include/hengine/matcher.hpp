// Backtracking pattern matcher with deterministic enumeration order.
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "hengine/graph.hpp"
#include "hengine/pattern.hpp"

namespace hengine {

/// Called once per complete match; return false to stop enumeration.
using MatchCallback = std::function<bool(const Match&)>;

/// Enumerates every extension of `partial` to a complete match of `pattern`,
/// in declaration order of the pattern's nodes with candidate objects tried
/// by ascending ObjectId. Returns true iff enumeration was not cut short by
/// the callback. Bindings in `partial` for pattern variables are kept and
/// verified; extra bindings constrain injectivity only.
bool for_each_match(const Pattern& pattern, const InstanceGraph& graph, const Match& partial,
                    MatchMode mode, const MatchCallback& cb);

std::vector<Match> find_matches(const Pattern& pattern, const InstanceGraph& graph,
                                const Match& partial, MatchMode mode);

/// First match, in enumeration order, that `accept` approves (accept null =
/// accept everything).
std::optional<Match> find_first(const Pattern& pattern, const InstanceGraph& graph,
                                const Match& partial, MatchMode mode,
                                const std::function<bool(const Match&)>& accept = nullptr);

/// Classical evaluation; a Leaf holds iff its condition pattern extends the
/// host match. Null formula is true. Injectivity is inherited: condition
/// variables must stay disjoint from host-bound objects in injective mode.
bool eval_formula(const Formula* formula, const Match& host, const InstanceGraph& graph,
                  MatchMode mode);

std::size_t count_matches(const Pattern& pattern, const Formula* formula,
                          const InstanceGraph& graph, MatchMode mode);

}  // namespace hengine
