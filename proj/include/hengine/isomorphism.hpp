// Structural equality of instance graphs up to object identity.
#pragma once

#include "hengine/graph.hpp"

namespace hengine {

/// True iff some bijection between the object sets preserves qualified class
/// names, attribute maps, and the multiset of links. Intended for the small
/// graphs used in tests; the search backtracks with class, attribute, and
/// degree pruning.
bool isomorphic(const InstanceGraph& a, const InstanceGraph& b);

}  // namespace hengine
