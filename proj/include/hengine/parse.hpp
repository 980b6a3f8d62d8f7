// File-format front end: .gts transformation systems, .gim instance models.
#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "hengine/graph.hpp"
#include "hengine/system.hpp"

namespace hengine {

/// Parses a complete system file. Throws Error with a position for syntax
/// problems and resolution failures (unknown classes, rules, parameters).
/// Metamodels must be declared before the rules that use their classes;
/// rules and units reference each other freely.
TransformationSystem parse_system(std::string_view text);

/// Parses a model file against already-registered metamodels. Unknown names
/// (classes, attributes, references, object ids) are hard errors with a
/// position. Structural problems (bad link target class, multiplicities,
/// containment) are conformance violations: with `violations` null the first
/// one is thrown as ConformanceError, otherwise they are appended and the
/// (non-conforming) graph is returned.
InstanceGraph parse_model(std::string_view text, std::shared_ptr<const TypeRegistry> types,
                          std::vector<Violation>* violations = nullptr);

}  // namespace hengine
