// Canonical printers. Printing then reparsing reproduces the value, and a
// second print is byte-identical; canonical text is the equality basis for
// golden and rollback checks.
#pragma once

#include <string>

#include "hengine/graph.hpp"
#include "hengine/pattern.hpp"
#include "hengine/system.hpp"

namespace hengine {

/// Objects sorted by id, attributes sorted by name, links in stored order,
/// class names qualified, LF endings.
std::string print_model(const InstanceGraph& g);

/// Metamodels, rules, and units sorted by name; rule elements, parameters,
/// and attribute entries keep declaration order (it is semantic).
std::string print_system(const TransformationSystem& sys);

std::string print_formula(const Formula& f);

}  // namespace hengine
