// Transformation units: control constructs over rule applications.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hengine/rule.hpp"

namespace hengine {

/// Children are referenced by name; a name may denote a rule (implicit rule
/// call) or another unit. Resolution happens against the owning system.
struct RuleCallU {
  std::string rule;
};
struct SequentialU {
  std::vector<std::string> children;
};
struct IndependentU {
  std::vector<std::string> children;
};
struct PriorityU {
  std::vector<std::string> children;  // declaration order = priority order
};
struct CountedU {
  std::string child;
  std::int64_t count = -1;  // -1: loop as often as possible, always succeeds
};
struct ConditionalU {
  std::string if_unit;
  std::string then_unit;
  std::optional<std::string> else_unit;
};
struct AmalgamationU {
  std::string kernel;
  std::vector<std::string> multis;
};

using UnitKind =
    std::variant<RuleCallU, SequentialU, IndependentU, PriorityU, CountedU, ConditionalU,
                 AmalgamationU>;

/// Value flow edge between the unit's own parameter store ("self") and a
/// child's, or between two children. Fires into a child when it starts and
/// out of it when it succeeds, in declaration order.
struct ParamMapping {
  std::string src_unit;  // unit name; the owning unit's own name means self
  std::string src_param;
  std::string dst_unit;
  std::string dst_param;
};

struct Unit {
  std::string name;
  std::vector<ParamDecl> params;
  std::vector<ParamMapping> mappings;
  UnitKind kind;

  const ParamDecl* find_param(std::string_view n) const;
  std::vector<std::string> child_names() const;
};

}  // namespace hengine
