// Rules: integrated source elements plus the compiled LHS/RHS view.
#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hengine/expr.hpp"
#include "hengine/pattern.hpp"

namespace hengine {

enum class ParamDir { In, Out, InOut };

struct ParamDecl {
  std::string name;
  ParamDir dir = ParamDir::In;
};

const char* param_dir_name(ParamDir d);

/// How a rule element participates in the rewrite.
enum class ElemAction { Preserve, Create, Delete, Forbid, Require };

/// attr = expr (constraint, or creation assignment) / attr := expr (forced
/// assignment on a preserved element).
struct AttrEntry {
  std::string attr;
  bool assign = false;
  ExprPtr expr;
};

struct NodeElem {
  ElemAction action;
  std::string group;  // condition name for Forbid/Require, else empty
  std::string var;
  const ClassDef* cls = nullptr;
  std::vector<AttrEntry> entries;
};

struct EdgeElem {
  ElemAction action;
  std::string group;
  std::string src;
  std::string ref;
  std::string tgt;
};

using Element = std::variant<NodeElem, EdgeElem>;

/// Attribute assignment executed after the structural rewrite.
struct Assignment {
  std::string var;  // rhs variable
  std::string attr;
  ExprPtr expr;
};

/// A rule as written (elements, declaration order preserved) together with
/// its compiled form. Preservation is by shared variable name: a variable in
/// both lhs and rhs is preserved, lhs-only is deleted, rhs-only created.
struct Rule {
  std::string name;
  std::vector<ParamDecl> params;
  std::vector<Element> elements;

  Pattern lhs;
  Pattern rhs;
  std::vector<std::shared_ptr<const ConditionGraph>> conditions;  // declaration order
  FormulaPtr condition;      // null = unconditional
  bool explicit_condition = false;  // condition clause written out in source
  std::vector<Assignment> assignments;

  const ParamDecl* find_param(std::string_view name) const;
  bool is_preserved(std::string_view var) const;
};

}  // namespace hengine
