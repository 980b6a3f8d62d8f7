// Graph patterns, application-condition formulas, and matches.
#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hengine/expr.hpp"
#include "hengine/graph.hpp"

namespace hengine {

/// attr = expr constraint on a pattern node. A bare unbound parameter as the
/// expression binds that parameter from the matched attribute value.
struct AttrConstraint {
  std::string attr;
  ExprPtr expr;
};

struct PatternNode {
  std::string var;
  const ClassDef* cls = nullptr;
  std::vector<AttrConstraint> constraints;
};

/// Endpoints are variable names; in a condition pattern they may refer to
/// variables of the host pattern instead of local nodes.
struct PatternEdge {
  std::string src;
  std::string ref;
  std::string tgt;
};

struct Pattern {
  std::vector<PatternNode> nodes;  // declaration order fixes the search order
  std::vector<PatternEdge> edges;

  const PatternNode* find(std::string_view var) const;
};

/// One named condition graph: the existential extension a formula leaf tests.
struct ConditionGraph {
  std::string name;
  Pattern pattern;
  /// How the group was declared; drives the default formula and printing.
  bool forbid = true;
};

/// Nested application condition over a host pattern. A null Formula pointer
/// everywhere means "true". A NAC is Not(Leaf), a PAC a plain Leaf.
struct Formula {
  struct Leaf {
    std::shared_ptr<const ConditionGraph> cond;
  };
  struct Not {
    std::unique_ptr<Formula> f;
  };
  struct And {
    std::unique_ptr<Formula> l, r;
  };
  struct Or {
    std::unique_ptr<Formula> l, r;
  };

  std::variant<Leaf, Not, And, Or> node;
};

using FormulaPtr = std::unique_ptr<Formula>;

FormulaPtr make_leaf(std::shared_ptr<const ConditionGraph> cond);
FormulaPtr make_not(FormulaPtr f);
FormulaPtr make_and(FormulaPtr l, FormulaPtr r);
FormulaPtr make_or(FormulaPtr l, FormulaPtr r);
FormulaPtr clone_formula(const Formula* f);

/// A (possibly partial) assignment of pattern variables to objects plus the
/// parameter values bound so far. May carry bindings for variables outside
/// the pattern being matched; those still count for injectivity.
struct Match {
  std::map<std::string, ObjectId> bindings;
  std::map<std::string, Value> values;
};

struct MatchMode {
  bool injective = true;
};

}  // namespace hengine
