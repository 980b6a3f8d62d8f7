// Closed expression language for attribute computations and conditions.
#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "hengine/graph.hpp"
#include "hengine/value.hpp"

namespace hengine {

enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable AST. Sharing is safe; evaluation never mutates.
struct Expr {
  struct Literal {
    Value value;
  };
  struct ParamRef {
    std::string name;
  };
  struct AttrRef {
    std::string var;
    std::string attr;
  };
  struct Unary {
    UnOp op;
    ExprPtr operand;
  };
  struct Binary {
    BinOp op;
    ExprPtr lhs;
    ExprPtr rhs;
  };

  std::variant<Literal, ParamRef, AttrRef, Unary, Binary> node;
  int line = 0;
  int col = 0;
};

/// Name bindings for evaluation. Any pointer may be null, which simply means
/// that kind of name cannot be resolved.
struct EvalEnv {
  const std::map<std::string, Value>* params = nullptr;
  /// Pattern variable -> matched object, for var.attr references.
  const std::map<std::string, ObjectId>* vars = nullptr;
  const InstanceGraph* graph = nullptr;
  /// Former state of objects deleted earlier in the same rule application;
  /// consulted when var.attr points at an object no longer in the graph.
  const std::map<ObjectId, Object>* deleted = nullptr;
};

/// Parses a complete expression; trailing input is a syntax error.
ExprPtr parse_expr(std::string_view text);

/// Pure evaluation. Errors: unbound-name, eval-type-error, division-by-zero.
Value eval_expr(const Expr& e, const EvalEnv& env);

/// Renders with minimal parentheses; parse_expr(print_expr(e)) is structurally
/// equal to e.
std::string print_expr(const Expr& e);

bool expr_equal(const Expr& a, const Expr& b);

/// True iff e is a single bare parameter reference; used by the matcher to
/// implement fetch-or-compare semantics for attribute constraints.
const std::string* bare_param(const Expr& e);

}  // namespace hengine
