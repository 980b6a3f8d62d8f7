#include "hengine/expr.hpp"

#include <utility>

#include "hengine/error.hpp"
#include "expr_internal.hpp"
#include "lexer.hpp"

namespace hengine {

namespace {

using lex::Stream;
using lex::Tok;

ExprPtr make(Expr::Literal n, int line, int col) {
  return std::make_shared<Expr>(Expr{std::move(n), line, col});
}
template <class Node>
ExprPtr make_node(Node n, int line, int col) {
  return std::make_shared<Expr>(Expr{std::move(n), line, col});
}

ExprPtr parse_or(Stream& s);

ExprPtr parse_primary(Stream& s) {
  const lex::Token& t = s.peek();
  switch (t.kind) {
    case Tok::IntLit:
      s.next();
      return make(Expr::Literal{Value{t.int_val}}, t.line, t.col);
    case Tok::FloatLit:
      s.next();
      return make(Expr::Literal{Value{t.float_val}}, t.line, t.col);
    case Tok::StringLit:
      s.next();
      return make(Expr::Literal{Value{t.text}}, t.line, t.col);
    case Tok::LParen: {
      s.next();
      ExprPtr inner = parse_or(s);
      s.expect(Tok::RParen, "')'");
      return inner;
    }
    case Tok::Ident: {
      if (t.text == "true" || t.text == "false") {
        s.next();
        return make(Expr::Literal{Value{t.text == "true"}}, t.line, t.col);
      }
      s.next();
      if (s.at(Tok::Dot)) {
        s.next();
        lex::Token attr = s.expect_ident("attribute name");
        return make_node(Expr::AttrRef{t.text, attr.text}, t.line, t.col);
      }
      return make_node(Expr::ParamRef{t.text}, t.line, t.col);
    }
    default:
      s.fail(std::string("expected expression, got ") + lex::token_name(t.kind));
  }
}

ExprPtr parse_unary(Stream& s) {
  const lex::Token& t = s.peek();
  if (t.kind == Tok::Minus) {
    s.next();
    return make_node(Expr::Unary{UnOp::Neg, parse_unary(s)}, t.line, t.col);
  }
  if (t.kind == Tok::Not) {
    s.next();
    return make_node(Expr::Unary{UnOp::Not, parse_unary(s)}, t.line, t.col);
  }
  return parse_primary(s);
}

ExprPtr parse_mul(Stream& s) {
  ExprPtr e = parse_unary(s);
  while (true) {
    BinOp op;
    if (s.at(Tok::Star)) op = BinOp::Mul;
    else if (s.at(Tok::Slash)) op = BinOp::Div;
    else if (s.at(Tok::Percent)) op = BinOp::Mod;
    else return e;
    const lex::Token& t = s.next();
    e = make_node(Expr::Binary{op, std::move(e), parse_unary(s)}, t.line, t.col);
  }
}

ExprPtr parse_add(Stream& s) {
  ExprPtr e = parse_mul(s);
  while (true) {
    BinOp op;
    if (s.at(Tok::Plus)) op = BinOp::Add;
    else if (s.at(Tok::Minus)) op = BinOp::Sub;
    else return e;
    const lex::Token& t = s.next();
    e = make_node(Expr::Binary{op, std::move(e), parse_mul(s)}, t.line, t.col);
  }
}

ExprPtr parse_cmp(Stream& s) {
  ExprPtr e = parse_add(s);
  while (true) {
    BinOp op;
    if (s.at(Tok::EqEq)) op = BinOp::Eq;
    else if (s.at(Tok::NotEq)) op = BinOp::Ne;
    else if (s.at(Tok::Lt)) op = BinOp::Lt;
    else if (s.at(Tok::Le)) op = BinOp::Le;
    else if (s.at(Tok::Gt)) op = BinOp::Gt;
    else if (s.at(Tok::Ge)) op = BinOp::Ge;
    else return e;
    const lex::Token& t = s.next();
    e = make_node(Expr::Binary{op, std::move(e), parse_add(s)}, t.line, t.col);
  }
}

ExprPtr parse_and(Stream& s) {
  ExprPtr e = parse_cmp(s);
  while (s.at(Tok::AndAnd)) {
    const lex::Token& t = s.next();
    e = make_node(Expr::Binary{BinOp::And, std::move(e), parse_cmp(s)}, t.line, t.col);
  }
  return e;
}

ExprPtr parse_or(Stream& s) {
  ExprPtr e = parse_and(s);
  while (s.at(Tok::OrOr)) {
    const lex::Token& t = s.next();
    e = make_node(Expr::Binary{BinOp::Or, std::move(e), parse_and(s)}, t.line, t.col);
  }
  return e;
}

[[noreturn]] void eval_fail(const Expr& e, ErrorCode code, std::string msg) {
  throw Error(code, std::move(msg), e.line, e.col);
}

bool is_numeric(const Value& v) {
  return type_of(v) == PrimType::Int || type_of(v) == PrimType::Float;
}

double as_double(const Value& v) {
  return type_of(v) == PrimType::Int ? static_cast<double>(std::get<std::int64_t>(v))
                                     : std::get<double>(v);
}

const char* binop_text(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
  }
  return "?";
}

Value eval_arith(const Expr& e, BinOp op, const Value& l, const Value& r) {
  if (op == BinOp::Add && type_of(l) == PrimType::String && type_of(r) == PrimType::String) {
    return std::get<std::string>(l) + std::get<std::string>(r);
  }
  if (!is_numeric(l) || !is_numeric(r)) {
    eval_fail(e, ErrorCode::EvalTypeError,
              std::string("operator ") + binop_text(op) + " needs numeric operands, got " +
                  type_name(type_of(l)) + " and " + type_name(type_of(r)));
  }
  if (op == BinOp::Mod) {
    if (type_of(l) != PrimType::Int || type_of(r) != PrimType::Int) {
      eval_fail(e, ErrorCode::EvalTypeError, "operator % needs int operands");
    }
    std::int64_t d = std::get<std::int64_t>(r);
    if (d == 0) eval_fail(e, ErrorCode::DivisionByZero, "modulo by zero");
    return std::get<std::int64_t>(l) % d;
  }
  if (type_of(l) == PrimType::Int && type_of(r) == PrimType::Int) {
    std::int64_t a = std::get<std::int64_t>(l), b = std::get<std::int64_t>(r);
    switch (op) {
      case BinOp::Add: return a + b;
      case BinOp::Sub: return a - b;
      case BinOp::Mul: return a * b;
      case BinOp::Div:
        if (b == 0) eval_fail(e, ErrorCode::DivisionByZero, "division by zero");
        return a / b;
      default: break;
    }
  }
  double a = as_double(l), b = as_double(r);
  switch (op) {
    case BinOp::Add: return a + b;
    case BinOp::Sub: return a - b;
    case BinOp::Mul: return a * b;
    case BinOp::Div: return a / b;
    default: break;
  }
  eval_fail(e, ErrorCode::EvalTypeError, "bad arithmetic operator");
}

Value eval_compare(const Expr& e, BinOp op, const Value& l, const Value& r) {
  if (is_numeric(l) && is_numeric(r)) {
    if (type_of(l) == PrimType::Int && type_of(r) == PrimType::Int) {
      std::int64_t a = std::get<std::int64_t>(l), b = std::get<std::int64_t>(r);
      switch (op) {
        case BinOp::Eq: return a == b;
        case BinOp::Ne: return a != b;
        case BinOp::Lt: return a < b;
        case BinOp::Le: return a <= b;
        case BinOp::Gt: return a > b;
        case BinOp::Ge: return a >= b;
        default: break;
      }
    }
    double a = as_double(l), b = as_double(r);
    switch (op) {
      case BinOp::Eq: return a == b;
      case BinOp::Ne: return a != b;
      case BinOp::Lt: return a < b;
      case BinOp::Le: return a <= b;
      case BinOp::Gt: return a > b;
      case BinOp::Ge: return a >= b;
      default: break;
    }
  }
  if (type_of(l) == PrimType::String && type_of(r) == PrimType::String) {
    const std::string &a = std::get<std::string>(l), &b = std::get<std::string>(r);
    switch (op) {
      case BinOp::Eq: return a == b;
      case BinOp::Ne: return a != b;
      case BinOp::Lt: return a < b;
      case BinOp::Le: return a <= b;
      case BinOp::Gt: return a > b;
      case BinOp::Ge: return a >= b;
      default: break;
    }
  }
  if (type_of(l) == PrimType::Bool && type_of(r) == PrimType::Bool &&
      (op == BinOp::Eq || op == BinOp::Ne)) {
    return op == BinOp::Eq ? std::get<bool>(l) == std::get<bool>(r)
                           : std::get<bool>(l) != std::get<bool>(r);
  }
  eval_fail(e, ErrorCode::EvalTypeError,
            std::string("cannot compare ") + type_name(type_of(l)) + " with " +
                type_name(type_of(r)));
}

bool eval_bool(const Expr& e, const EvalEnv& env) {
  Value v = eval_expr(e, env);
  if (type_of(v) != PrimType::Bool) {
    eval_fail(e, ErrorCode::EvalTypeError,
              std::string("expected bool, got ") + type_name(type_of(v)));
  }
  return std::get<bool>(v);
}

// Precedence levels for minimal-parenthesis printing; higher binds tighter.
int precedence(BinOp op) {
  switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq:
    case BinOp::Ne:
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return 3;
    case BinOp::Add:
    case BinOp::Sub: return 4;
    case BinOp::Mul:
    case BinOp::Div:
    case BinOp::Mod: return 5;
  }
  return 0;
}
constexpr int kUnaryPrec = 6;

void print_rec(const Expr& e, int parent_prec, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Literal>) {
          out += to_literal(n.value);
        } else if constexpr (std::is_same_v<T, Expr::ParamRef>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, Expr::AttrRef>) {
          out += n.var;
          out += '.';
          out += n.attr;
        } else if constexpr (std::is_same_v<T, Expr::Unary>) {
          bool parens = parent_prec > kUnaryPrec;
          if (parens) out += '(';
          out += n.op == UnOp::Neg ? '-' : '!';
          print_rec(*n.operand, kUnaryPrec, out);
          if (parens) out += ')';
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          int prec = precedence(n.op);
          bool parens = parent_prec > prec;
          if (parens) out += '(';
          print_rec(*n.lhs, prec, out);
          out += ' ';
          out += binop_text(n.op);
          out += ' ';
          // Left associative: the right child needs strictly higher binding.
          print_rec(*n.rhs, prec + 1, out);
          if (parens) out += ')';
        }
      },
      e.node);
}

}  // namespace

ExprPtr parse_expr_stream(lex::Stream& s) { return parse_or(s); }

ExprPtr parse_expr(std::string_view text) {
  lex::Stream s(lex::tokenize(text));
  ExprPtr e = parse_expr_stream(s);
  if (!s.at(lex::Tok::Eof)) {
    s.fail(std::string("unexpected ") + lex::token_name(s.peek().kind) + " after expression");
  }
  return e;
}

Value eval_expr(const Expr& e, const EvalEnv& env) {
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Literal>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, Expr::ParamRef>) {
          if (env.params) {
            auto it = env.params->find(n.name);
            if (it != env.params->end()) return it->second;
          }
          eval_fail(e, ErrorCode::UnboundName, "unbound name '" + n.name + "'");
        } else if constexpr (std::is_same_v<T, Expr::AttrRef>) {
          if (!env.vars) {
            eval_fail(e, ErrorCode::UnboundName, "no variables in scope for '" + n.var + "'");
          }
          auto it = env.vars->find(n.var);
          if (it == env.vars->end()) {
            eval_fail(e, ErrorCode::UnboundName, "unbound variable '" + n.var + "'");
          }
          ObjectId id = it->second;
          const Object* obj = nullptr;
          if (env.graph && env.graph->has_object(id)) {
            obj = &env.graph->object(id);
          } else if (env.deleted) {
            auto dit = env.deleted->find(id);
            if (dit != env.deleted->end()) obj = &dit->second;
          }
          if (!obj) {
            eval_fail(e, ErrorCode::UnknownObject,
                      "variable '" + n.var + "' refers to no live object");
          }
          auto ait = obj->attrs.find(n.attr);
          if (ait == obj->attrs.end()) {
            eval_fail(e, ErrorCode::UnknownAttribute,
                      "class " + obj->cls->qualified() + " has no attribute '" + n.attr + "'");
          }
          return ait->second;
        } else if constexpr (std::is_same_v<T, Expr::Unary>) {
          if (n.op == UnOp::Not) {
            return !eval_bool(*n.operand, env);
          }
          Value v = eval_expr(*n.operand, env);
          if (type_of(v) == PrimType::Int) return -std::get<std::int64_t>(v);
          if (type_of(v) == PrimType::Float) return -std::get<double>(v);
          eval_fail(e, ErrorCode::EvalTypeError,
                    std::string("unary - needs a numeric operand, got ") +
                        type_name(type_of(v)));
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          if (n.op == BinOp::And) {
            return eval_bool(*n.lhs, env) && eval_bool(*n.rhs, env);
          }
          if (n.op == BinOp::Or) {
            return eval_bool(*n.lhs, env) || eval_bool(*n.rhs, env);
          }
          Value l = eval_expr(*n.lhs, env);
          Value r = eval_expr(*n.rhs, env);
          switch (n.op) {
            case BinOp::Add:
            case BinOp::Sub:
            case BinOp::Mul:
            case BinOp::Div:
            case BinOp::Mod: return eval_arith(e, n.op, l, r);
            default: return eval_compare(e, n.op, l, r);
          }
        }
      },
      e.node);
}

std::string print_expr(const Expr& e) {
  std::string out;
  print_rec(e, 0, out);
  return out;
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        const auto& m = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Expr::Literal>) {
          return n.value == m.value;
        } else if constexpr (std::is_same_v<T, Expr::ParamRef>) {
          return n.name == m.name;
        } else if constexpr (std::is_same_v<T, Expr::AttrRef>) {
          return n.var == m.var && n.attr == m.attr;
        } else if constexpr (std::is_same_v<T, Expr::Unary>) {
          return n.op == m.op && expr_equal(*n.operand, *m.operand);
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          return n.op == m.op && expr_equal(*n.lhs, *m.lhs) && expr_equal(*n.rhs, *m.rhs);
        }
      },
      a.node);
}

const std::string* bare_param(const Expr& e) {
  if (const auto* p = std::get_if<Expr::ParamRef>(&e.node)) return &p->name;
  return nullptr;
}

}  // namespace hengine
