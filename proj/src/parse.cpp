#include "hengine/parse.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <utility>

#include "hengine/error.hpp"
#include "expr_internal.hpp"
#include "lexer.hpp"

namespace hengine {

namespace {

using lex::Stream;
using lex::Tok;
using lex::Token;

[[noreturn]] void resolve_fail(const Token& at, std::string msg) {
  throw Error(ErrorCode::ResolutionError, std::move(msg), at.line, at.col);
}

/// find_class with the reference's source position attached to any error
/// (unknown class, ambiguous bare name).
const ClassDef* find_class_at(const TypeRegistry& types, const Token& at,
                              const std::string& text) {
  try {
    const ClassDef* cls = types.find_class(text);
    if (!cls) throw Error(ErrorCode::UnknownClass, "unknown class '" + text + "'");
    return cls;
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), at.line, at.col);
  }
}

PrimType parse_prim_type(Stream& s) {
  Token t = s.expect_ident("attribute type");
  if (t.text == "string") return PrimType::String;
  if (t.text == "int") return PrimType::Int;
  if (t.text == "float") return PrimType::Float;
  if (t.text == "bool") return PrimType::Bool;
  throw Error(ErrorCode::SyntaxError, "unknown type '" + t.text + "'", t.line, t.col);
}

/// classref := IDENT [ "." IDENT ]; returns the textual form.
std::pair<Token, std::string> parse_classref(Stream& s) {
  Token first = s.expect_ident("class name");
  std::string text = first.text;
  if (s.eat(Tok::Dot)) {
    Token cls = s.expect_ident("class name");
    text += "." + cls.text;
  }
  return {first, text};
}

// ---------------------------------------------------------------------------
// metamodels

Metamodel parse_metamodel(Stream& s) {
  Metamodel mm;
  mm.name = s.expect_ident("metamodel name").text;
  s.expect(Tok::LBrace, "'{'");
  while (!s.eat(Tok::RBrace)) {
    Token kw = s.expect_ident("'class'");
    if (kw.text != "class") {
      throw Error(ErrorCode::SyntaxError, "expected 'class', got '" + kw.text + "'", kw.line,
                  kw.col);
    }
    ClassDef cls;
    cls.name = s.expect_ident("class name").text;
    s.expect(Tok::LBrace, "'{'");
    while (!s.eat(Tok::RBrace)) {
      Token f = s.expect_ident("'attr', 'ref', or 'contains'");
      if (f.text == "attr") {
        Token name = s.expect_ident("attribute name");
        s.expect(Tok::Colon, "':'");
        PrimType t = parse_prim_type(s);
        if (!cls.attributes.emplace(name.text, t).second) {
          resolve_fail(name, "duplicate attribute '" + name.text + "'");
        }
      } else if (f.text == "ref" || f.text == "contains") {
        Token name = s.expect_ident("reference name");
        s.expect(Tok::Colon, "':'");
        Token bound = s.expect_ident("'one' or 'many'");
        if (bound.text != "one" && bound.text != "many") {
          throw Error(ErrorCode::SyntaxError, "expected 'one' or 'many', got '" + bound.text + "'",
                      bound.line, bound.col);
        }
        auto [tok, target] = parse_classref(s);
        (void)tok;
        RefDef ref;
        ref.target_class = target;  // qualified after registration
        ref.many = bound.text == "many";
        ref.containment = f.text == "contains";
        if (!cls.references.emplace(name.text, ref).second) {
          resolve_fail(name, "duplicate reference '" + name.text + "'");
        }
      } else {
        throw Error(ErrorCode::SyntaxError,
                    "expected 'attr', 'ref', or 'contains', got '" + f.text + "'", f.line, f.col);
      }
    }
    mm.classes.push_back(std::move(cls));
  }
  return mm;
}

// ---------------------------------------------------------------------------
// rules

/// Name-level boolean formula, resolved against condition groups once the
/// whole rule body has been read.
struct FAst {
  struct Name {
    Token tok;
  };
  struct NotF {
    std::unique_ptr<FAst> f;
  };
  struct AndF {
    std::unique_ptr<FAst> l, r;
  };
  struct OrF {
    std::unique_ptr<FAst> l, r;
  };
  std::variant<Name, NotF, AndF, OrF> node;
};
using FAstPtr = std::unique_ptr<FAst>;

FAstPtr parse_formula_or(Stream& s);

FAstPtr parse_formula_atom(Stream& s) {
  if (s.eat(Tok::Not)) {
    return std::make_unique<FAst>(FAst{FAst::NotF{parse_formula_atom(s)}});
  }
  if (s.eat(Tok::LParen)) {
    FAstPtr f = parse_formula_or(s);
    s.expect(Tok::RParen, "')'");
    return f;
  }
  Token name = s.expect_ident("condition name");
  return std::make_unique<FAst>(FAst{FAst::Name{name}});
}

FAstPtr parse_formula_and_chain(Stream& s) {
  FAstPtr f = parse_formula_atom(s);
  while (s.eat(Tok::Amp)) {
    f = std::make_unique<FAst>(FAst{FAst::AndF{std::move(f), parse_formula_atom(s)}});
  }
  return f;
}

FAstPtr parse_formula_or(Stream& s) {
  FAstPtr f = parse_formula_and_chain(s);
  while (s.eat(Tok::Pipe)) {
    f = std::make_unique<FAst>(FAst{FAst::OrF{std::move(f), parse_formula_and_chain(s)}});
  }
  return f;
}

struct RuleBuilder {
  Rule rule;
  struct VarInfo {
    ElemAction action;
    std::string group;
  };
  std::map<std::string, VarInfo> vars;  // every declared element var
  struct Group {
    ElemAction kind;
    Pattern pattern;
  };
  std::map<std::string, Group> groups;
  std::vector<std::string> group_order;  // first-appearance order
  FAstPtr condition_ast;
  Token condition_tok;

  void add_node(NodeElem n, const Token& at);
  void add_edge(EdgeElem e, const Token& at);
  void finish();

 private:
  Group& group_for(const std::string& name, ElemAction kind, const Token& at);
  void check_endpoint(const std::string& var, bool lhs_side, bool rhs_side,
                      const std::string& group, const Token& at) const;
  FormulaPtr resolve_formula(const FAst& ast,
                             const std::map<std::string, std::shared_ptr<const ConditionGraph>>&
                                 by_name,
                             std::set<std::string>& used) const;
};

RuleBuilder::Group& RuleBuilder::group_for(const std::string& name, ElemAction kind,
                                           const Token& at) {
  auto it = groups.find(name);
  if (it == groups.end()) {
    group_order.push_back(name);
    it = groups.emplace(name, Group{kind, {}}).first;
  } else if (it->second.kind != kind) {
    resolve_fail(at, "condition '" + name + "' mixes forbid and require elements");
  }
  return it->second;
}

void RuleBuilder::add_node(NodeElem n, const Token& at) {
  if (vars.count(n.var)) {
    resolve_fail(at, "variable '" + n.var + "' declared twice");
  }
  for (const AttrEntry& entry : n.entries) {
    if (!n.cls->attributes.count(entry.attr)) {
      resolve_fail(at, "class " + n.cls->qualified() + " has no attribute '" + entry.attr + "'");
    }
    if (entry.assign && n.action != ElemAction::Preserve && n.action != ElemAction::Create) {
      resolve_fail(at, "':=' assigns, which only preserved or created elements support");
    }
  }
  vars.emplace(n.var, VarInfo{n.action, n.group});

  PatternNode pn{n.var, n.cls, {}};
  for (const AttrEntry& entry : n.entries) {
    bool is_assignment = n.action == ElemAction::Create || entry.assign;
    if (is_assignment) {
      rule.assignments.push_back({n.var, entry.attr, entry.expr});
    } else {
      pn.constraints.push_back({entry.attr, entry.expr});
    }
  }
  switch (n.action) {
    case ElemAction::Preserve:
      rule.lhs.nodes.push_back(pn);
      rule.rhs.nodes.push_back({n.var, n.cls, {}});
      break;
    case ElemAction::Delete:
      rule.lhs.nodes.push_back(pn);
      break;
    case ElemAction::Create:
      rule.rhs.nodes.push_back({n.var, n.cls, {}});
      break;
    case ElemAction::Forbid:
    case ElemAction::Require:
      group_for(n.group, n.action, at).pattern.nodes.push_back(pn);
      break;
  }
  rule.elements.push_back(std::move(n));
}

void RuleBuilder::check_endpoint(const std::string& var, bool lhs_side, bool rhs_side,
                                 const std::string& group, const Token& at) const {
  auto it = vars.find(var);
  if (it == vars.end()) {
    resolve_fail(at, "link endpoint '" + var + "' is not a declared element");
  }
  ElemAction a = it->second.action;
  bool in_lhs = a == ElemAction::Preserve || a == ElemAction::Delete;
  bool in_rhs = a == ElemAction::Preserve || a == ElemAction::Create;
  bool in_group = (a == ElemAction::Forbid || a == ElemAction::Require) &&
                  it->second.group == group;
  if (!group.empty()) {
    if (!in_lhs && !in_group) {
      resolve_fail(at, "condition link endpoint '" + var +
                           "' belongs to neither the rule pattern nor condition '" + group + "'");
    }
    return;
  }
  if (lhs_side && !in_lhs) {
    resolve_fail(at, "matched link endpoint '" + var + "' is not matched itself");
  }
  if (rhs_side && !in_rhs) {
    resolve_fail(at, "surviving link endpoint '" + var + "' does not survive");
  }
}

void RuleBuilder::add_edge(EdgeElem e, const Token& at) {
  PatternEdge pe{e.src, e.ref, e.tgt};
  switch (e.action) {
    case ElemAction::Preserve:
      check_endpoint(e.src, true, true, "", at);
      check_endpoint(e.tgt, true, true, "", at);
      rule.lhs.edges.push_back(pe);
      rule.rhs.edges.push_back(pe);
      break;
    case ElemAction::Delete:
      check_endpoint(e.src, true, false, "", at);
      check_endpoint(e.tgt, true, false, "", at);
      rule.lhs.edges.push_back(pe);
      break;
    case ElemAction::Create:
      check_endpoint(e.src, false, true, "", at);
      check_endpoint(e.tgt, false, true, "", at);
      rule.rhs.edges.push_back(pe);
      break;
    case ElemAction::Forbid:
    case ElemAction::Require:
      check_endpoint(e.src, false, false, e.group, at);
      check_endpoint(e.tgt, false, false, e.group, at);
      group_for(e.group, e.action, at).pattern.edges.push_back(pe);
      break;
  }
  rule.elements.push_back(std::move(e));
}

FormulaPtr RuleBuilder::resolve_formula(
    const FAst& ast,
    const std::map<std::string, std::shared_ptr<const ConditionGraph>>& by_name,
    std::set<std::string>& used) const {
  return std::visit(
      [&](const auto& n) -> FormulaPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FAst::Name>) {
          auto it = by_name.find(n.tok.text);
          if (it == by_name.end()) {
            resolve_fail(n.tok, "no condition named '" + n.tok.text + "'");
          }
          used.insert(n.tok.text);
          return make_leaf(it->second);
        } else if constexpr (std::is_same_v<T, FAst::NotF>) {
          return make_not(resolve_formula(*n.f, by_name, used));
        } else if constexpr (std::is_same_v<T, FAst::AndF>) {
          return make_and(resolve_formula(*n.l, by_name, used),
                          resolve_formula(*n.r, by_name, used));
        } else {
          return make_or(resolve_formula(*n.l, by_name, used),
                         resolve_formula(*n.r, by_name, used));
        }
      },
      ast.node);
}

void RuleBuilder::finish() {
  std::map<std::string, std::shared_ptr<const ConditionGraph>> by_name;
  for (const std::string& name : group_order) {
    Group& g = groups.at(name);
    auto cond = std::make_shared<ConditionGraph>(
        ConditionGraph{name, std::move(g.pattern), g.kind == ElemAction::Forbid});
    rule.conditions.push_back(cond);
    by_name.emplace(name, std::move(cond));
  }

  if (condition_ast) {
    std::set<std::string> used;
    rule.condition = resolve_formula(*condition_ast, by_name, used);
    rule.explicit_condition = true;
    for (const std::string& name : group_order) {
      if (!used.count(name)) {
        resolve_fail(condition_tok, "condition '" + name + "' is never referenced");
      }
    }
  } else {
    FormulaPtr f;
    for (const std::string& name : group_order) {
      FormulaPtr atom = make_leaf(by_name.at(name));
      if (groups.at(name).kind == ElemAction::Forbid) atom = make_not(std::move(atom));
      f = f ? make_and(std::move(f), std::move(atom)) : std::move(atom);
    }
    rule.condition = std::move(f);
  }
}

std::vector<AttrEntry> parse_attr_entries(Stream& s) {
  std::vector<AttrEntry> entries;
  if (!s.eat(Tok::LBrace)) return entries;
  if (s.eat(Tok::RBrace)) return entries;
  while (true) {
    Token attr = s.expect_ident("attribute name");
    bool assign;
    if (s.eat(Tok::ColonEq)) {
      assign = true;
    } else if (s.eat(Tok::Eq)) {
      assign = false;
    } else {
      s.fail("expected '=' or ':=' after attribute name");
    }
    AttrEntry e{attr.text, assign, parse_expr_stream(s)};
    entries.push_back(std::move(e));
    if (s.eat(Tok::Comma)) continue;
    s.expect(Tok::RBrace, "'}'");
    return entries;
  }
}

ParamDir parse_dir(Stream& s) {
  Token d = s.expect_ident("'in', 'out', or 'inout'");
  if (d.text == "in") return ParamDir::In;
  if (d.text == "out") return ParamDir::Out;
  if (d.text == "inout") return ParamDir::InOut;
  throw Error(ErrorCode::SyntaxError, "expected 'in', 'out', or 'inout', got '" + d.text + "'",
              d.line, d.col);
}

Rule parse_rule(Stream& s, const TypeRegistry& types) {
  Token name = s.expect_ident("rule name");
  RuleBuilder b;
  b.rule.name = name.text;
  s.expect(Tok::LBrace, "'{'");

  while (!s.eat(Tok::RBrace)) {
    Token kw = s.expect_ident("rule item");
    if (kw.text == "param") {
      Token pn = s.expect_ident("parameter name");
      s.expect(Tok::Colon, "':'");
      ParamDir dir = parse_dir(s);
      for (const ParamDecl& p : b.rule.params) {
        if (p.name == pn.text) resolve_fail(pn, "parameter '" + pn.text + "' declared twice");
      }
      b.rule.params.push_back({pn.text, dir});
      continue;
    }
    if (kw.text == "condition") {
      if (b.condition_ast) resolve_fail(kw, "a rule has at most one condition clause");
      s.expect(Tok::Eq, "'='");
      b.condition_tok = kw;
      b.condition_ast = parse_formula_or(s);
      continue;
    }

    ElemAction action;
    std::string group;
    if (kw.text == "preserve") {
      action = ElemAction::Preserve;
    } else if (kw.text == "create") {
      action = ElemAction::Create;
    } else if (kw.text == "delete") {
      action = ElemAction::Delete;
    } else if (kw.text == "forbid" || kw.text == "require") {
      action = kw.text == "forbid" ? ElemAction::Forbid : ElemAction::Require;
      s.expect(Tok::LParen, "'('");
      group = s.expect_ident("condition name").text;
      s.expect(Tok::RParen, "')'");
    } else {
      throw Error(ErrorCode::SyntaxError,
                  "expected 'param', 'condition', 'preserve', 'create', 'delete', 'forbid', or "
                  "'require', got '" +
                      kw.text + "'",
                  kw.line, kw.col);
    }

    Token first = s.expect_ident("element variable");
    if (s.eat(Tok::Colon)) {
      auto [cls_tok, cls_text] = parse_classref(s);
      const ClassDef* cls = find_class_at(types, cls_tok, cls_text);
      NodeElem n{action, group, first.text, cls, parse_attr_entries(s)};
      b.add_node(std::move(n), first);
    } else if (s.eat(Tok::Minus)) {
      Token ref = s.expect_ident("reference name");
      s.expect(Tok::Arrow, "'->'");
      Token tgt = s.expect_ident("target variable");
      EdgeElem e{action, group, first.text, ref.text, tgt.text};
      b.add_edge(std::move(e), first);
    } else {
      s.fail("expected ':' (node element) or '-ref->' (link element)");
    }
  }

  b.finish();
  return std::move(b.rule);
}

// ---------------------------------------------------------------------------
// units

std::vector<std::string> parse_name_list(Stream& s) {
  std::vector<std::string> names;
  s.expect(Tok::LBracket, "'['");
  if (s.eat(Tok::RBracket)) return names;
  while (true) {
    names.push_back(s.expect_ident("rule or unit name").text);
    if (s.eat(Tok::Comma)) continue;
    s.expect(Tok::RBracket, "']'");
    return names;
  }
}

Unit parse_unit(Stream& s) {
  Unit u;
  Token name = s.expect_ident("unit name");
  u.name = name.text;
  s.expect(Tok::Eq, "'='");
  Token kind = s.expect_ident("unit kind");
  if (kind.text == "sequential") {
    u.kind = SequentialU{parse_name_list(s)};
  } else if (kind.text == "independent") {
    u.kind = IndependentU{parse_name_list(s)};
  } else if (kind.text == "priority") {
    u.kind = PriorityU{parse_name_list(s)};
  } else if (kind.text == "counted") {
    s.expect(Tok::LParen, "'('");
    bool neg = s.eat(Tok::Minus);
    Token n = s.expect(Tok::IntLit, "count");
    s.expect(Tok::RParen, "')'");
    std::int64_t count = neg ? -n.int_val : n.int_val;
    if (count < -1) {
      throw Error(ErrorCode::SyntaxError, "count must be >= -1", n.line, n.col);
    }
    std::vector<std::string> children = parse_name_list(s);
    if (children.size() != 1) {
      throw Error(ErrorCode::SyntaxError, "a counted unit has exactly one subunit", name.line,
                  name.col);
    }
    u.kind = CountedU{children[0], count};
  } else if (kind.text == "conditional") {
    ConditionalU c;
    if (!s.eat_ident("if")) s.fail("expected 'if'");
    c.if_unit = s.expect_ident("unit name").text;
    if (!s.eat_ident("then")) s.fail("expected 'then'");
    c.then_unit = s.expect_ident("unit name").text;
    if (s.eat_ident("else")) c.else_unit = s.expect_ident("unit name").text;
    u.kind = std::move(c);
  } else if (kind.text == "amalgamation") {
    AmalgamationU a;
    if (!s.eat_ident("kernel")) s.fail("expected 'kernel'");
    a.kernel = s.expect_ident("kernel rule name").text;
    if (!s.eat_ident("multis")) s.fail("expected 'multis'");
    a.multis = parse_name_list(s);
    u.kind = std::move(a);
  } else {
    throw Error(ErrorCode::SyntaxError, "unknown unit kind '" + kind.text + "'", kind.line,
                kind.col);
  }

  if (s.eat(Tok::LBrace)) {
    while (!s.eat(Tok::RBrace)) {
      Token kw = s.expect_ident("'param' or 'map'");
      if (kw.text == "param") {
        Token pn = s.expect_ident("parameter name");
        s.expect(Tok::Colon, "':'");
        ParamDir dir = parse_dir(s);
        for (const ParamDecl& p : u.params) {
          if (p.name == pn.text) resolve_fail(pn, "parameter '" + pn.text + "' declared twice");
        }
        u.params.push_back({pn.text, dir});
      } else if (kw.text == "map") {
        ParamMapping m;
        m.src_unit = s.expect_ident("unit name").text;
        s.expect(Tok::Dot, "'.'");
        m.src_param = s.expect_ident("parameter name").text;
        s.expect(Tok::Arrow, "'->'");
        m.dst_unit = s.expect_ident("unit name").text;
        s.expect(Tok::Dot, "'.'");
        m.dst_param = s.expect_ident("parameter name").text;
        u.mappings.push_back(std::move(m));
      } else {
        throw Error(ErrorCode::SyntaxError, "expected 'param' or 'map', got '" + kw.text + "'",
                    kw.line, kw.col);
      }
    }
  }
  return u;
}

// ---------------------------------------------------------------------------
// cross-reference validation

[[noreturn]] void sys_resolve_fail(std::string msg) {
  throw Error(ErrorCode::ResolutionError, std::move(msg));
}

const std::vector<ParamDecl>* params_of(const TransformationSystem& sys,
                                        const std::string& name) {
  if (const Rule* r = sys.find_rule(name)) return &r->params;
  if (const Unit* u = sys.find_unit(name)) return &u->params;
  return nullptr;
}

void validate_mappings(const TransformationSystem& sys, const Unit& u) {
  std::set<std::string> children;
  for (const std::string& c : u.child_names()) children.insert(c);

  for (const ParamMapping& m : u.mappings) {
    for (const std::string& end : {m.src_unit, m.dst_unit}) {
      if (end != u.name && !children.count(end)) {
        sys_resolve_fail("unit " + u.name + ": mapping endpoint '" + end +
                         "' is neither this unit nor one of its subunits");
      }
    }
    auto param_of = [&](const std::string& unit, const std::string& param) -> const ParamDecl* {
      const std::vector<ParamDecl>* ps =
          unit == u.name ? &u.params : params_of(sys, unit);
      if (!ps) return nullptr;
      for (const ParamDecl& p : *ps) {
        if (p.name == param) return &p;
      }
      return nullptr;
    };
    const ParamDecl* src = param_of(m.src_unit, m.src_param);
    if (!src) {
      sys_resolve_fail("unit " + u.name + ": no parameter " + m.src_unit + "." + m.src_param);
    }
    const ParamDecl* dst = param_of(m.dst_unit, m.dst_param);
    if (!dst) {
      sys_resolve_fail("unit " + u.name + ": no parameter " + m.dst_unit + "." + m.dst_param);
    }
    if (m.src_unit != u.name && src->dir == ParamDir::In) {
      sys_resolve_fail("unit " + u.name + ": " + m.src_unit + "." + m.src_param +
                       " is in-only and cannot be read back");
    }
    if (m.dst_unit != u.name && dst->dir == ParamDir::Out) {
      sys_resolve_fail("unit " + u.name + ": " + m.dst_unit + "." + m.dst_param +
                       " is out-only and cannot be fed");
    }
    if (m.dst_unit == u.name && dst->dir == ParamDir::In) {
      sys_resolve_fail("unit " + u.name + ": own parameter " + m.dst_param +
                       " is in-only and cannot be updated");
    }
  }
}

void validate_amalgamation(const TransformationSystem& sys, const Unit& u,
                           const AmalgamationU& a) {
  const Rule* kernel = sys.find_rule(a.kernel);
  if (!kernel) {
    sys_resolve_fail("unit " + u.name + ": kernel '" + a.kernel + "' is not a rule");
  }
  for (const std::string& mname : a.multis) {
    const Rule* multi = sys.find_rule(mname);
    if (!multi) {
      sys_resolve_fail("unit " + u.name + ": multi '" + mname + "' is not a rule");
    }
    for (const PatternNode& mn : multi->lhs.nodes) {
      const PatternNode* kn = kernel->lhs.find(mn.var);
      if (!kn) continue;
      if (kn->cls != mn.cls) {
        sys_resolve_fail("unit " + u.name + ": shared variable '" + mn.var +
                         "' has class " + kn->cls->qualified() + " in the kernel but " +
                         mn.cls->qualified() + " in multi " + mname);
      }
      if (!multi->rhs.find(mn.var) && kernel->rhs.find(mn.var)) {
        sys_resolve_fail("unit " + u.name + ": multi " + mname + " deletes '" + mn.var +
                         "', which the kernel preserves");
      }
    }
    for (const PatternNode& mn : multi->rhs.nodes) {
      if (multi->lhs.find(mn.var)) continue;  // preserved in the multi
      const PatternNode* kc = kernel->rhs.find(mn.var);
      if (!kc) continue;
      if (kernel->lhs.find(mn.var)) {
        sys_resolve_fail("unit " + u.name + ": multi " + mname + " re-creates '" + mn.var +
                         "', which the kernel matches");
      }
      if (kc->cls != mn.cls) {
        sys_resolve_fail("unit " + u.name + ": shared created variable '" + mn.var +
                         "' differs in class between kernel and multi " + mname);
      }
    }
  }
}

void validate_system(const TransformationSystem& sys) {
  for (const auto& [name, rule] : sys.rules) {
    (void)rule;
    if (sys.units.count(name)) {
      sys_resolve_fail("'" + name + "' names both a rule and a unit");
    }
  }

  for (const auto& [name, u] : sys.units) {
    for (const std::string& c : u.child_names()) {
      if (!sys.find_rule(c) && !sys.find_unit(c)) {
        sys_resolve_fail("unit " + name + ": no rule or unit named '" + c + "'");
      }
    }
    if (const auto* a = std::get_if<AmalgamationU>(&u.kind)) {
      validate_amalgamation(sys, u, *a);
    }
    validate_mappings(sys, u);
  }

  // Containment must be acyclic: depth-first search over unit children.
  std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
  std::function<void(const std::string&)> visit = [&](const std::string& name) {
    const Unit* u = sys.find_unit(name);
    if (!u) return;  // rules are leaves
    int& st = state[name];
    if (st == 1) sys_resolve_fail("unit '" + name + "' contains itself");
    if (st == 2) return;
    st = 1;
    for (const std::string& c : u->child_names()) visit(c);
    st = 2;
  };
  for (const auto& [name, u] : sys.units) {
    (void)u;
    visit(name);
  }
}

}  // namespace

TransformationSystem parse_system(std::string_view text) {
  Stream s(lex::tokenize(text));
  TransformationSystem sys;
  auto registry = TypeRegistry::create();

  while (!s.at(Tok::Eof)) {
    Token kw = s.expect_ident("'metamodel', 'rule', or 'unit'");
    if (kw.text == "metamodel") {
      Metamodel mm = parse_metamodel(s);
      if (mm.name == TypeRegistry::kTraceMetamodel) {
        resolve_fail(kw, "'trace' is the built-in trace metamodel and cannot be redefined");
      }
      registry->register_metamodel(std::move(mm));
    } else if (kw.text == "rule") {
      Rule r = parse_rule(s, *registry);
      std::string name = r.name;
      if (!sys.rules.emplace(name, std::move(r)).second) {
        resolve_fail(kw, "rule '" + name + "' declared twice");
      }
    } else if (kw.text == "unit") {
      Unit u = parse_unit(s);
      std::string name = u.name;
      if (!sys.units.emplace(name, std::move(u)).second) {
        resolve_fail(kw, "unit '" + name + "' declared twice");
      }
    } else {
      throw Error(ErrorCode::SyntaxError,
                  "expected 'metamodel', 'rule', or 'unit', got '" + kw.text + "'", kw.line,
                  kw.col);
    }
  }

  registry->canonicalize_ref_targets();
  registry->validate();
  sys.types = std::move(registry);
  validate_system(sys);
  return sys;
}

// ---------------------------------------------------------------------------
// model files

namespace {

Value parse_literal(Stream& s) {
  bool neg = s.eat(Tok::Minus);
  const Token& t = s.peek();
  switch (t.kind) {
    case Tok::IntLit:
      s.next();
      return Value{neg ? -t.int_val : t.int_val};
    case Tok::FloatLit:
      s.next();
      return Value{neg ? -t.float_val : t.float_val};
    case Tok::StringLit:
      if (neg) s.fail("'-' applies to numbers only");
      s.next();
      return Value{t.text};
    case Tok::Ident:
      if (!neg && (t.text == "true" || t.text == "false")) {
        s.next();
        return Value{t.text == "true"};
      }
      [[fallthrough]];
    default:
      s.fail("expected a literal value");
  }
}

}  // namespace

InstanceGraph parse_model(std::string_view text, std::shared_ptr<const TypeRegistry> types,
                          std::vector<Violation>* violations) {
  Stream s(lex::tokenize(text));
  InstanceGraph g(types);

  if (!s.eat_ident("model")) s.fail("expected 'model'");
  if (s.eat_ident("uses")) {
    while (true) {
      Token mm = s.expect_ident("metamodel name");
      if (!types->find_metamodel(mm.text)) {
        resolve_fail(mm, "unknown metamodel '" + mm.text + "'");
      }
      if (!s.eat(Tok::Comma)) break;
    }
  }
  s.expect(Tok::LBrace, "'{'");

  std::map<std::int64_t, ObjectId> by_file_id;
  auto parse_file_id = [&](bool must_exist) -> std::pair<Token, std::int64_t> {
    s.expect(Tok::Hash, "'#'");
    Token n = s.expect(Tok::IntLit, "object number");
    if (must_exist && !by_file_id.count(n.int_val)) {
      resolve_fail(n, "no object #" + std::to_string(n.int_val));
    }
    return {n, n.int_val};
  };

  while (!s.eat(Tok::RBrace)) {
    Token kw = s.expect_ident("'object' or 'link'");
    if (kw.text == "object") {
      auto [num_tok, num] = parse_file_id(false);
      if (by_file_id.count(num)) {
        resolve_fail(num_tok, "object #" + std::to_string(num) + " declared twice");
      }
      s.expect(Tok::Colon, "':'");
      auto [cls_tok, cls_text] = parse_classref(s);
      const ClassDef* cls = find_class_at(*types, cls_tok, cls_text);
      ObjectId id = GraphBuilder::raw_create(g, cls);
      by_file_id.emplace(num, id);
      if (s.eat(Tok::LBrace)) {
        if (!s.eat(Tok::RBrace)) {
          while (true) {
            Token attr = s.expect_ident("attribute name");
            s.expect(Tok::Eq, "'='");
            Value v = parse_literal(s);
            auto decl = cls->attributes.find(attr.text);
            if (decl == cls->attributes.end()) {
              resolve_fail(attr,
                           "class " + cls->qualified() + " has no attribute '" + attr.text + "'");
            }
            if (decl->second == PrimType::Float && type_of(v) == PrimType::Int) {
              v = static_cast<double>(std::get<std::int64_t>(v));
            }
            GraphBuilder::raw_set_attr(g, id, attr.text, std::move(v));
            if (s.eat(Tok::Comma)) continue;
            s.expect(Tok::RBrace, "'}'");
            break;
          }
        }
      }
    } else if (kw.text == "link") {
      auto [src_tok, src] = parse_file_id(true);
      (void)src_tok;
      s.expect(Tok::Minus, "'-'");
      Token ref = s.expect_ident("reference name");
      s.expect(Tok::Arrow, "'->'");
      auto [tgt_tok, tgt] = parse_file_id(true);
      (void)tgt_tok;
      ObjectId src_id = by_file_id.at(src);
      const ClassDef* src_cls = g.object(src_id).cls;
      if (!src_cls->references.count(ref.text)) {
        resolve_fail(ref,
                     "class " + src_cls->qualified() + " has no reference '" + ref.text + "'");
      }
      GraphBuilder::raw_add_link(g, Link{src_id, ref.text, by_file_id.at(tgt)});
    } else {
      throw Error(ErrorCode::SyntaxError, "expected 'object' or 'link', got '" + kw.text + "'",
                  kw.line, kw.col);
    }
  }
  if (!s.at(Tok::Eof)) s.fail("unexpected text after the model body");

  std::vector<Violation> found = g.conforms();
  if (violations) {
    *violations = std::move(found);
  } else if (!found.empty()) {
    throw Error(ErrorCode::ConformanceError, found.front().message);
  }
  return g;
}

}  // namespace hengine
