#include "hengine/print.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "hengine/expr.hpp"
#include "hengine/rule.hpp"

namespace hengine {

namespace {

// Formula precedence: | binds loosest, then &, then !.
void print_formula_rec(const Formula& f, int min_prec, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Formula::Leaf>) {
          out += n.cond->name;
        } else if constexpr (std::is_same_v<T, Formula::Not>) {
          out += '!';
          print_formula_rec(*n.f, 3, out);
        } else if constexpr (std::is_same_v<T, Formula::And>) {
          bool paren = min_prec > 2;
          if (paren) out += '(';
          print_formula_rec(*n.l, 2, out);
          out += " & ";
          print_formula_rec(*n.r, 3, out);
          if (paren) out += ')';
        } else {
          bool paren = min_prec > 1;
          if (paren) out += '(';
          print_formula_rec(*n.l, 1, out);
          out += " | ";
          print_formula_rec(*n.r, 2, out);
          if (paren) out += ')';
        }
      },
      f.node);
}

void print_entries(const std::vector<AttrEntry>& entries, std::string& out) {
  if (entries.empty()) return;
  out += " { ";
  bool first = true;
  for (const AttrEntry& e : entries) {
    if (!first) out += ", ";
    first = false;
    out += e.attr;
    out += e.assign ? " := " : " = ";
    out += print_expr(*e.expr);
  }
  out += " }";
}

std::string action_text(ElemAction a, const std::string& group) {
  switch (a) {
    case ElemAction::Preserve:
      return "preserve";
    case ElemAction::Create:
      return "create";
    case ElemAction::Delete:
      return "delete";
    case ElemAction::Forbid:
      return "forbid(" + group + ")";
    case ElemAction::Require:
      return "require(" + group + ")";
  }
  return {};
}

void print_rule(const Rule& r, std::string& out) {
  out += "rule " + r.name + " {\n";
  for (const ParamDecl& p : r.params) {
    out += "  param " + p.name + ": " + param_dir_name(p.dir) + "\n";
  }
  for (const Element& el : r.elements) {
    if (const auto* n = std::get_if<NodeElem>(&el)) {
      out += "  " + action_text(n->action, n->group) + " " + n->var + ": " +
             n->cls->qualified();
      print_entries(n->entries, out);
      out += '\n';
    } else {
      const auto& e = std::get<EdgeElem>(el);
      out += "  " + action_text(e.action, e.group) + " " + e.src + " -" + e.ref + "-> " + e.tgt +
             "\n";
    }
  }
  if (r.explicit_condition && r.condition) {
    out += "  condition = " + print_formula(*r.condition) + "\n";
  }
  out += "}\n";
}

void print_name_list(const std::vector<std::string>& names, std::string& out) {
  out += '[';
  bool first = true;
  for (const std::string& n : names) {
    if (!first) out += ", ";
    first = false;
    out += n;
  }
  out += ']';
}

void print_unit(const Unit& u, std::string& out) {
  out += "unit " + u.name + " = ";
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, RuleCallU>) {
          out += "sequential [" + k.rule + "]";
        } else if constexpr (std::is_same_v<T, SequentialU>) {
          out += "sequential ";
          print_name_list(k.children, out);
        } else if constexpr (std::is_same_v<T, IndependentU>) {
          out += "independent ";
          print_name_list(k.children, out);
        } else if constexpr (std::is_same_v<T, PriorityU>) {
          out += "priority ";
          print_name_list(k.children, out);
        } else if constexpr (std::is_same_v<T, CountedU>) {
          out += "counted(" + std::to_string(k.count) + ") [" + k.child + "]";
        } else if constexpr (std::is_same_v<T, ConditionalU>) {
          out += "conditional if " + k.if_unit + " then " + k.then_unit;
          if (k.else_unit) out += " else " + *k.else_unit;
        } else {
          static_assert(std::is_same_v<T, AmalgamationU>);
          out += "amalgamation kernel " + k.kernel + " multis ";
          print_name_list(k.multis, out);
        }
      },
      u.kind);
  if (u.params.empty() && u.mappings.empty()) {
    out += '\n';
    return;
  }
  out += " {\n";
  for (const ParamDecl& p : u.params) {
    out += "  param " + p.name + ": " + param_dir_name(p.dir) + "\n";
  }
  for (const ParamMapping& m : u.mappings) {
    out += "  map " + m.src_unit + "." + m.src_param + " -> " + m.dst_unit + "." + m.dst_param +
           "\n";
  }
  out += "}\n";
}

void print_metamodel(const Metamodel& mm, std::string& out) {
  out += "metamodel " + mm.name + " {\n";
  std::vector<const ClassDef*> classes;
  for (const ClassDef& c : mm.classes) classes.push_back(&c);
  std::sort(classes.begin(), classes.end(),
            [](const ClassDef* a, const ClassDef* b) { return a->name < b->name; });
  for (const ClassDef* c : classes) {
    out += "  class " + c->name + " {\n";
    for (const auto& [name, type] : c->attributes) {
      out += "    attr " + name + ": " + type_name(type) + "\n";
    }
    for (const auto& [name, ref] : c->references) {
      out += ref.containment ? "    contains " : "    ref ";
      out += name;
      out += ref.many ? ": many " : ": one ";
      out += ref.target_class;
      out += '\n';
    }
    out += "  }\n";
  }
  out += "}\n";
}

}  // namespace

std::string print_formula(const Formula& f) {
  std::string out;
  print_formula_rec(f, 0, out);
  return out;
}

std::string print_system(const TransformationSystem& sys) {
  std::string out;
  bool first = true;
  auto sep = [&] {
    if (!first) out += '\n';
    first = false;
  };

  std::vector<std::string> mm_names = sys.types->metamodel_names();
  std::sort(mm_names.begin(), mm_names.end());
  for (const std::string& name : mm_names) {
    if (name == TypeRegistry::kTraceMetamodel) continue;
    sep();
    print_metamodel(*sys.types->find_metamodel(name), out);
  }
  for (const auto& [name, rule] : sys.rules) {
    (void)name;
    sep();
    print_rule(rule, out);
  }
  for (const auto& [name, unit] : sys.units) {
    (void)name;
    sep();
    print_unit(unit, out);
  }
  return out;
}

std::string print_model(const InstanceGraph& g) {
  std::vector<std::pair<ObjectId, const Object*>> objs;
  for (const auto& [id, obj] : g.objects()) objs.emplace_back(id, &obj);
  std::sort(objs.begin(), objs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::set<std::string> used_mms;
  std::map<ObjectId, std::uint64_t> file_ids;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    file_ids.emplace(objs[i].first, i + 1);
    used_mms.insert(objs[i].second->cls->metamodel);
  }

  std::string out = "model";
  if (!used_mms.empty()) {
    out += " uses ";
    bool first = true;
    for (const std::string& mm : used_mms) {
      if (!first) out += ", ";
      first = false;
      out += mm;
    }
  }
  out += " {\n";
  for (const auto& [id, obj] : objs) {
    out += "  object #" + std::to_string(file_ids.at(id)) + ": " + obj->cls->qualified();
    if (!obj->attrs.empty()) {
      out += " { ";
      bool first = true;
      for (const auto& [name, value] : obj->attrs) {
        if (!first) out += ", ";
        first = false;
        out += name + " = " + to_literal(value);
      }
      out += " }";
    }
    out += '\n';
  }
  for (const Link& l : g.links()) {
    out += "  link #" + std::to_string(file_ids.at(l.src)) + " -" + l.ref + "-> #" +
           std::to_string(file_ids.at(l.tgt)) + "\n";
  }
  out += "}\n";
  return out;
}

}  // namespace hengine
