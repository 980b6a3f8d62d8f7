#include "hengine/apply.hpp"

#include <algorithm>
#include <set>

#include "hengine/error.hpp"

namespace hengine {

const char* param_dir_name(ParamDir d) {
  switch (d) {
    case ParamDir::In: return "in";
    case ParamDir::Out: return "out";
    case ParamDir::InOut: return "inout";
  }
  return "?";
}

const ParamDecl* Rule::find_param(std::string_view name) const {
  for (const ParamDecl& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

bool Rule::is_preserved(std::string_view var) const {
  return lhs.find(var) != nullptr && rhs.find(var) != nullptr;
}

std::string param_value_text(const ParamValue& v, const InstanceGraph& g) {
  if (const Value* val = std::get_if<Value>(&v)) return to_literal(*val);
  ObjectId id = std::get<ObjectId>(v);
  std::string cls = g.has_object(id) ? g.object(id).cls->name : std::string("?");
  return "<object " + cls + "#" + std::to_string(id.value) + ">";
}

namespace {

bool same_edge(const PatternEdge& a, const PatternEdge& b) {
  return a.src == b.src && a.ref == b.ref && a.tgt == b.tgt;
}

bool edge_in(const Pattern& p, const PatternEdge& e) {
  return std::any_of(p.edges.begin(), p.edges.end(),
                     [&](const PatternEdge& o) { return same_edge(o, e); });
}

/// Deleted/created split of a rule, by shared variable names and edge triples.
struct RuleShape {
  std::vector<const PatternNode*> deleted_nodes;
  std::vector<const PatternNode*> created_nodes;
  std::vector<const PatternEdge*> deleted_edges;
  std::vector<const PatternEdge*> created_edges;
};

RuleShape shape_of(const Rule& r) {
  RuleShape s;
  for (const PatternNode& n : r.lhs.nodes) {
    if (!r.rhs.find(n.var)) s.deleted_nodes.push_back(&n);
  }
  for (const PatternNode& n : r.rhs.nodes) {
    if (!r.lhs.find(n.var)) s.created_nodes.push_back(&n);
  }
  for (const PatternEdge& e : r.lhs.edges) {
    if (!edge_in(r.rhs, e)) s.deleted_edges.push_back(&e);
  }
  for (const PatternEdge& e : r.rhs.edges) {
    if (!edge_in(r.lhs, e)) s.created_edges.push_back(&e);
  }
  return s;
}

/// Combined structural effect of one or more matched rule instances.
struct EffectPlan {
  std::vector<ObjectId> del_objects;  // first-mention order, unique
  std::vector<Link> del_links;        // first-mention order, unique tuples
  std::set<ObjectId> del_object_set;

  void add_object(ObjectId id) {
    if (del_object_set.insert(id).second) del_objects.push_back(id);
  }
  void add_link(const Link& l) {
    for (const Link& have : del_links) {
      if (have == l) return;
    }
    del_links.push_back(l);
  }
};

ObjectId bound(const Match& m, const std::string& var) {
  auto it = m.bindings.find(var);
  if (it == m.bindings.end()) {
    throw Error(ErrorCode::UnboundName, "pattern variable '" + var + "' is unbound");
  }
  return it->second;
}

void extend_plan(EffectPlan& plan, const RuleShape& shape, const Match& m) {
  for (const PatternEdge* e : shape.deleted_edges) {
    plan.add_link(Link{bound(m, e->src), e->ref, bound(m, e->tgt)});
  }
  for (const PatternNode* n : shape.deleted_nodes) {
    plan.add_object(bound(m, n->var));
  }
}

/// True iff removing exactly the planned links leaves no link touching a
/// planned object. Duplicate link tuples count: only one copy is removed.
bool deletion_viable(const InstanceGraph& g, const EffectPlan& plan) {
  const auto& links = g.links();
  std::vector<bool> removed(links.size(), false);
  for (const Link& doomed : plan.del_links) {
    for (std::size_t i = 0; i < links.size(); ++i) {
      if (!removed[i] && links[i] == doomed) {
        removed[i] = true;
        break;
      }
    }
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (removed[i]) continue;
    if (plan.del_object_set.count(links[i].src) || plan.del_object_set.count(links[i].tgt)) {
      return false;
    }
  }
  return true;
}

/// Identification condition: in non-injective mode an object may not be
/// deleted through one variable while a preserved variable of the same rule
/// still binds it. `context_vars` names variables owned by the enclosing
/// kernel (they are context here, not this rule's preservation claims).
bool identification_ok(const Rule& r, const RuleShape& shape, const Match& m, MatchMode mode,
                       const std::set<std::string>& context_vars) {
  if (mode.injective) return true;
  for (const PatternNode* d : shape.deleted_nodes) {
    ObjectId id = bound(m, d->var);
    for (const PatternNode& n : r.lhs.nodes) {
      if (n.var == d->var || !r.is_preserved(n.var) || context_vars.count(n.var)) continue;
      if (bound(m, n.var) == id) return false;
    }
  }
  return true;
}

Match seed_match(const Rule& r, const std::map<std::string, ParamValue>& pre) {
  Match m;
  for (const auto& [name, pv] : pre) {
    if (!r.find_param(name)) {
      throw Error(ErrorCode::UnknownParameter,
                  "rule " + r.name + " has no parameter '" + name + "'");
    }
    if (const ObjectId* id = std::get_if<ObjectId>(&pv)) {
      if (r.lhs.find(name)) {
        m.bindings.emplace(name, *id);
      } else if (r.rhs.find(name)) {
        throw Error(ErrorCode::ParameterDirection,
                    "parameter '" + name + "' names a created element; it can only be read back");
      } else {
        throw Error(ErrorCode::ParameterTypeMismatch,
                    "parameter '" + name + "' takes a value, not an object");
      }
    } else {
      if (r.lhs.find(name) || r.rhs.find(name)) {
        throw Error(ErrorCode::ParameterTypeMismatch,
                    "parameter '" + name + "' names a pattern element and needs an object");
      }
      m.values.emplace(name, std::get<Value>(pv));
    }
  }
  return m;
}

void collect_out_values(const Rule& r, const Match& m, ApplyOutcome& out) {
  for (const ParamDecl& p : r.params) {
    if (p.dir == ParamDir::In) continue;
    auto bit = m.bindings.find(p.name);
    if (bit != m.bindings.end()) {
      out.out_values.emplace(p.name, bit->second);
      continue;
    }
    auto vit = m.values.find(p.name);
    if (vit != m.values.end()) out.out_values.emplace(p.name, vit->second);
  }
}

/// Deletes per plan, assuming viability was established in forbid mode.
void run_deletions(InstanceGraph& g, const EffectPlan& plan, DeleteMode dangling,
                   std::map<ObjectId, Object>& snapshot) {
  for (ObjectId id : plan.del_objects) snapshot.emplace(id, g.object(id));
  for (const Link& l : plan.del_links) g.remove_link(l.src, l.ref, l.tgt);
  for (ObjectId id : plan.del_objects) g.delete_object(id, dangling);
}

/// Creates this rule instance's nodes and edges, extending `m` with fresh
/// bindings. Variables already bound (kernel-shared creations) are reused,
/// and edges whose triple `skip_edges` contains are someone else's to create.
void run_creations(InstanceGraph& g, const RuleShape& shape, Match& m,
                   const std::vector<const PatternEdge*>* skip_edges) {
  for (const PatternNode* n : shape.created_nodes) {
    if (m.bindings.count(n->var)) continue;
    m.bindings.emplace(n->var, g.create_object(n->cls));
  }
  for (const PatternEdge* e : shape.created_edges) {
    if (skip_edges) {
      bool shared = std::any_of(skip_edges->begin(), skip_edges->end(),
                                [&](const PatternEdge* k) { return same_edge(*k, *e); });
      if (shared) continue;
    }
    g.add_link(bound(m, e->src), e->ref, bound(m, e->tgt));
  }
}

void run_assignments(InstanceGraph& g, const Rule& r, Match& m,
                     const std::map<ObjectId, Object>& snapshot) {
  EvalEnv env;
  env.params = &m.values;
  env.vars = &m.bindings;
  env.graph = &g;
  env.deleted = &snapshot;
  for (const Assignment& a : r.assignments) {
    Value v = eval_expr(*a.expr, env);
    g.set_attribute(bound(m, a.var), a.attr, std::move(v));
  }
}

}  // namespace

std::optional<Match> applicable(const Rule& rule, const InstanceGraph& graph,
                                const std::map<std::string, ParamValue>& pre_bindings,
                                MatchMode mode, DeleteMode dangling) {
  RuleShape shape = shape_of(rule);
  Match partial = seed_match(rule, pre_bindings);
  return find_first(rule.lhs, graph, partial, mode, [&](const Match& m) {
    if (!eval_formula(rule.condition.get(), m, graph, mode)) return false;
    if (!identification_ok(rule, shape, m, mode, {})) return false;
    if (dangling == DeleteMode::ForbidDangling) {
      EffectPlan plan;
      extend_plan(plan, shape, m);
      if (!deletion_viable(graph, plan)) return false;
    }
    return true;
  });
}

ApplyOutcome apply_rule(const Rule& rule, InstanceGraph& graph,
                        const std::map<std::string, ParamValue>& pre_bindings, MatchMode mode,
                        DeleteMode dangling) {
  std::optional<Match> found = applicable(rule, graph, pre_bindings, mode, dangling);
  if (!found) return {};

  RuleShape shape = shape_of(rule);
  Match m = std::move(*found);
  EffectPlan plan;
  extend_plan(plan, shape, m);

  std::size_t before = graph.edit_count();
  Savepoint sp = graph.savepoint();
  try {
    std::map<ObjectId, Object> snapshot;
    run_deletions(graph, plan, dangling, snapshot);
    run_creations(graph, shape, m, nullptr);
    run_assignments(graph, rule, m, snapshot);
    graph.release(sp);
    ApplyOutcome out;
    out.success = true;
    out.edits = graph.edit_count() - before;
    collect_out_values(rule, m, out);
    return out;
  } catch (...) {
    graph.revert_to(sp);
    throw;
  }
}

ApplyOutcome apply_amalgamated(const Rule& kernel, const std::vector<const Rule*>& multis,
                               InstanceGraph& graph,
                               const std::map<std::string, ParamValue>& pre_bindings,
                               MatchMode mode, DeleteMode dangling) {
  RuleShape kernel_shape = shape_of(kernel);
  std::vector<RuleShape> multi_shapes;
  multi_shapes.reserve(multis.size());
  for (const Rule* m : multis) multi_shapes.push_back(shape_of(*m));

  std::set<std::string> kernel_vars;
  for (const PatternNode& n : kernel.lhs.nodes) kernel_vars.insert(n.var);
  for (const PatternNode& n : kernel.rhs.nodes) kernel_vars.insert(n.var);

  Match partial = seed_match(kernel, pre_bindings);

  std::optional<Match> kernel_match;
  std::vector<std::vector<Match>> instance_matches;
  EffectPlan plan;

  for_each_match(kernel.lhs, graph, partial, mode, [&](const Match& km) {
    if (!eval_formula(kernel.condition.get(), km, graph, mode)) return true;
    if (!identification_ok(kernel, kernel_shape, km, mode, {})) return true;

    std::vector<std::vector<Match>> mms(multis.size());
    for (std::size_t i = 0; i < multis.size(); ++i) {
      const Rule& mr = *multis[i];
      for_each_match(mr.lhs, graph, km, mode, [&](const Match& mm) {
        if (!eval_formula(mr.condition.get(), mm, graph, mode)) return true;
        if (!identification_ok(mr, multi_shapes[i], mm, mode, kernel_vars)) return true;
        mms[i].push_back(mm);
        return true;
      });
    }

    EffectPlan candidate;
    extend_plan(candidate, kernel_shape, km);
    for (std::size_t i = 0; i < multis.size(); ++i) {
      for (const Match& mm : mms[i]) extend_plan(candidate, multi_shapes[i], mm);
    }
    if (dangling == DeleteMode::ForbidDangling && !deletion_viable(graph, candidate)) {
      return true;  // try the next kernel match
    }
    kernel_match = km;
    instance_matches = std::move(mms);
    plan = std::move(candidate);
    return false;
  });

  if (!kernel_match) return {};

  std::size_t before = graph.edit_count();
  Savepoint sp = graph.savepoint();
  try {
    std::map<ObjectId, Object> snapshot;
    run_deletions(graph, plan, dangling, snapshot);

    Match km = std::move(*kernel_match);
    run_creations(graph, kernel_shape, km, nullptr);

    // Instances see the kernel's creations: shared created variables bind to
    // the kernel's objects, shared created edges are not created twice.
    for (std::size_t i = 0; i < multis.size(); ++i) {
      for (Match& mm : instance_matches[i]) {
        for (const PatternNode* n : kernel_shape.created_nodes) {
          mm.bindings.emplace(n->var, bound(km, n->var));
        }
        run_creations(graph, multi_shapes[i], mm, &kernel_shape.created_edges);
      }
    }

    run_assignments(graph, kernel, km, snapshot);
    for (std::size_t i = 0; i < multis.size(); ++i) {
      for (Match& mm : instance_matches[i]) run_assignments(graph, *multis[i], mm, snapshot);
    }

    graph.release(sp);
    ApplyOutcome out;
    out.success = true;
    out.edits = graph.edit_count() - before;
    collect_out_values(kernel, km, out);
    return out;
  } catch (...) {
    graph.revert_to(sp);
    throw;
  }
}

}  // namespace hengine
