#include "hengine/matcher.hpp"

#include <algorithm>

#include "hengine/error.hpp"

namespace hengine {

const PatternNode* Pattern::find(std::string_view var) const {
  for (const PatternNode& n : nodes) {
    if (n.var == var) return &n;
  }
  return nullptr;
}

FormulaPtr make_leaf(std::shared_ptr<const ConditionGraph> cond) {
  return std::make_unique<Formula>(Formula{Formula::Leaf{std::move(cond)}});
}
FormulaPtr make_not(FormulaPtr f) {
  return std::make_unique<Formula>(Formula{Formula::Not{std::move(f)}});
}
FormulaPtr make_and(FormulaPtr l, FormulaPtr r) {
  return std::make_unique<Formula>(Formula{Formula::And{std::move(l), std::move(r)}});
}
FormulaPtr make_or(FormulaPtr l, FormulaPtr r) {
  return std::make_unique<Formula>(Formula{Formula::Or{std::move(l), std::move(r)}});
}

FormulaPtr clone_formula(const Formula* f) {
  if (!f) return nullptr;
  return std::visit(
      [](const auto& n) -> FormulaPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Formula::Leaf>) {
          return make_leaf(n.cond);
        } else if constexpr (std::is_same_v<T, Formula::Not>) {
          return make_not(clone_formula(n.f.get()));
        } else if constexpr (std::is_same_v<T, Formula::And>) {
          return make_and(clone_formula(n.l.get()), clone_formula(n.r.get()));
        } else {
          return make_or(clone_formula(n.l.get()), clone_formula(n.r.get()));
        }
      },
      f->node);
}

namespace {

/// Depth-first search over the pattern's node list. Edges are verified as
/// soon as both endpoints have a binding; edges between externally bound
/// variables are verified before the search starts.
class Search {
 public:
  Search(const Pattern& pat, const InstanceGraph& g, const Match& partial, MatchMode mode,
         const MatchCallback& cb)
      : pat_(pat), g_(g), mode_(mode), cb_(cb), m_(partial) {
    // trigger[i] = edges fully bindable once node i is bound.
    trigger_.resize(pat_.nodes.size());
    for (const PatternEdge& e : pat_.edges) {
      int s = position(e.src), t = position(e.tgt);
      int at = std::max(s, t);
      if (at < 0) {
        upfront_.push_back(&e);
      } else {
        trigger_[static_cast<std::size_t>(at)].push_back(&e);
      }
    }
  }

  bool run() {
    for (const PatternEdge* e : upfront_) {
      if (!edge_present(*e)) return true;  // no match can exist
    }
    return recurse(0);
  }

 private:
  int position(const std::string& var) const {
    for (std::size_t i = 0; i < pat_.nodes.size(); ++i) {
      if (pat_.nodes[i].var == var) return static_cast<int>(i);
    }
    return -1;
  }

  bool edge_present(const PatternEdge& e) const {
    auto s = m_.bindings.find(e.src);
    auto t = m_.bindings.find(e.tgt);
    if (s == m_.bindings.end() || t == m_.bindings.end()) return false;
    return g_.has_link(s->second, e.ref, t->second);
  }

  bool used_elsewhere(ObjectId id, const std::string& var) const {
    for (const auto& [v, bound] : m_.bindings) {
      if (bound == id && v != var) return true;
    }
    return false;
  }

  /// Checks the node's attribute constraints against the object bound to it,
  /// binding bare unbound parameters from the attribute value. Returns false
  /// on mismatch; appends any parameters it bound to `bound_params`.
  bool check_constraints(const PatternNode& node, ObjectId id,
                         std::vector<std::string>& bound_params) {
    const Object& obj = g_.object(id);
    for (const AttrConstraint& c : node.constraints) {
      auto ait = obj.attrs.find(c.attr);
      if (ait == obj.attrs.end()) return false;
      if (const std::string* p = bare_param(*c.expr)) {
        auto vit = m_.values.find(*p);
        if (vit == m_.values.end()) {
          m_.values.emplace(*p, ait->second);
          bound_params.push_back(*p);
          continue;
        }
        if (!value_equal(vit->second, ait->second)) return false;
        continue;
      }
      EvalEnv env;
      env.params = &m_.values;
      env.vars = &m_.bindings;
      env.graph = &g_;
      if (!value_equal(eval_expr(*c.expr, env), ait->second)) return false;
    }
    return true;
  }

  bool node_edges_hold(std::size_t i) const {
    for (const PatternEdge* e : trigger_[i]) {
      if (!edge_present(*e)) return false;
    }
    return true;
  }

  bool recurse(std::size_t i) {
    if (i == pat_.nodes.size()) return cb_(m_);
    const PatternNode& node = pat_.nodes[i];

    auto existing = m_.bindings.find(node.var);
    if (existing != m_.bindings.end()) {
      ObjectId id = existing->second;
      if (!g_.has_object(id) || g_.object(id).cls != node.cls) return true;
      if (mode_.injective && used_elsewhere(id, node.var)) return true;
      std::vector<std::string> bound;
      bool ok = check_constraints(node, id, bound) && node_edges_hold(i);
      bool keep_going = !ok || recurse(i + 1);
      for (const std::string& p : bound) m_.values.erase(p);
      return keep_going;
    }

    for (const auto& [id, obj] : g_.objects()) {
      if (obj.cls != node.cls) continue;
      if (mode_.injective && used_elsewhere(id, node.var)) continue;
      m_.bindings.emplace(node.var, id);
      std::vector<std::string> bound;
      bool ok = check_constraints(node, id, bound) && node_edges_hold(i);
      bool keep_going = !ok || recurse(i + 1);
      for (const std::string& p : bound) m_.values.erase(p);
      m_.bindings.erase(node.var);
      if (!keep_going) return false;
    }
    return true;
  }

  const Pattern& pat_;
  const InstanceGraph& g_;
  MatchMode mode_;
  const MatchCallback& cb_;
  Match m_;
  std::vector<std::vector<const PatternEdge*>> trigger_;
  std::vector<const PatternEdge*> upfront_;
};

}  // namespace

bool for_each_match(const Pattern& pattern, const InstanceGraph& graph, const Match& partial,
                    MatchMode mode, const MatchCallback& cb) {
  return Search(pattern, graph, partial, mode, cb).run();
}

std::vector<Match> find_matches(const Pattern& pattern, const InstanceGraph& graph,
                                const Match& partial, MatchMode mode) {
  std::vector<Match> out;
  for_each_match(pattern, graph, partial, mode, [&](const Match& m) {
    out.push_back(m);
    return true;
  });
  return out;
}

std::optional<Match> find_first(const Pattern& pattern, const InstanceGraph& graph,
                                const Match& partial, MatchMode mode,
                                const std::function<bool(const Match&)>& accept) {
  std::optional<Match> found;
  for_each_match(pattern, graph, partial, mode, [&](const Match& m) {
    if (accept && !accept(m)) return true;
    found = m;
    return false;
  });
  return found;
}

bool eval_formula(const Formula* formula, const Match& host, const InstanceGraph& graph,
                  MatchMode mode) {
  if (!formula) return true;
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Formula::Leaf>) {
          bool completed = for_each_match(n.cond->pattern, graph, host, mode,
                                          [](const Match&) { return false; });
          return !completed;
        } else if constexpr (std::is_same_v<T, Formula::Not>) {
          return !eval_formula(n.f.get(), host, graph, mode);
        } else if constexpr (std::is_same_v<T, Formula::And>) {
          return eval_formula(n.l.get(), host, graph, mode) &&
                 eval_formula(n.r.get(), host, graph, mode);
        } else {
          return eval_formula(n.l.get(), host, graph, mode) ||
                 eval_formula(n.r.get(), host, graph, mode);
        }
      },
      formula->node);
}

std::size_t count_matches(const Pattern& pattern, const Formula* formula,
                          const InstanceGraph& graph, MatchMode mode) {
  std::size_t n = 0;
  for_each_match(pattern, graph, Match{}, mode, [&](const Match& m) {
    if (eval_formula(formula, m, graph, mode)) ++n;
    return true;
  });
  return n;
}

}  // namespace hengine
