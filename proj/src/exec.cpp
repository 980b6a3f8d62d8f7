#include "hengine/exec.hpp"

#include <algorithm>
#include <utility>

#include "hengine/error.hpp"

namespace hengine {

const Rule* TransformationSystem::find_rule(std::string_view name) const {
  auto it = rules.find(std::string(name));
  return it == rules.end() ? nullptr : &it->second;
}

const Unit* TransformationSystem::find_unit(std::string_view name) const {
  auto it = units.find(std::string(name));
  return it == units.end() ? nullptr : &it->second;
}

const ParamDecl* Unit::find_param(std::string_view n) const {
  for (const ParamDecl& p : params) {
    if (p.name == n) return &p;
  }
  return nullptr;
}

std::vector<std::string> Unit::child_names() const {
  return std::visit(
      [](const auto& k) -> std::vector<std::string> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, RuleCallU>) {
          return {k.rule};
        } else if constexpr (std::is_same_v<T, SequentialU> ||
                             std::is_same_v<T, IndependentU> ||
                             std::is_same_v<T, PriorityU>) {
          return k.children;
        } else if constexpr (std::is_same_v<T, CountedU>) {
          return {k.child};
        } else if constexpr (std::is_same_v<T, ConditionalU>) {
          std::vector<std::string> out{k.if_unit, k.then_unit};
          if (k.else_unit) out.push_back(*k.else_unit);
          return out;
        } else {
          std::vector<std::string> out{k.kernel};
          out.insert(out.end(), k.multis.begin(), k.multis.end());
          return out;
        }
      },
      kind);
}

void ExecContext::tick() {
  if (++steps > max_steps) {
    throw Error(ErrorCode::MaxStepsExceeded,
                "exceeded " + std::to_string(max_steps) + " execution steps");
  }
}

void bind_parameters(const Unit& unit, const std::map<std::string, ParamValue>& external) {
  for (const auto& [name, v] : external) {
    (void)v;
    const ParamDecl* p = unit.find_param(name);
    if (!p) {
      throw Error(ErrorCode::UnknownParameter,
                  "unit " + unit.name + " has no parameter '" + name + "'");
    }
    if (p->dir == ParamDir::Out) {
      throw Error(ErrorCode::ParameterDirection,
                  "parameter '" + name + "' is out-only and cannot be bound up front");
    }
  }
}

Unit rule_call_unit(const Rule& rule) {
  Unit u;
  u.name = rule.name;
  u.params = rule.params;
  u.kind = RuleCallU{rule.name};
  return u;
}

namespace {

/// One execute() activation: the unit's own parameter store plus staged
/// child outputs, keyed by (unit name, parameter name).
class Runner {
 public:
  Runner(const Unit& u, ExecContext& ctx) : u_(u), ctx_(ctx) {}

  ExecResult run(const std::map<std::string, ParamValue>& in_values) {
    ctx_.tick();
    for (const auto& [name, v] : in_values) {
      if (!u_.find_param(name)) {
        throw Error(ErrorCode::UnknownParameter,
                    "unit " + u_.name + " has no parameter '" + name + "'");
      }
      env_[{u_.name, name}] = v;
    }
    ExecResult res;
    res.success = dispatch();
    if (res.success) {
      for (const ParamDecl& p : u_.params) {
        if (p.dir == ParamDir::In) continue;
        auto it = env_.find({u_.name, p.name});
        if (it != env_.end()) res.out_values.emplace(p.name, it->second);
      }
    }
    return res;
  }

 private:
  bool dispatch() {
    return std::visit(
        [this](const auto& k) -> bool {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, RuleCallU>) {
            return run_rule_call(k);
          } else if constexpr (std::is_same_v<T, SequentialU>) {
            return run_sequential(k);
          } else if constexpr (std::is_same_v<T, IndependentU>) {
            return run_independent(k);
          } else if constexpr (std::is_same_v<T, PriorityU>) {
            return run_priority(k);
          } else if constexpr (std::is_same_v<T, CountedU>) {
            return run_counted(k);
          } else if constexpr (std::is_same_v<T, ConditionalU>) {
            return run_conditional(k);
          } else {
            return run_amalgamation(k);
          }
        },
        u_.kind);
  }

  std::map<std::string, ParamValue> stage_into(const std::string& child) {
    std::map<std::string, ParamValue> staged;
    for (const ParamMapping& m : u_.mappings) {
      if (m.dst_unit != child) continue;
      auto it = env_.find({m.src_unit, m.src_param});
      if (it != env_.end()) staged[m.dst_param] = it->second;
    }
    return staged;
  }

  void absorb_outputs(const std::string& child,
                      const std::map<std::string, ParamValue>& outs) {
    for (const auto& [p, v] : outs) env_[{child, p}] = v;
    for (const ParamMapping& m : u_.mappings) {
      if (m.src_unit != child) continue;
      auto it = env_.find({m.src_unit, m.src_param});
      if (it != env_.end()) env_[{m.dst_unit, m.dst_param}] = it->second;
    }
  }

  /// A rule-call wrapper shares its parameter store with the rule: the own
  /// values seed the application and its outputs land back in the store.
  bool run_rule_call(const RuleCallU& k) {
    const Rule* r = ctx_.system.find_rule(k.rule);
    if (!r) throw Error(ErrorCode::UnknownUnit, "no rule named '" + k.rule + "'");
    std::map<std::string, ParamValue> staged;
    for (const ParamDecl& p : u_.params) {
      auto it = env_.find({u_.name, p.name});
      if (it != env_.end()) staged[p.name] = it->second;
    }
    ctx_.tick();
    ApplyOutcome out = apply_rule(*r, ctx_.graph, staged, ctx_.mode, ctx_.dangling);
    if (!out.success) return false;
    for (const auto& [p, v] : out.out_values) env_[{u_.name, p}] = v;
    return true;
  }

  bool run_child(const std::string& name) {
    std::map<std::string, ParamValue> staged = stage_into(name);
    if (const Rule* r = ctx_.system.find_rule(name)) {
      ctx_.tick();
      ApplyOutcome out = apply_rule(*r, ctx_.graph, staged, ctx_.mode, ctx_.dangling);
      if (!out.success) return false;
      absorb_outputs(name, out.out_values);
      return true;
    }
    if (const Unit* child = ctx_.system.find_unit(name)) {
      ExecResult r = execute(*child, ctx_, staged);
      if (!r.success) return false;
      absorb_outputs(name, r.out_values);
      return true;
    }
    throw Error(ErrorCode::UnknownUnit, "no rule or unit named '" + name + "'");
  }

  bool run_sequential(const SequentialU& k) {
    Savepoint sp = ctx_.graph.savepoint();
    for (const std::string& c : k.children) {
      if (!run_child(c)) {
        ctx_.graph.revert_to(sp);
        return false;
      }
    }
    ctx_.graph.release(sp);
    return true;
  }

  bool run_independent(const IndependentU& k) {
    std::vector<std::size_t> order(k.children.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(ctx_.rng() % i);
      std::swap(order[i - 1], order[j]);
    }
    for (std::size_t idx : order) {
      if (run_child(k.children[idx])) return true;
    }
    return false;
  }

  bool run_priority(const PriorityU& k) {
    for (const std::string& c : k.children) {
      if (run_child(c)) return true;
    }
    return false;
  }

  bool run_counted(const CountedU& k) {
    if (k.count < 0) {
      while (run_child(k.child)) {
      }
      return true;
    }
    Savepoint sp = ctx_.graph.savepoint();
    for (std::int64_t i = 0; i < k.count; ++i) {
      if (!run_child(k.child)) {
        ctx_.graph.revert_to(sp);
        return false;
      }
    }
    ctx_.graph.release(sp);
    return true;
  }

  bool run_conditional(const ConditionalU& k) {
    Savepoint sp = ctx_.graph.savepoint();
    if (run_child(k.if_unit)) {
      // The probe's edits persist into then; a then failure undoes both.
      if (run_child(k.then_unit)) {
        ctx_.graph.release(sp);
        return true;
      }
      ctx_.graph.revert_to(sp);
      return false;
    }
    if (!k.else_unit) {
      ctx_.graph.release(sp);
      return true;
    }
    if (run_child(*k.else_unit)) {
      ctx_.graph.release(sp);
      return true;
    }
    ctx_.graph.revert_to(sp);
    return false;
  }

  bool run_amalgamation(const AmalgamationU& k) {
    const Rule* kernel = ctx_.system.find_rule(k.kernel);
    if (!kernel) throw Error(ErrorCode::UnknownUnit, "no kernel rule named '" + k.kernel + "'");
    std::vector<const Rule*> multis;
    for (const std::string& m : k.multis) {
      const Rule* r = ctx_.system.find_rule(m);
      if (!r) throw Error(ErrorCode::UnknownUnit, "no multi rule named '" + m + "'");
      multis.push_back(r);
    }
    ctx_.tick();
    std::map<std::string, ParamValue> staged = stage_into(k.kernel);
    ApplyOutcome out =
        apply_amalgamated(*kernel, multis, ctx_.graph, staged, ctx_.mode, ctx_.dangling);
    if (!out.success) return false;
    absorb_outputs(k.kernel, out.out_values);
    return true;
  }

  const Unit& u_;
  ExecContext& ctx_;
  std::map<std::pair<std::string, std::string>, ParamValue> env_;
};

}  // namespace

ExecResult execute(const Unit& unit, ExecContext& ctx,
                   const std::map<std::string, ParamValue>& in_values) {
  Savepoint sp = ctx.graph.savepoint();
  try {
    ExecResult r = Runner(unit, ctx).run(in_values);
    ctx.graph.release(sp);
    return r;
  } catch (...) {
    ctx.graph.revert_to(sp);
    throw;
  }
}

}  // namespace hengine
