#include "hengine/metamodel.hpp"

#include <algorithm>
#include <set>

namespace hengine {

bool ClassDef::untyped_ref(std::string_view ref) const {
  auto it = references.find(std::string(ref));
  return it != references.end() && it->second.target_class.empty();
}

std::shared_ptr<TypeRegistry> TypeRegistry::create() {
  auto reg = std::shared_ptr<TypeRegistry>(new TypeRegistry());
  Metamodel trace;
  trace.name = kTraceMetamodel;
  ClassDef cls;
  cls.name = kTraceClass;
  cls.references["source"] = RefDef{"", true, false};
  cls.references["target"] = RefDef{"", true, false};
  trace.classes.push_back(std::move(cls));
  reg->register_metamodel(std::move(trace));
  reg->trace_class_ = reg->find_class(std::string(kTraceMetamodel) + "." + kTraceClass);
  return reg;
}

void TypeRegistry::register_metamodel(Metamodel mm) {
  if (metamodels_.count(mm.name)) {
    throw Error(ErrorCode::ResolutionError, "metamodel '" + mm.name + "' registered twice");
  }
  std::set<std::string> seen;
  for (auto& c : mm.classes) {
    if (!seen.insert(c.name).second) {
      throw Error(ErrorCode::ResolutionError,
                  "duplicate class '" + c.name + "' in metamodel '" + mm.name + "'");
    }
    c.metamodel = mm.name;
  }
  auto owned = std::make_unique<Metamodel>(std::move(mm));
  metamodels_.emplace(owned->name, std::move(owned));
}

const Metamodel* TypeRegistry::find_metamodel(std::string_view name) const {
  auto it = metamodels_.find(std::string(name));
  return it == metamodels_.end() ? nullptr : it->second.get();
}

const ClassDef* TypeRegistry::find_class(std::string_view name) const {
  auto dot = name.find('.');
  if (dot != std::string_view::npos) {
    const Metamodel* mm = find_metamodel(name.substr(0, dot));
    if (!mm) return nullptr;
    auto cls = name.substr(dot + 1);
    for (const auto& c : mm->classes) {
      if (c.name == cls) return &c;
    }
    return nullptr;
  }
  const ClassDef* found = nullptr;
  for (const auto& [mm_name, mm] : metamodels_) {
    for (const auto& c : mm->classes) {
      if (c.name == name) {
        if (found) {
          throw Error(ErrorCode::AmbiguousClass,
                      "class name '" + std::string(name) + "' is ambiguous (" +
                          found->qualified() + " vs " + c.qualified() + ")");
        }
        found = &c;
      }
    }
  }
  return found;
}

const ClassDef* TypeRegistry::resolve_class(std::string_view name) const {
  const ClassDef* c = find_class(name);
  if (!c) throw Error(ErrorCode::UnknownClass, "unknown class '" + std::string(name) + "'");
  return c;
}

void TypeRegistry::canonicalize_ref_targets() {
  for (auto& [mm_name, mm] : metamodels_) {
    for (auto& c : mm->classes) {
      for (auto& [ref_name, ref] : c.references) {
        if (ref.target_class.empty()) continue;
        // A bare name prefers a class of the owning metamodel; only then is
        // it looked up across all metamodels (where it must be unique).
        const ClassDef* target = nullptr;
        if (ref.target_class.find('.') == std::string::npos) {
          target = find_class(mm_name + "." + ref.target_class);
        }
        if (!target) target = find_class(ref.target_class);
        if (!target) {
          throw Error(ErrorCode::ResolutionError,
                      "reference " + c.qualified() + "." + ref_name +
                          " targets unknown class '" + ref.target_class + "'");
        }
        ref.target_class = target->qualified();
      }
    }
  }
}

void TypeRegistry::validate() const {
  for (const auto& [mm_name, mm] : metamodels_) {
    for (const auto& c : mm->classes) {
      for (const auto& [ref_name, ref] : c.references) {
        if (ref.target_class.empty()) continue;  // untyped, trace only
        if (!find_class(ref.target_class)) {
          throw Error(ErrorCode::ResolutionError,
                      "reference " + c.qualified() + "." + ref_name +
                          " targets unknown class '" + ref.target_class + "'");
        }
      }
    }
  }
}

std::vector<std::string> TypeRegistry::metamodel_names() const {
  std::vector<std::string> out;
  for (const auto& [name, mm] : metamodels_) out.push_back(name);
  return out;
}

}  // namespace hengine
