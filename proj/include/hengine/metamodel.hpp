// Type level: metamodels, classes, and the registry that owns them.
#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hengine/error.hpp"
#include "hengine/value.hpp"

namespace hengine {

/// A reference declared on a class. An empty target_class means "any object",
/// which only the built-in trace metamodel uses.
struct RefDef {
  std::string target_class;  // qualified "metamodel.Class", or "" for any
  bool many = false;         // upper bound: false = at most one link per source
  bool containment = false;
};

struct ClassDef {
  std::string metamodel;  // owning metamodel name, set on registration
  std::string name;
  std::map<std::string, PrimType> attributes;
  std::map<std::string, RefDef> references;

  std::string qualified() const { return metamodel + "." + name; }
  bool untyped_ref(std::string_view ref) const;
};

struct Metamodel {
  std::string name;
  std::vector<ClassDef> classes;
};

/// Owns every registered metamodel. Class pointers handed out stay valid for
/// the registry's lifetime; instance graphs keep the registry alive via
/// shared_ptr. The trace metamodel (class Trace with untyped many-references
/// source and target) is registered in every registry.
class TypeRegistry {
 public:
  static std::shared_ptr<TypeRegistry> create();

  void register_metamodel(Metamodel mm);

  const Metamodel* find_metamodel(std::string_view name) const;
  /// Accepts "mm.Class" or a bare class name when unique across metamodels.
  /// Returns nullptr when absent; throws AmbiguousClass for a bare name
  /// declared by several metamodels.
  const ClassDef* find_class(std::string_view name) const;
  /// Like find_class but throws UnknownClass instead of returning nullptr.
  const ClassDef* resolve_class(std::string_view name) const;

  /// Rewrites every reference target to its qualified "mm.Class" form.
  /// Throws ResolutionError for a target that does not resolve. Call after
  /// all metamodels of a system are registered.
  void canonicalize_ref_targets();

  /// Checks that every reference's target class resolves. Call after all
  /// metamodels of a system are registered.
  void validate() const;

  std::vector<std::string> metamodel_names() const;

  static constexpr const char* kTraceMetamodel = "trace";
  static constexpr const char* kTraceClass = "Trace";
  const ClassDef* trace_class() const { return trace_class_; }

 private:
  TypeRegistry() = default;
  std::map<std::string, std::unique_ptr<Metamodel>> metamodels_;
  const ClassDef* trace_class_ = nullptr;
};

}  // namespace hengine
