// Instance level: typed attributed graphs with a revertible change journal.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hengine/metamodel.hpp"
#include "hengine/value.hpp"

namespace hengine {

struct ObjectId {
  std::uint64_t value = 0;
  auto operator<=>(const ObjectId&) const = default;
};

struct Link {
  ObjectId src;
  std::string ref;
  ObjectId tgt;
  auto operator<=>(const Link&) const = default;
};

struct Object {
  const ClassDef* cls = nullptr;
  std::map<std::string, Value> attrs;
};

enum class DeleteMode { ForbidDangling, CascadeLinks };

enum class ViolationKind {
  UnknownReference,
  BadTargetClass,
  MissingEndpoint,
  Multiplicity,
  MultipleContainers,
  ContainmentCycle,
  UnknownAttribute,
  BadAttributeType,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

/// Handle to a journal position. Reverting invalidates every savepoint taken
/// after the one reverted to.
struct Savepoint {
  std::uint64_t serial = 0;
};

/// A mutable object graph conforming to a TypeRegistry. Every mutation goes
/// through the journal, so any savepoint can be reverted to exactly. Links
/// are an ordered list; order is preserved by printing but ignored by
/// matching. ObjectIds are never reused within one graph, even across revert.
///
/// Single-owner: no concurrent mutation. Copies are independent graphs.
class InstanceGraph {
 public:
  explicit InstanceGraph(std::shared_ptr<const TypeRegistry> types);

  const TypeRegistry& types() const { return *types_; }
  const std::shared_ptr<const TypeRegistry>& types_ptr() const { return types_; }

  // -- editing --------------------------------------------------------------

  ObjectId create_object(const ClassDef* cls);
  ObjectId create_object(std::string_view class_name);
  void delete_object(ObjectId id, DeleteMode mode = DeleteMode::ForbidDangling);
  void set_attribute(ObjectId id, std::string_view attr, Value v);
  void add_link(ObjectId src, std::string_view ref, ObjectId tgt);
  void remove_link(ObjectId src, std::string_view ref, ObjectId tgt);

  // -- reading --------------------------------------------------------------

  bool has_object(ObjectId id) const { return objects_.count(id) != 0; }
  const Object& object(ObjectId id) const;
  const Value& attribute(ObjectId id, std::string_view attr) const;
  const std::map<ObjectId, Object>& objects() const { return objects_; }
  const std::vector<Link>& links() const { return links_; }

  bool has_link(ObjectId src, std::string_view ref, ObjectId tgt) const;
  std::vector<ObjectId> link_targets(ObjectId src, std::string_view ref) const;
  std::vector<ObjectId> link_sources(std::string_view ref, ObjectId tgt) const;
  bool touches(ObjectId id) const;  // any link with id as src or tgt

  /// Empty result iff every instance-level invariant holds. Violations are
  /// data, not errors; a graph built through the editing API stays clean.
  std::vector<Violation> conforms() const;

  // -- journal --------------------------------------------------------------

  Savepoint savepoint();
  void revert_to(const Savepoint& sp);
  void release(const Savepoint& sp);
  /// Total number of primitive edits journaled so far (savepoints excluded).
  std::size_t edit_count() const { return journal_.size(); }

 private:
  friend struct GraphBuilder;

  struct CreateRec { ObjectId id; };
  struct DeleteRec { ObjectId id; Object former; };
  struct SetAttrRec { ObjectId id; std::string attr; Value former; };
  struct AddLinkRec { Link link; std::size_t pos; };
  struct RemoveLinkRec { Link link; std::size_t pos; };
  using JournalRec = std::variant<CreateRec, DeleteRec, SetAttrRec, AddLinkRec, RemoveLinkRec>;

  const Object& require(ObjectId id) const;
  const RefDef& require_ref(const Object& src, std::string_view ref, ObjectId src_id) const;
  void undo(const JournalRec& rec);
  void remove_link_at(std::size_t pos);

  std::shared_ptr<const TypeRegistry> types_;
  std::map<ObjectId, Object> objects_;
  std::vector<Link> links_;
  std::uint64_t next_id_ = 1;

  std::vector<JournalRec> journal_;
  std::map<std::uint64_t, std::size_t> savepoints_;  // serial -> journal index
  std::uint64_t next_savepoint_ = 1;
};

/// Raw edits that bypass the precondition checks of the editing API. Used by
/// the model-file parser (so malformed files surface as conforms() violations
/// rather than exceptions) and by tests that need a corrupted graph.
struct GraphBuilder {
  static ObjectId raw_create(InstanceGraph& g, const ClassDef* cls);
  static void raw_set_attr(InstanceGraph& g, ObjectId id, std::string attr, Value v);
  static void raw_add_link(InstanceGraph& g, Link link);
};

/// Deletes every trace object together with all links that mention one.
void strip_traces(InstanceGraph& g);

}  // namespace hengine
