#include "hengine/graph.hpp"

#include <iterator>

#include "hengine/error.hpp"

namespace hengine {

InstanceGraph::InstanceGraph(std::shared_ptr<const TypeRegistry> types)
    : types_(std::move(types)) {}

const Object& InstanceGraph::require(ObjectId id) const {
  auto it = objects_.find(id);
  if (it == objects_.end()) {
    throw Error(ErrorCode::UnknownObject, "no object #" + std::to_string(id.value));
  }
  return it->second;
}

const RefDef& InstanceGraph::require_ref(const Object& src, std::string_view ref,
                                         ObjectId src_id) const {
  auto it = src.cls->references.find(std::string(ref));
  if (it == src.cls->references.end()) {
    throw Error(ErrorCode::UnknownReference, "class " + src.cls->qualified() +
                                                 " has no reference '" + std::string(ref) +
                                                 "' (object #" + std::to_string(src_id.value) + ")");
  }
  return it->second;
}

ObjectId InstanceGraph::create_object(const ClassDef* cls) {
  Object obj;
  obj.cls = cls;
  for (const auto& [name, type] : cls->attributes) obj.attrs[name] = default_value(type);
  ObjectId id{next_id_++};
  objects_.emplace(id, std::move(obj));
  journal_.push_back(CreateRec{id});
  return id;
}

ObjectId InstanceGraph::create_object(std::string_view class_name) {
  return create_object(types_->resolve_class(class_name));
}

void InstanceGraph::delete_object(ObjectId id, DeleteMode mode) {
  require(id);
  if (mode == DeleteMode::ForbidDangling) {
    if (touches(id)) {
      throw Error(ErrorCode::DanglingViolation,
                  "object #" + std::to_string(id.value) + " still has incident links");
    }
  } else {
    // Remove incident links back to front so journaled positions stay exact.
    for (std::size_t i = links_.size(); i-- > 0;) {
      if (links_[i].src == id || links_[i].tgt == id) remove_link_at(i);
    }
  }
  auto it = objects_.find(id);
  journal_.push_back(DeleteRec{id, it->second});
  objects_.erase(it);
}

void InstanceGraph::set_attribute(ObjectId id, std::string_view attr, Value v) {
  const Object& obj = require(id);
  auto decl = obj.cls->attributes.find(std::string(attr));
  if (decl == obj.cls->attributes.end()) {
    throw Error(ErrorCode::UnknownAttribute,
                "class " + obj.cls->qualified() + " has no attribute '" + std::string(attr) + "'");
  }
  // Widen int to float on assignment; everything else must match exactly.
  if (decl->second == PrimType::Float && type_of(v) == PrimType::Int) {
    v = static_cast<double>(std::get<std::int64_t>(v));
  }
  if (type_of(v) != decl->second) {
    throw Error(ErrorCode::TypeMismatch, "attribute '" + std::string(attr) + "' of " +
                                             obj.cls->qualified() + " is " +
                                             type_name(decl->second) + ", got " +
                                             type_name(type_of(v)));
  }
  auto& slot = objects_.at(id).attrs.at(std::string(attr));
  journal_.push_back(SetAttrRec{id, std::string(attr), slot});
  slot = std::move(v);
}

void InstanceGraph::add_link(ObjectId src, std::string_view ref, ObjectId tgt) {
  const Object& s = require(src);
  const Object& t = require(tgt);
  const RefDef& decl = require_ref(s, ref, src);
  if (!decl.target_class.empty()) {
    const ClassDef* want = types_->find_class(decl.target_class);
    if (t.cls != want) {
      throw Error(ErrorCode::TypeMismatch, "reference '" + std::string(ref) + "' targets " +
                                               decl.target_class + ", object #" +
                                               std::to_string(tgt.value) + " is " +
                                               t.cls->qualified());
    }
  }
  if (!decl.many) {
    for (const Link& l : links_) {
      if (l.src == src && l.ref == ref) {
        throw Error(ErrorCode::MultiplicityViolation,
                    "reference '" + std::string(ref) + "' of object #" +
                        std::to_string(src.value) + " already holds a link");
      }
    }
  }
  links_.push_back(Link{src, std::string(ref), tgt});
  journal_.push_back(AddLinkRec{links_.back(), links_.size() - 1});
}

void InstanceGraph::remove_link(ObjectId src, std::string_view ref, ObjectId tgt) {
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (links_[i].src == src && links_[i].ref == ref && links_[i].tgt == tgt) {
      remove_link_at(i);
      return;
    }
  }
  throw Error(ErrorCode::NoSuchLink, "no link #" + std::to_string(src.value) + " -" +
                                         std::string(ref) + "-> #" + std::to_string(tgt.value));
}

void InstanceGraph::remove_link_at(std::size_t pos) {
  journal_.push_back(RemoveLinkRec{links_[pos], pos});
  links_.erase(links_.begin() + static_cast<std::ptrdiff_t>(pos));
}

const Object& InstanceGraph::object(ObjectId id) const { return require(id); }

const Value& InstanceGraph::attribute(ObjectId id, std::string_view attr) const {
  const Object& obj = require(id);
  auto it = obj.attrs.find(std::string(attr));
  if (it == obj.attrs.end()) {
    throw Error(ErrorCode::UnknownAttribute,
                "object #" + std::to_string(id.value) + " has no attribute '" +
                    std::string(attr) + "'");
  }
  return it->second;
}

bool InstanceGraph::has_link(ObjectId src, std::string_view ref, ObjectId tgt) const {
  for (const Link& l : links_) {
    if (l.src == src && l.tgt == tgt && l.ref == ref) return true;
  }
  return false;
}

std::vector<ObjectId> InstanceGraph::link_targets(ObjectId src, std::string_view ref) const {
  std::vector<ObjectId> out;
  for (const Link& l : links_) {
    if (l.src == src && l.ref == ref) out.push_back(l.tgt);
  }
  return out;
}

std::vector<ObjectId> InstanceGraph::link_sources(std::string_view ref, ObjectId tgt) const {
  std::vector<ObjectId> out;
  for (const Link& l : links_) {
    if (l.tgt == tgt && l.ref == ref) out.push_back(l.src);
  }
  return out;
}

bool InstanceGraph::touches(ObjectId id) const {
  for (const Link& l : links_) {
    if (l.src == id || l.tgt == id) return true;
  }
  return false;
}

std::vector<Violation> InstanceGraph::conforms() const {
  std::vector<Violation> out;
  auto describe = [](const Link& l) {
    return "#" + std::to_string(l.src.value) + " -" + l.ref + "-> #" +
           std::to_string(l.tgt.value);
  };

  for (const auto& [id, obj] : objects_) {
    for (const auto& [attr, v] : obj.attrs) {
      auto decl = obj.cls->attributes.find(attr);
      if (decl == obj.cls->attributes.end()) {
        out.push_back({ViolationKind::UnknownAttribute,
                       "object #" + std::to_string(id.value) + " carries undeclared attribute '" +
                           attr + "'"});
      } else if (type_of(v) != decl->second) {
        out.push_back({ViolationKind::BadAttributeType,
                       "attribute '" + attr + "' of object #" + std::to_string(id.value) +
                           " should be " + type_name(decl->second)});
      }
    }
  }

  std::map<std::pair<ObjectId, std::string>, int> one_counts;
  std::map<ObjectId, std::vector<ObjectId>> containers;  // child -> containers
  for (const Link& l : links_) {
    auto src_it = objects_.find(l.src);
    auto tgt_it = objects_.find(l.tgt);
    if (src_it == objects_.end() || tgt_it == objects_.end()) {
      out.push_back({ViolationKind::MissingEndpoint,
                     "link " + describe(l) + " mentions a deleted object"});
      continue;
    }
    auto ref_it = src_it->second.cls->references.find(l.ref);
    if (ref_it == src_it->second.cls->references.end()) {
      out.push_back({ViolationKind::UnknownReference,
                     "link " + describe(l) + " uses an undeclared reference"});
      continue;
    }
    const RefDef& decl = ref_it->second;
    if (!decl.target_class.empty()) {
      const ClassDef* want = types_->find_class(decl.target_class);
      if (tgt_it->second.cls != want) {
        out.push_back({ViolationKind::BadTargetClass,
                       "link " + describe(l) + " targets " + tgt_it->second.cls->qualified() +
                           ", declared " + decl.target_class});
      }
    }
    if (!decl.many && ++one_counts[{l.src, l.ref}] == 2) {
      out.push_back({ViolationKind::Multiplicity,
                     "reference '" + l.ref + "' of object #" + std::to_string(l.src.value) +
                         " holds more than one link"});
    }
    if (decl.containment) containers[l.tgt].push_back(l.src);
  }

  for (const auto& [child, cs] : containers) {
    if (cs.size() > 1) {
      out.push_back({ViolationKind::MultipleContainers,
                     "object #" + std::to_string(child.value) + " has " +
                         std::to_string(cs.size()) + " containers"});
    }
  }
  // Containment cycle check over the (first) container of each object.
  for (const auto& [start, cs] : containers) {
    ObjectId cur = start;
    std::size_t hops = 0;
    while (hops++ <= containers.size()) {
      auto it = containers.find(cur);
      if (it == containers.end() || it->second.empty()) break;
      cur = it->second.front();
      if (cur == start) {
        out.push_back({ViolationKind::ContainmentCycle,
                       "containment cycle through object #" + std::to_string(start.value)});
        break;
      }
    }
  }
  return out;
}

Savepoint InstanceGraph::savepoint() {
  Savepoint sp{next_savepoint_++};
  savepoints_[sp.serial] = journal_.size();
  return sp;
}

void InstanceGraph::revert_to(const Savepoint& sp) {
  auto it = savepoints_.find(sp.serial);
  if (it == savepoints_.end()) {
    throw Error(ErrorCode::StaleSavepoint, "savepoint " + std::to_string(sp.serial) +
                                               " was never issued or is no longer valid");
  }
  std::size_t mark = it->second;
  while (journal_.size() > mark) {
    undo(journal_.back());
    journal_.pop_back();
  }
  // Savepoints issued after this one can no longer be reached.
  savepoints_.erase(std::next(savepoints_.find(sp.serial)), savepoints_.end());
}

void InstanceGraph::release(const Savepoint& sp) { savepoints_.erase(sp.serial); }

void InstanceGraph::undo(const JournalRec& rec) {
  std::visit(
      [this](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, CreateRec>) {
          objects_.erase(r.id);
        } else if constexpr (std::is_same_v<T, DeleteRec>) {
          objects_[r.id] = r.former;
        } else if constexpr (std::is_same_v<T, SetAttrRec>) {
          objects_.at(r.id).attrs[r.attr] = r.former;
        } else if constexpr (std::is_same_v<T, AddLinkRec>) {
          links_.erase(links_.begin() + static_cast<std::ptrdiff_t>(r.pos));
        } else if constexpr (std::is_same_v<T, RemoveLinkRec>) {
          links_.insert(links_.begin() + static_cast<std::ptrdiff_t>(r.pos), r.link);
        }
      },
      rec);
}

ObjectId GraphBuilder::raw_create(InstanceGraph& g, const ClassDef* cls) {
  return g.create_object(cls);
}

void GraphBuilder::raw_set_attr(InstanceGraph& g, ObjectId id, std::string attr, Value v) {
  auto it = g.objects_.find(id);
  if (it == g.objects_.end()) {
    throw Error(ErrorCode::UnknownObject, "no object #" + std::to_string(id.value));
  }
  auto& slot = it->second.attrs[attr];
  g.journal_.push_back(InstanceGraph::SetAttrRec{id, attr, slot});
  slot = std::move(v);
}

void GraphBuilder::raw_add_link(InstanceGraph& g, Link link) {
  g.links_.push_back(link);
  g.journal_.push_back(InstanceGraph::AddLinkRec{std::move(link), g.links_.size() - 1});
}

void strip_traces(InstanceGraph& g) {
  const ClassDef* trace = g.types().trace_class();
  std::vector<ObjectId> doomed;
  for (const auto& [id, obj] : g.objects()) {
    if (obj.cls == trace) doomed.push_back(id);
  }
  for (ObjectId id : doomed) g.delete_object(id, DeleteMode::CascadeLinks);
}

}  // namespace hengine
