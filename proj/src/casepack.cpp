#include "hengine/casepack.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "hengine/error.hpp"
#include "hengine/parse.hpp"

#ifndef HENGINE_CASES_DIR
#define HENGINE_CASES_DIR "cases"
#endif

namespace hengine {

const std::vector<TaskInfo>& tasks() {
  static const std::vector<TaskInfo> all = {
      {"1.1", "task1.1", "CreateSimple", true},
      {"1.2", "task1.2", "CreateExtended", true},
      {"1.3", "task1.3", "BuildGreetingText", true},
      {"2.1", "task2", "CountNodes", true},
      {"2.2", "task2", "CountLoopingEdges", true},
      {"2.3", "task2", "CountIsolatedNodes", true},
      {"2.4", "task2", "CountCircles", true},
      {"2.5", "task2", "CountDanglingEdges", true},
      {"3.1", "task3", "ReverseAll", true},
      {"4.1", "task4.1", "SimpleMigration", false},
      {"4.2", "task4.2", "TopologyMigration", false},
      {"5.1", "task5", "DeleteNodeN1Simple", true},
      {"5.2", "task5", "DeleteNodeN1WithAllEdges", true},
      {"6.1", "task6", "BuildClosure", true},
  };
  return all;
}

const TaskInfo& task(std::string_view id) {
  for (const TaskInfo& t : tasks()) {
    if (t.id == id) return t;
  }
  throw Error(ErrorCode::ResolutionError, "no bundled task '" + std::string(id) + "'");
}

std::string cases_root() {
  if (const char* env = std::getenv("HENGINE_CASES_DIR")) return env;
  return HENGINE_CASES_DIR;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

TransformationSystem load_system(const TaskInfo& t) {
  return parse_system(read_text_file(cases_root() + "/" + t.dir + "/system.gts"));
}

InstanceGraph load_fixture(const TaskInfo& t, const TransformationSystem& sys) {
  return parse_model(read_text_file(cases_root() + "/" + t.dir + "/input.gim"), sys.types);
}

// ---------------------------------------------------------------------------
// counting oracles

namespace {

bool is_class(const Object& o, std::string_view qualified) {
  return o.cls->qualified() == qualified;
}

/// Unique endpoint of a bound-one link, or absent.
std::optional<ObjectId> one_target(const InstanceGraph& g, ObjectId obj, const char* ref) {
  std::vector<ObjectId> ts = g.link_targets(obj, ref);
  if (ts.empty()) return std::nullopt;
  return ts.front();
}

struct Graph1View {
  std::vector<ObjectId> nodes;
  std::vector<ObjectId> edges;
  /// Complete edges as (src, trg) endpoint pairs.
  std::vector<std::pair<ObjectId, ObjectId>> arrows;

  explicit Graph1View(const InstanceGraph& g) {
    for (const auto& [id, obj] : g.objects()) {
      if (is_class(obj, "graph1.Node")) nodes.push_back(id);
      if (is_class(obj, "graph1.Edge")) edges.push_back(id);
    }
    for (ObjectId e : edges) {
      auto s = one_target(g, e, "src");
      auto t = one_target(g, e, "trg");
      if (s && t) arrows.emplace_back(*s, *t);
    }
  }

  bool arrow(ObjectId a, ObjectId b) const {
    return std::find(arrows.begin(), arrows.end(), std::make_pair(a, b)) != arrows.end();
  }
};

std::int64_t count_circles(const Graph1View& v) {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < v.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < v.nodes.size(); ++j) {
      for (std::size_t k = j + 1; k < v.nodes.size(); ++k) {
        ObjectId a = v.nodes[i], b = v.nodes[j], c = v.nodes[k];
        bool fwd = v.arrow(a, b) && v.arrow(b, c) && v.arrow(c, a);
        bool rev = v.arrow(a, c) && v.arrow(c, b) && v.arrow(b, a);
        if (fwd || rev) ++n;
      }
    }
  }
  return n;
}

}  // namespace

std::int64_t oracle_count(CountKind kind, const InstanceGraph& g) {
  Graph1View v(g);
  switch (kind) {
    case CountKind::Nodes:
      return static_cast<std::int64_t>(v.nodes.size());
    case CountKind::LoopingEdges: {
      std::int64_t n = 0;
      for (ObjectId e : v.edges) {
        auto s = one_target(g, e, "src");
        auto t = one_target(g, e, "trg");
        if (s && t && *s == *t) ++n;
      }
      return n;
    }
    case CountKind::IsolatedNodes: {
      std::int64_t n = 0;
      for (ObjectId node : v.nodes) {
        bool incident = false;
        for (const Link& l : g.links()) {
          if ((l.ref == "src" || l.ref == "trg") && l.tgt == node) incident = true;
        }
        if (!incident) ++n;
      }
      return n;
    }
    case CountKind::Circles:
      return count_circles(v);
    case CountKind::DanglingEdges: {
      std::int64_t n = 0;
      for (ObjectId e : v.edges) {
        if (!one_target(g, e, "src") || !one_target(g, e, "trg")) ++n;
      }
      return n;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// closure oracles

std::set<NodePair> linksto_pairs(const InstanceGraph& g) {
  std::set<NodePair> pairs;
  for (const Link& l : g.links()) {
    if (l.ref != "linksTo") continue;
    if (!is_class(g.object(l.src), "graph3.Node")) continue;
    pairs.emplace(l.src, l.tgt);
  }
  return pairs;
}

std::set<NodePair> oracle_closure(const InstanceGraph& g) {
  std::set<NodePair> direct = linksto_pairs(g);
  std::map<ObjectId, std::vector<ObjectId>> succ;
  for (const NodePair& p : direct) succ[p.first].push_back(p.second);

  std::set<NodePair> reach;
  for (const auto& [id, obj] : g.objects()) {
    if (!is_class(obj, "graph3.Node")) continue;
    std::vector<ObjectId> frontier{id};
    std::set<ObjectId> seen;
    while (!frontier.empty()) {
      ObjectId cur = frontier.back();
      frontier.pop_back();
      auto it = succ.find(cur);
      if (it == succ.end()) continue;
      for (ObjectId next : it->second) {
        if (seen.insert(next).second) frontier.push_back(next);
      }
    }
    for (ObjectId t : seen) reach.emplace(id, t);
  }
  return reach;
}

std::set<NodePair> oracle_rule_closure(const InstanceGraph& g) {
  std::set<NodePair> rel = linksto_pairs(g);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<NodePair> snapshot(rel.begin(), rel.end());
    for (const NodePair& ab : snapshot) {
      for (const NodePair& bc : snapshot) {
        if (ab.second != bc.first) continue;
        ObjectId a = ab.first, b = ab.second, c = bc.second;
        if (a == b || b == c || a == c) continue;
        if (rel.emplace(a, c).second) changed = true;
      }
    }
  }
  return rel;
}

// ---------------------------------------------------------------------------
// migration oracles

namespace {

InstanceGraph migrate_into(const InstanceGraph& g, std::shared_ptr<const TypeRegistry> types,
                           const char* target_mm, bool edges_as_objects) {
  std::string mm(target_mm);
  InstanceGraph out(std::move(types));
  const ClassDef* graph_cls = out.types().resolve_class(mm + ".Graph");
  const ClassDef* node_cls = out.types().resolve_class(mm + ".Node");

  ObjectId container = out.create_object(graph_cls);

  std::set<ObjectId> contained;
  for (const Link& l : g.links()) {
    if (l.ref == "nodes" && is_class(g.object(l.src), "graph1.Graph")) contained.insert(l.tgt);
  }

  std::map<ObjectId, ObjectId> copied;
  for (const auto& [id, obj] : g.objects()) {
    if (!is_class(obj, "graph1.Node") || !contained.count(id)) continue;
    ObjectId nid = out.create_object(node_cls);
    for (const auto& [attr, value] : obj.attrs) out.set_attribute(nid, attr, value);
    out.add_link(container, "nodes", nid);
    copied.emplace(id, nid);
  }

  Graph1View v(g);
  for (ObjectId e : v.edges) {
    auto s = one_target(g, e, "src");
    auto t = one_target(g, e, "trg");
    if (!s || !t || !copied.count(*s) || !copied.count(*t)) continue;
    if (edges_as_objects) {
      ObjectId eid = out.create_object(out.types().resolve_class(mm + ".Edge"));
      out.add_link(eid, "src", copied.at(*s));
      out.add_link(eid, "trg", copied.at(*t));
      out.add_link(container, "edges", eid);
    } else {
      out.add_link(copied.at(*s), "linksTo", copied.at(*t));
    }
  }
  return out;
}

}  // namespace

InstanceGraph oracle_migrate(const InstanceGraph& g,
                             std::shared_ptr<const TypeRegistry> types) {
  return migrate_into(g, std::move(types), "graph2", true);
}

InstanceGraph oracle_migrate_topology(const InstanceGraph& g,
                                      std::shared_ptr<const TypeRegistry> types) {
  return migrate_into(g, std::move(types), "graph3", false);
}

// ---------------------------------------------------------------------------
// random instances

namespace {

std::string pick_name(std::mt19937_64& rng, int index) {
  static const char* pool[] = {"a", "b", "n1"};
  if (rng() % 2 == 0) return "n" + std::to_string(index);
  return pool[rng() % 3];
}

}  // namespace

InstanceGraph random_graph(std::uint64_t seed, int max_nodes, int max_edges, bool allow_dangling,
                           std::shared_ptr<const TypeRegistry> types) {
  std::mt19937_64 rng(seed);
  InstanceGraph g(std::move(types));
  const ClassDef* graph_cls = g.types().resolve_class("graph1.Graph");
  const ClassDef* node_cls = g.types().resolve_class("graph1.Node");
  const ClassDef* edge_cls = g.types().resolve_class("graph1.Edge");

  ObjectId container = g.create_object(graph_cls);
  int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_nodes));
  std::vector<ObjectId> nodes;
  for (int i = 0; i < n; ++i) {
    ObjectId id = g.create_object(node_cls);
    g.set_attribute(id, "name", pick_name(rng, i));
    g.add_link(container, "nodes", id);
    nodes.push_back(id);
  }
  int m = static_cast<int>(rng() % static_cast<std::uint64_t>(max_edges + 1));
  for (int i = 0; i < m; ++i) {
    ObjectId e = g.create_object(edge_cls);
    g.add_link(container, "edges", e);
    bool with_src = !allow_dangling || rng() % 10 < 8;
    bool with_trg = !allow_dangling || rng() % 10 < 8;
    if (with_src) g.add_link(e, "src", nodes[rng() % nodes.size()]);
    if (with_trg) g.add_link(e, "trg", nodes[rng() % nodes.size()]);
  }
  return g;
}

InstanceGraph random_graph3(std::uint64_t seed, int max_nodes, int max_edges,
                            std::shared_ptr<const TypeRegistry> types) {
  std::mt19937_64 rng(seed);
  InstanceGraph g(std::move(types));
  const ClassDef* graph_cls = g.types().resolve_class("graph3.Graph");
  const ClassDef* node_cls = g.types().resolve_class("graph3.Node");

  ObjectId container = g.create_object(graph_cls);
  int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_nodes));
  std::vector<ObjectId> nodes;
  for (int i = 0; i < n; ++i) {
    ObjectId id = g.create_object(node_cls);
    g.set_attribute(id, "name", pick_name(rng, i));
    g.add_link(container, "nodes", id);
    nodes.push_back(id);
  }
  int m = static_cast<int>(rng() % static_cast<std::uint64_t>(max_edges + 1));
  for (int i = 0; i < m; ++i) {
    g.add_link(nodes[rng() % nodes.size()], "linksTo", nodes[rng() % nodes.size()]);
  }
  return g;
}

InstanceGraph filter_metamodel(const InstanceGraph& g, std::string_view metamodel) {
  InstanceGraph out(g.types_ptr());
  std::map<ObjectId, ObjectId> copied;
  for (const auto& [id, obj] : g.objects()) {
    if (obj.cls->metamodel != metamodel) continue;
    ObjectId nid = out.create_object(obj.cls);
    for (const auto& [attr, value] : obj.attrs) out.set_attribute(nid, attr, value);
    copied.emplace(id, nid);
  }
  for (const Link& l : g.links()) {
    auto s = copied.find(l.src);
    auto t = copied.find(l.tgt);
    if (s != copied.end() && t != copied.end()) {
      out.add_link(s->second, l.ref, t->second);
    }
  }
  return out;
}

}  // namespace hengine
