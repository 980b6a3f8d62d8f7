// Bundled benchmark tasks: asset loading, brute-force oracles, and seeded
// random instance generators for property testing.
#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hengine/graph.hpp"
#include "hengine/system.hpp"

namespace hengine {

struct TaskInfo {
  std::string id;    // "1.1" .. "6.1"
  std::string dir;   // subdirectory under the cases root
  std::string unit;  // entry unit (or rule) executed for the task
  bool injective;    // match mode the task is meant to run with
};

/// All bundled tasks in id order.
const std::vector<TaskInfo>& tasks();

/// Lookup by id; throws ResolutionError for an unknown id.
const TaskInfo& task(std::string_view id);

/// Root of the bundled assets; the HENGINE_CASES_DIR environment variable
/// overrides the compiled-in location.
std::string cases_root();

/// Whole file as a string; throws IoError.
std::string read_text_file(const std::string& path);

TransformationSystem load_system(const TaskInfo& t);
InstanceGraph load_fixture(const TaskInfo& t, const TransformationSystem& sys);

enum class CountKind { Nodes, LoopingEdges, IsolatedNodes, Circles, DanglingEdges };

/// Exhaustive-enumeration counts over a graph1 instance. Nodes: Node objects.
/// Looping: Edge objects whose src and trg links reach the same node.
/// Isolated: Nodes incident to no src or trg link. Circles: unordered node
/// triples carrying a directed 3-cycle, each triple counted once. Dangling:
/// Edge objects missing the src link, the trg link, or both.
std::int64_t oracle_count(CountKind kind, const InstanceGraph& g);

using NodePair = std::pair<ObjectId, ObjectId>;

/// Current linksTo relation of a graph3 instance as an ordered-pair set.
std::set<NodePair> linksto_pairs(const InstanceGraph& g);

/// Pairs (a, b) with a path of one or more linksTo steps from a to b;
/// a == b occurs exactly when a lies on a cycle.
std::set<NodePair> oracle_closure(const InstanceGraph& g);

/// Fixpoint of adding (a, c) for pairwise-distinct nodes a, b, c with (a, b)
/// and (b, c) present and (a, c) absent: the relation the transitive-edge
/// rule reaches under injective matching. The fixpoint is order-independent.
std::set<NodePair> oracle_rule_closure(const InstanceGraph& g);

/// Direct translations of a graph1 instance into graph2 / graph3. Nodes
/// contained in a Graph are copied with their attributes; edges are copied
/// when they have both a src and a trg link and both endpoints were copied
/// (dangling edges have no representation in the target).
InstanceGraph oracle_migrate(const InstanceGraph& g,
                             std::shared_ptr<const TypeRegistry> types);
InstanceGraph oracle_migrate_topology(const InstanceGraph& g,
                                      std::shared_ptr<const TypeRegistry> types);

/// Deterministic graph1 instance: one Graph, 1..max_nodes contained Nodes
/// (names drawn partly from a small pool, so distinct graphs can share
/// names), up to max_edges contained Edges. With allow_dangling each
/// endpoint link is present with probability 0.8, otherwise always.
InstanceGraph random_graph(std::uint64_t seed, int max_nodes, int max_edges, bool allow_dangling,
                           std::shared_ptr<const TypeRegistry> types);

/// Deterministic graph3 instance; self-links and duplicate links allowed.
InstanceGraph random_graph3(std::uint64_t seed, int max_nodes, int max_edges,
                            std::shared_ptr<const TypeRegistry> types);

/// Copy keeping only the objects of one metamodel and the links among them.
InstanceGraph filter_metamodel(const InstanceGraph& g, std::string_view metamodel);

}  // namespace hengine
