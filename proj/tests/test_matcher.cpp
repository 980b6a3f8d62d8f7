#include <doctest.h>

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hengine/casepack.hpp"
#include "hengine/matcher.hpp"
#include "hengine/parse.hpp"
#include "support/brute_matcher.hpp"
#include "support/pattern_gen.hpp"

using namespace hengine;
using namespace hengine::test;

namespace {

const char* kSys = R"(
metamodel graph1 {
  class Graph {
    contains nodes: many Node
    contains edges: many Edge
  }
  class Node {
    attr name: string
  }
  class Edge {
    ref src: one Node
    ref trg: one Node
  }
}

rule OneNode {
  preserve a: graph1.Node
}

rule TwoNodes {
  preserve a: graph1.Node
  preserve b: graph1.Node
}

rule EdgeBetween {
  preserve e: graph1.Edge
  preserve a: graph1.Node
  preserve b: graph1.Node
  preserve e -src-> a
  preserve e -trg-> b
}

rule Circle {
  preserve a: graph1.Node
  preserve b: graph1.Node
  preserve c: graph1.Node
  preserve ea: graph1.Edge
  preserve eb: graph1.Edge
  preserve ec: graph1.Edge
  preserve ea -src-> a
  preserve ea -trg-> b
  preserve eb -src-> b
  preserve eb -trg-> c
  preserve ec -src-> c
  preserve ec -trg-> a
}

rule SameName {
  param n: inout
  preserve a: graph1.Node { name = n }
  preserve b: graph1.Node { name = n }
}

rule DerivedName {
  preserve a: graph1.Node
  preserve b: graph1.Node { name = a.name + "!" }
}

rule ForwardRef {
  preserve a: graph1.Node { name = b.name }
  preserve b: graph1.Node
}

rule Dangle {
  preserve e: graph1.Edge
  forbid(hasSource) a: graph1.Node
  forbid(hasSource) e -src-> a
  forbid(hasTarget) b: graph1.Node
  forbid(hasTarget) e -trg-> b
  condition = !hasSource | !hasTarget
}
)";

struct Fixture {
  TransformationSystem sys = parse_system(kSys);
  InstanceGraph g{sys.types};

  const Pattern& lhs(const char* rule) const { return sys.find_rule(rule)->lhs; }

  ObjectId node(const std::string& name) {
    ObjectId id = g.create_object("graph1.Node");
    g.set_attribute(id, "name", Value(name));
    return id;
  }
  ObjectId edge(std::optional<ObjectId> src, std::optional<ObjectId> trg) {
    ObjectId id = g.create_object("graph1.Edge");
    if (src) g.add_link(id, "src", *src);
    if (trg) g.add_link(id, "trg", *trg);
    return id;
  }
  void triangle(ObjectId a, ObjectId b, ObjectId c) {
    edge(a, b);
    edge(b, c);
    edge(c, a);
  }
};

}  // namespace

TEST_CASE("matches come in declaration-by-id order") {
  Fixture f;
  ObjectId n1 = f.node("x");
  ObjectId n2 = f.node("y");
  ObjectId n3 = f.node("z");

  auto ms = find_matches(f.lhs("OneNode"), f.g, {}, {true});
  REQUIRE(ms.size() == 3);
  CHECK(ms[0].bindings.at("a") == n1);
  CHECK(ms[1].bindings.at("a") == n2);
  CHECK(ms[2].bindings.at("a") == n3);

  auto pairs = find_matches(f.lhs("TwoNodes"), f.g, {}, {true});
  REQUIRE(pairs.size() == 6);
  CHECK(pairs[0].bindings.at("a") == n1);
  CHECK(pairs[0].bindings.at("b") == n2);
  CHECK(pairs[1].bindings.at("a") == n1);
  CHECK(pairs[1].bindings.at("b") == n3);
  CHECK(pairs[5].bindings.at("a") == n3);
  CHECK(pairs[5].bindings.at("b") == n2);
}

TEST_CASE("two disjoint directed triangles carry six circle matches") {
  Fixture f;
  ObjectId a = f.node("a"), b = f.node("b"), c = f.node("c");
  ObjectId d = f.node("d"), e = f.node("e"), x = f.node("f");
  f.triangle(a, b, c);
  f.triangle(d, e, x);

  CHECK(count_matches(f.lhs("Circle"), nullptr, f.g, {true}) == 6);
  CHECK(brute_matches(f.lhs("Circle"), f.g, {}, {true}).size() == 6);
  // Rotations only; a triangle read backwards is not a directed cycle here.
  CHECK(count_matches(f.lhs("Circle"), nullptr, f.g, {false}) == 6);
}

TEST_CASE("a self-loop matches the two-endpoint pattern only non-injectively") {
  Fixture f;
  ObjectId n = f.node("n");
  f.edge(n, n);

  CHECK(count_matches(f.lhs("EdgeBetween"), nullptr, f.g, {true}) == 0);
  auto ms = find_matches(f.lhs("EdgeBetween"), f.g, {}, {false});
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].bindings.at("a") == n);
  CHECK(ms[0].bindings.at("b") == n);
}

TEST_CASE("external bindings pin pattern variables and block reuse") {
  Fixture f;
  ObjectId n1 = f.node("x");
  ObjectId n2 = f.node("y");

  SUBCASE("pinned pattern variable") {
    Match partial;
    partial.bindings["a"] = n1;
    auto ms = find_matches(f.lhs("TwoNodes"), f.g, partial, {true});
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].bindings.at("a") == n1);
    CHECK(ms[0].bindings.at("b") == n2);
  }
  SUBCASE("pinned to the wrong class means no match") {
    Match partial;
    partial.bindings["a"] = f.edge(n1, n2);
    CHECK(find_matches(f.lhs("OneNode"), f.g, partial, {true}).empty());
  }
  SUBCASE("an extra binding consumes its object in injective mode") {
    Match partial;
    partial.bindings["outside"] = n1;
    CHECK(find_matches(f.lhs("TwoNodes"), f.g, partial, {true}).empty());
    CHECK(find_matches(f.lhs("TwoNodes"), f.g, partial, {false}).size() == 4);
    auto one = find_matches(f.lhs("OneNode"), f.g, partial, {true});
    REQUIRE(one.size() == 1);
    CHECK(one[0].bindings.at("a") == n2);
  }
}

TEST_CASE("a bare parameter constraint binds on first use, compares after") {
  Fixture f;
  ObjectId n1 = f.node("x");
  ObjectId n2 = f.node("x");
  f.node("y");

  auto ms = find_matches(f.lhs("SameName"), f.g, {}, {true});
  REQUIRE(ms.size() == 2);
  for (const Match& m : ms) {
    CHECK(std::get<std::string>(m.values.at("n")) == "x");
  }
  CHECK((ms[0].bindings.at("a") == n1 && ms[0].bindings.at("b") == n2));
  CHECK((ms[1].bindings.at("a") == n2 && ms[1].bindings.at("b") == n1));

  CHECK(find_matches(f.lhs("SameName"), f.g, {}, {false}).size() == 5);

  Match seeded;
  seeded.values.emplace("n", Value(std::string("y")));
  CHECK(find_matches(f.lhs("SameName"), f.g, seeded, {true}).empty());
  auto loose = find_matches(f.lhs("SameName"), f.g, seeded, {false});
  REQUIRE(loose.size() == 1);
  CHECK(loose[0].bindings.at("a") == loose[0].bindings.at("b"));
}

TEST_CASE("attribute expressions may read earlier pattern variables only") {
  Fixture f;
  ObjectId p = f.node("p");
  ObjectId bang = f.node("p!");

  auto ms = find_matches(f.lhs("DerivedName"), f.g, {}, {true});
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].bindings.at("a") == p);
  CHECK(ms[0].bindings.at("b") == bang);

  CHECK_THROWS_AS(find_matches(f.lhs("ForwardRef"), f.g, {}, {true}), Error);
}

TEST_CASE("formula leaves test for extensions; nesting follows the connectives") {
  Fixture f;
  ObjectId n1 = f.node("x");
  ObjectId n2 = f.node("y");
  ObjectId t = f.g.create_object("trace.Trace");
  f.g.add_link(t, "target", n1);

  ConditionGraph cg;
  cg.name = "marked";
  cg.pattern.nodes.push_back({"t", f.sys.types->trace_class(), {}});
  cg.pattern.edges.push_back({"t", "target", "a"});
  auto marked = std::make_shared<const ConditionGraph>(std::move(cg));

  Match on1, on2;
  on1.bindings["a"] = n1;
  on2.bindings["a"] = n2;

  FormulaPtr leaf = make_leaf(marked);
  CHECK(eval_formula(leaf.get(), on1, f.g, {true}));
  CHECK_FALSE(eval_formula(leaf.get(), on2, f.g, {true}));

  FormulaPtr nac = make_not(make_leaf(marked));
  CHECK_FALSE(eval_formula(nac.get(), on1, f.g, {true}));
  CHECK(eval_formula(nac.get(), on2, f.g, {true}));

  FormulaPtr both = make_and(make_leaf(marked), make_not(make_leaf(marked)));
  CHECK_FALSE(eval_formula(both.get(), on1, f.g, {true}));
  FormulaPtr either = make_or(make_leaf(marked), make_not(make_leaf(marked)));
  CHECK(eval_formula(either.get(), on1, f.g, {true}));
  CHECK(eval_formula(nullptr, on1, f.g, {true}));
}

TEST_CASE("condition variables inherit the host's injectivity") {
  Fixture f;
  ObjectId only = f.node("solo");

  ConditionGraph cg;
  cg.name = "another";
  cg.pattern.nodes.push_back({"w", f.sys.types->resolve_class("graph1.Node"), {}});
  auto another = std::make_shared<const ConditionGraph>(std::move(cg));
  FormulaPtr leaf = make_leaf(another);

  Match host;
  host.bindings["a"] = only;
  CHECK_FALSE(eval_formula(leaf.get(), host, f.g, {true}));
  CHECK(eval_formula(leaf.get(), host, f.g, {false}));

  f.node("second");
  CHECK(eval_formula(leaf.get(), host, f.g, {true}));
}

TEST_CASE("an explicit condition combines groups as written") {
  Fixture f;
  ObjectId a = f.node("a"), b = f.node("b");
  f.edge(a, b);                  // complete
  f.edge(a, std::nullopt);       // source only
  f.edge(std::nullopt, b);       // target only
  f.edge(std::nullopt, std::nullopt);  // bare

  const Rule* dangle = f.sys.find_rule("Dangle");
  CHECK(count_matches(dangle->lhs, dangle->condition.get(), f.g, {true}) == 3);
  CHECK(brute_count(dangle->lhs, dangle->condition.get(), f.g, {true}) == 3);
}

TEST_CASE("the empty pattern has exactly the trivial match") {
  Fixture f;
  Pattern empty;
  CHECK(find_matches(empty, f.g, {}, {true}).size() == 1);

  // Edges between externally bound variables are checked up front.
  ObjectId a = f.node("a"), b = f.node("b");
  ObjectId e = f.edge(a, b);
  Pattern edge_only;
  edge_only.edges.push_back({"e", "src", "a"});
  Match bound;
  bound.bindings["e"] = e;
  bound.bindings["a"] = a;
  CHECK(find_matches(edge_only, f.g, bound, {true}).size() == 1);
  bound.bindings["a"] = b;
  CHECK(find_matches(edge_only, f.g, bound, {true}).empty());
  bound.bindings.erase("a");
  CHECK(find_matches(edge_only, f.g, bound, {true}).empty());
}

TEST_CASE("find_first honors the acceptance predicate and enumeration order") {
  Fixture f;
  ObjectId n1 = f.node("x");
  ObjectId n2 = f.node("y");

  auto first = find_first(f.lhs("OneNode"), f.g, {}, {true});
  REQUIRE(first.has_value());
  CHECK(first->bindings.at("a") == n1);

  auto second = find_first(f.lhs("OneNode"), f.g, {}, {true},
                           [&](const Match& m) { return m.bindings.at("a") != n1; });
  REQUIRE(second.has_value());
  CHECK(second->bindings.at("a") == n2);

  CHECK_FALSE(find_first(f.lhs("OneNode"), f.g, {}, {true},
                         [](const Match&) { return false; })
                  .has_value());

  int seen = 0;
  bool completed = for_each_match(f.lhs("OneNode"), f.g, {}, {true}, [&](const Match&) {
    ++seen;
    return false;
  });
  CHECK_FALSE(completed);
  CHECK(seen == 1);
}

TEST_CASE("random patterns agree with the brute-force oracle in both modes") {
  TransformationSystem sys = parse_system(kSys);
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    InstanceGraph g = random_graph(seed, 6, 8, true, sys.types);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    Pattern p = random_pattern(rng, *sys.types, 3);

    Match partial;
    if (seed % 3 == 0 && !g.objects().empty()) {
      auto it = g.objects().begin();
      std::advance(it, static_cast<long>(rng() % g.objects().size()));
      partial.bindings["z"] = it->first;
    }
    if (seed % 4 == 0) partial.values.emplace("p", Value(std::string("n1")));

    for (bool inj : {true, false}) {
      auto fast = find_matches(p, g, partial, {inj});
      auto slow = brute_matches(p, g, partial, {inj});
      CHECK_MESSAGE(same_match_sets(fast, slow),
                    "seed ", seed, " injective ", inj, ": ", fast.size(), " vs ", slow.size());
    }
  }
}
