#include <doctest.h>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hengine/apply.hpp"
#include "hengine/parse.hpp"
#include "hengine/print.hpp"

using namespace hengine;

namespace {

const char* kSys = R"(
metamodel m {
  class N {
    attr name: string
    attr num: int
  }
  class E {
    ref src: one N
    ref trg: one N
  }
}

rule MakeNode {
  param result: out
  create result: m.N { name = "made" }
}

rule Fetch {
  param who: inout
  preserve n: m.N { name = who }
}

rule Rename {
  param to: in
  preserve n: m.N { name := to }
}

rule Bump {
  preserve n: m.N { num := n.num + 1 }
}

rule DeleteAny {
  delete n: m.N
}

rule DeletePinned {
  param n: in
  delete n: m.N
}

rule CopyDeleted {
  delete n: m.N
  create c: m.N { name = n.name + "'" }
}

rule Broken {
  create x: m.N { num = 1 / 0 }
}

rule KeepAndKill {
  preserve a: m.N
  delete b: m.N
}

rule Rewire {
  preserve e: m.E
  preserve a: m.N
  preserve b: m.N
  delete e -src-> a
  create e -src-> b
}

rule PickHub {
  preserve h: m.N { name = "hub" }
}

rule MarkSpoke {
  preserve h: m.N { name = "hub" }
  preserve e: m.E
  preserve s: m.N
  preserve e -src-> h
  preserve e -trg-> s
  create t: trace.Trace
  create t -target-> s
}

rule KillHub {
  delete n: m.N { name = "hub" }
}

rule CutIn {
  preserve n: m.N { name = "hub" }
  preserve e: m.E
  delete e -trg-> n
}

rule CutOut {
  preserve n: m.N { name = "hub" }
  preserve e: m.E
  delete e -src-> n
}

rule SharedBadge {
  create badge: trace.Trace
}

rule WearBadge {
  preserve s: m.N
  create badge: trace.Trace
  create badge -target-> s
}
)";

struct Fixture {
  TransformationSystem sys = parse_system(kSys);
  InstanceGraph g{sys.types};

  const Rule& rule(const char* name) const { return *sys.find_rule(name); }

  ObjectId node(const std::string& name) {
    ObjectId id = g.create_object("m.N");
    g.set_attribute(id, "name", Value(name));
    return id;
  }
  ObjectId edge(std::optional<ObjectId> src, std::optional<ObjectId> trg) {
    ObjectId id = g.create_object("m.E");
    if (src) g.add_link(id, "src", *src);
    if (trg) g.add_link(id, "trg", *trg);
    return id;
  }
  std::size_t count_class(const char* qualified) const {
    const ClassDef* cls = sys.types->resolve_class(qualified);
    std::size_t n = 0;
    for (const auto& [id, obj] : g.objects()) {
      if (obj.cls == cls) ++n;
    }
    return n;
  }

  ApplyOutcome apply(const char* name, const std::map<std::string, ParamValue>& pre = {},
                     bool injective = true,
                     DeleteMode dangling = DeleteMode::ForbidDangling) {
    return apply_rule(rule(name), g, pre, {injective}, dangling);
  }
};

}  // namespace

TEST_CASE("creation binds out parameters to the fresh objects") {
  Fixture f;
  ApplyOutcome out = f.apply("MakeNode");
  REQUIRE(out.success);
  CHECK(out.edits == 2);  // one object, one attribute assignment

  ObjectId made = std::get<ObjectId>(out.out_values.at("result"));
  CHECK(std::get<std::string>(f.g.attribute(made, "name")) == "made");
  CHECK(std::get<std::int64_t>(f.g.attribute(made, "num")) == 0);
  CHECK(param_value_text(out.out_values.at("result"), f.g) == "<object N#1>");
}

TEST_CASE("bare inout parameters fetch from the match and flow out") {
  Fixture f;
  f.node("x");
  f.node("y");

  ApplyOutcome out = f.apply("Fetch");
  REQUIRE(out.success);
  CHECK(std::get<std::string>(std::get<Value>(out.out_values.at("who"))) == "x");

  ApplyOutcome forced = f.apply("Fetch", {{"who", Value(std::string("y"))}});
  REQUIRE(forced.success);
  CHECK(std::get<std::string>(std::get<Value>(forced.out_values.at("who"))) == "y");

  CHECK_FALSE(f.apply("Fetch", {{"who", Value(std::string("missing"))}}).success);
}

TEST_CASE("assignments rewrite preserved objects; in parameters stay private") {
  Fixture f;
  ObjectId n = f.node("old");
  ApplyOutcome out = f.apply("Rename", {{"to", Value(std::string("new"))}});
  REQUIRE(out.success);
  CHECK(out.out_values.empty());
  CHECK(std::get<std::string>(f.g.attribute(n, "name")) == "new");

  f.apply("Bump");
  f.apply("Bump");
  CHECK(std::get<std::int64_t>(f.g.attribute(n, "num")) == 2);
}

TEST_CASE("an unbound in parameter surfaces as an error and reverts") {
  Fixture f;
  f.node("x");
  std::string before = print_model(f.g);
  CHECK_THROWS_AS(f.apply("Rename"), Error);
  CHECK(print_model(f.g) == before);
}

TEST_CASE("expression faults during the rewrite revert the application") {
  Fixture f;
  f.node("x");
  std::string before = print_model(f.g);
  std::size_t edits = f.g.edit_count();
  try {
    f.apply("Broken");
    FAIL("expected a division error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivisionByZero);
  }
  CHECK(print_model(f.g) == before);
  CHECK(f.g.edit_count() == edits);
}

TEST_CASE("no viable match is plain failure, graph untouched") {
  Fixture f;
  std::string before = print_model(f.g);
  ApplyOutcome out = f.apply("DeleteAny");
  CHECK_FALSE(out.success);
  CHECK(out.edits == 0);
  CHECK(print_model(f.g) == before);
}

TEST_CASE("forbid-dangling skips matches whose deletion would orphan links") {
  Fixture f;
  ObjectId n1 = f.node("linked");
  ObjectId n2 = f.node("free");
  ObjectId e = f.edge(n1, n1);

  SUBCASE("the first bindable match is not necessarily the applied one") {
    auto m = applicable(f.rule("DeleteAny"), f.g, {}, {true}, DeleteMode::ForbidDangling);
    REQUIRE(m.has_value());
    CHECK(m->bindings.at("n") == n2);

    ApplyOutcome out = f.apply("DeleteAny");
    REQUIRE(out.success);
    CHECK(f.g.has_object(n1));
    CHECK_FALSE(f.g.has_object(n2));
  }
  SUBCASE("cascade mode deletes the first match with its links") {
    ApplyOutcome out = f.apply("DeleteAny", {}, true, DeleteMode::CascadeLinks);
    REQUIRE(out.success);
    CHECK_FALSE(f.g.has_object(n1));
    CHECK(f.g.has_object(n2));
    CHECK(f.g.has_object(e));
    CHECK(f.g.links().empty());
  }
  SUBCASE("once every node is linked, forbid mode finds nothing") {
    f.g.delete_object(n2, DeleteMode::CascadeLinks);
    CHECK_FALSE(f.apply("DeleteAny").success);
  }
}

TEST_CASE("an object parameter pins the match to one object") {
  Fixture f;
  f.node("a");
  ObjectId n2 = f.node("b");

  ApplyOutcome out = f.apply("DeletePinned", {{"n", ParamValue(n2)}});
  REQUIRE(out.success);
  CHECK_FALSE(f.g.has_object(n2));
  CHECK(f.count_class("m.N") == 1);
}

TEST_CASE("parameter seeding rejects shape mismatches up front") {
  Fixture f;
  f.node("a");
  auto code = [&](const std::function<void()>& go) {
    try {
      go();
    } catch (const Error& e) {
      return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::IoError;
  };
  CHECK(code([&] { f.apply("DeletePinned", {{"n", Value(std::string("a"))}}); }) ==
        ErrorCode::ParameterTypeMismatch);
  CHECK(code([&] { f.apply("MakeNode", {{"result", ParamValue(ObjectId{1})}}); }) ==
        ErrorCode::ParameterDirection);
  CHECK(code([&] { f.apply("Fetch", {{"bogus", Value(std::string("x"))}}); }) ==
        ErrorCode::UnknownParameter);
}

TEST_CASE("deleted objects keep their former attributes for the rewrite") {
  Fixture f;
  f.node("z");
  ApplyOutcome out = f.apply("CopyDeleted");
  REQUIRE(out.success);
  REQUIRE(f.count_class("m.N") == 1);
  for (const auto& [id, obj] : f.g.objects()) {
    CHECK(std::get<std::string>(obj.attrs.at("name")) == "z'");
  }
}

TEST_CASE("identification condition: no deleting through a preserved alias") {
  Fixture f;
  ObjectId solo = f.node("solo");

  CHECK_FALSE(f.apply("KeepAndKill", {}, false).success);
  CHECK(f.g.has_object(solo));
  CHECK_FALSE(f.apply("KeepAndKill", {}, true).success);

  ObjectId other = f.node("other");
  ApplyOutcome out = f.apply("KeepAndKill", {}, false);
  REQUIRE(out.success);
  CHECK(f.g.has_object(solo));
  CHECK_FALSE(f.g.has_object(other));
}

TEST_CASE("link rewiring deletes and creates edges on preserved objects") {
  Fixture f;
  ObjectId a = f.node("a");
  ObjectId b = f.node("b");
  ObjectId e = f.edge(a, a);

  ApplyOutcome out = f.apply("Rewire");
  REQUIRE(out.success);
  CHECK(f.g.has_link(e, "src", b));
  CHECK_FALSE(f.g.has_link(e, "src", a));
  CHECK(f.g.has_link(e, "trg", a));
}

TEST_CASE("amalgamation applies every instance of every multi-rule at once") {
  Fixture f;
  ObjectId hub = f.node("hub");
  ObjectId s1 = f.node("s1");
  ObjectId s2 = f.node("s2");
  ObjectId s3 = f.node("s3");
  f.edge(hub, s1);
  f.edge(hub, s2);
  f.edge(hub, s3);

  const Rule& spoke = f.rule("MarkSpoke");
  ApplyOutcome out =
      apply_amalgamated(f.rule("PickHub"), {&spoke}, f.g, {}, {true}, DeleteMode::ForbidDangling);
  REQUIRE(out.success);
  CHECK(f.count_class("trace.Trace") == 3);
  for (ObjectId s : {s1, s2, s3}) {
    CHECK(f.g.link_sources("target", s).size() == 1);
  }
}

TEST_CASE("zero multi-instances is success, a missing kernel is failure") {
  Fixture f;
  const Rule& spoke = f.rule("MarkSpoke");

  std::string before = print_model(f.g);
  ApplyOutcome none =
      apply_amalgamated(f.rule("PickHub"), {&spoke}, f.g, {}, {true}, DeleteMode::ForbidDangling);
  CHECK_FALSE(none.success);
  CHECK(print_model(f.g) == before);

  f.node("hub");
  ApplyOutcome bare =
      apply_amalgamated(f.rule("PickHub"), {&spoke}, f.g, {}, {true}, DeleteMode::ForbidDangling);
  CHECK(bare.success);
  CHECK(f.count_class("trace.Trace") == 0);
}

TEST_CASE("kernel deletion is viable only with every multi cut applied") {
  Fixture f;
  ObjectId hub = f.node("hub");
  ObjectId a = f.node("a");
  ObjectId b = f.node("b");
  ObjectId e1 = f.edge(a, hub);   // e1 -trg-> hub
  ObjectId e2 = f.edge(hub, b);   // e2 -src-> hub
  std::string before = print_model(f.g);

  const Rule& cut_in = f.rule("CutIn");
  const Rule& cut_out = f.rule("CutOut");

  ApplyOutcome partial = apply_amalgamated(f.rule("KillHub"), {&cut_in}, f.g, {}, {true},
                                           DeleteMode::ForbidDangling);
  CHECK_FALSE(partial.success);
  CHECK(print_model(f.g) == before);

  ApplyOutcome full = apply_amalgamated(f.rule("KillHub"), {&cut_in, &cut_out}, f.g, {}, {true},
                                        DeleteMode::ForbidDangling);
  REQUIRE(full.success);
  CHECK_FALSE(f.g.has_object(hub));
  CHECK(f.count_class("m.N") == 2);
  // Only the hub-side links were cut; the far ends keep theirs.
  CHECK(f.g.links() == std::vector<Link>{{e1, "src", a}, {e2, "trg", b}});
  CHECK(f.g.conforms().empty());
}

TEST_CASE("the first kernel match whose combined deletion is viable wins") {
  Fixture f;
  ObjectId h1 = f.node("hub");
  ObjectId h2 = f.node("hub");
  f.edge(h1, f.node("x"));  // outgoing src link that CutIn never removes

  const Rule& cut_in = f.rule("CutIn");
  ApplyOutcome out = apply_amalgamated(f.rule("KillHub"), {&cut_in}, f.g, {}, {true},
                                       DeleteMode::ForbidDangling);
  REQUIRE(out.success);
  CHECK(f.g.has_object(h1));
  CHECK_FALSE(f.g.has_object(h2));
}

TEST_CASE("a created variable shared with the kernel is created once") {
  Fixture f;
  f.node("p");
  f.node("q");

  const Rule& wear = f.rule("WearBadge");
  ApplyOutcome out = apply_amalgamated(f.rule("SharedBadge"), {&wear}, f.g, {}, {true},
                                       DeleteMode::ForbidDangling);
  REQUIRE(out.success);
  CHECK(f.count_class("trace.Trace") == 1);
  for (const auto& [id, obj] : f.g.objects()) {
    if (obj.cls == f.sys.types->trace_class()) {
      CHECK(f.g.link_targets(id, "target").size() == 2);
    }
  }
}
