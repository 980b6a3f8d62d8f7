#include <doctest.h>

#include <string>
#include <vector>

#include "hengine/casepack.hpp"
#include "hengine/parse.hpp"
#include "hengine/print.hpp"

using namespace hengine;

namespace {

ErrorCode sys_code(const std::string& text, bool expect_position = true) {
  try {
    parse_system(text);
  } catch (const Error& e) {
    if (expect_position) {
      CHECK(e.line() >= 1);
      CHECK(e.column() >= 1);
    }
    return e.code();
  }
  FAIL("expected an Error for: ", text);
  return ErrorCode::IoError;
}

const char* kMini = "metamodel M { class A {} } rule R { create a: A }";

const char* kMiniCanonical =
    "metamodel M {\n"
    "  class A {\n"
    "  }\n"
    "}\n"
    "\n"
    "rule R {\n"
    "  create a: M.A\n"
    "}\n";

}  // namespace

TEST_CASE("a minimal system parses and prints canonically") {
  TransformationSystem sys = parse_system(kMini);
  CHECK(sys.rules.size() == 1);
  CHECK(sys.types->find_metamodel("M") != nullptr);
  CHECK(print_system(sys) == kMiniCanonical);
  // Canonical text is a fixed point of parse-then-print.
  CHECK(print_system(parse_system(kMiniCanonical)) == kMiniCanonical);
}

TEST_CASE("comments and flexible whitespace are accepted") {
  TransformationSystem sys = parse_system(
      "// leading comment\n"
      "metamodel M {\n"
      "  class A { attr x: int }  // trailing\n"
      "}\n"
      "rule R {\n"
      "  create a: M.A { x = 1 + 2 }\n"
      "}\n");
  CHECK(print_system(sys) ==
        "metamodel M {\n"
        "  class A {\n"
        "    attr x: int\n"
        "  }\n"
        "}\n"
        "\n"
        "rule R {\n"
        "  create a: M.A { x = 1 + 2 }\n"
        "}\n");
}

TEST_CASE("every bundled asset reprints to a fixed point") {
  for (const TaskInfo& t : tasks()) {
    std::string dir = cases_root() + "/" + t.dir;
    std::string sys_text = read_text_file(dir + "/system.gts");
    TransformationSystem sys = parse_system(sys_text);
    std::string once = print_system(sys);
    CHECK_MESSAGE(print_system(parse_system(once)) == once, t.dir, "/system.gts");

    std::string model_text = read_text_file(dir + "/input.gim");
    std::string printed = print_model(parse_model(model_text, sys.types));
    CHECK_MESSAGE(print_model(parse_model(printed, sys.types)) == printed, t.dir, "/input.gim");
  }
}

TEST_CASE("an empty graph prints as an empty model body") {
  TransformationSystem sys = parse_system(kMini);
  InstanceGraph g(sys.types);
  CHECK(print_model(g) == "model {\n}\n");
  InstanceGraph back = parse_model("model {\n}\n", sys.types);
  CHECK(back.objects().empty());
}

TEST_CASE("models renumber objects densely and list used metamodels") {
  TransformationSystem sys = parse_system(
      "metamodel M { class A { attr x: int } }\n"
      "metamodel O { class B {} }\n");
  InstanceGraph g = parse_model(
      "model uses M, O {\n"
      "  object #5: M.A { x = 3 }\n"
      "  object #9: O.B\n"
      "}\n",
      sys.types);
  CHECK(print_model(g) ==
        "model uses M, O {\n"
        "  object #1: M.A { x = 3 }\n"
        "  object #2: O.B\n"
        "}\n");

  // An int literal fills a float attribute by widening; bools and strings work.
  TransformationSystem sys2 = parse_system(
      "metamodel M { class A { attr f: float attr b: bool attr s: string } }");
  InstanceGraph g2 = parse_model("model { object #1: M.A { f = 2, b = true, s = \"q\\\"q\" } }",
                                 sys2.types);
  CHECK(print_model(g2) ==
        "model uses M {\n"
        "  object #1: M.A { b = true, f = 2.0, s = \"q\\\"q\" }\n"
        "}\n");
}

TEST_CASE("model files resolve names strictly but defer structure to conforms") {
  TransformationSystem sys = parse_system(
      "metamodel M {\n"
      "  class A { attr x: int  ref one_b: one B }\n"
      "  class B {}\n"
      "}\n");

  auto model_code = [&](const std::string& text, bool expect_position = true) {
    try {
      parse_model(text, sys.types);
    } catch (const Error& e) {
      if (expect_position) CHECK(e.line() >= 1);
      return e.code();
    }
    FAIL("expected an Error for: ", text);
    return ErrorCode::IoError;
  };

  CHECK(model_code("model { object #1: M.Nope }") == ErrorCode::UnknownClass);
  CHECK(model_code("model { object #1: M.A { y = 1 } }") == ErrorCode::ResolutionError);
  CHECK(model_code("model {\n  object #1: M.A\n  object #1: M.B\n}") ==
        ErrorCode::ResolutionError);
  CHECK(model_code("model {\n  object #1: M.A\n  link #1 -nope-> #1\n}") ==
        ErrorCode::ResolutionError);
  CHECK(model_code("model {\n  object #1: M.A\n  link #1 -one_b-> #7\n}") ==
        ErrorCode::ResolutionError);
  CHECK(model_code("model uses Ghost {\n}") == ErrorCode::ResolutionError);

  // Structural problems parse; they surface as violations or one error.
  // A type-mismatched literal is structural, not a name problem.
  std::vector<Violation> tvs;
  parse_model("model { object #1: M.A { x = \"s\" } }", sys.types, &tvs);
  REQUIRE(tvs.size() == 1);
  CHECK(tvs[0].kind == ViolationKind::BadAttributeType);
  CHECK(model_code("model { object #1: M.A { x = \"s\" } }", false) ==
        ErrorCode::ConformanceError);

  const char* doubled =
      "model {\n"
      "  object #1: M.A\n"
      "  object #2: M.B\n"
      "  object #3: M.B\n"
      "  link #1 -one_b-> #2\n"
      "  link #1 -one_b-> #3\n"
      "}";
  std::vector<Violation> vs;
  InstanceGraph g = parse_model(doubled, sys.types, &vs);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].kind == ViolationKind::Multiplicity);
  CHECK(g.objects().size() == 3);

  CHECK(model_code(doubled, false) == ErrorCode::ConformanceError);
}

TEST_CASE("system-level mistakes are reported with their kind") {
  CHECK(sys_code("metamodel M { class A {") == ErrorCode::SyntaxError);
  CHECK(sys_code("metamodel M { class A {} } rule R { create a: Nope }") ==
        ErrorCode::UnknownClass);
  CHECK(sys_code("metamodel trace { class T {} }") == ErrorCode::ResolutionError);
  CHECK(sys_code("metamodel M { class A { attr x: int attr x: int } }") ==
        ErrorCode::ResolutionError);
  CHECK(sys_code("metamodel M { class A { ref r: one Ghost } }", false) ==
        ErrorCode::ResolutionError);
  CHECK(sys_code("metamodel M { class A {} class B {} }\n"
                 "metamodel O { class B {} }\n"
                 "rule R { create b: B }") == ErrorCode::AmbiguousClass);

  const char* base = "metamodel M { class A { attr x: int } class B {} }\n";
  auto with = [&](const std::string& more) { return base + more; };

  CHECK(sys_code(with("rule R { preserve a: A preserve a: B }")) == ErrorCode::ResolutionError);
  CHECK(sys_code(with("rule R { preserve a: A { y = 1 } }")) == ErrorCode::ResolutionError);
  CHECK(sys_code(with("rule R { delete a: A { x := 1 } }")) == ErrorCode::ResolutionError);
  CHECK(sys_code(with("rule R { preserve x -r-> x }")) == ErrorCode::ResolutionError);
  CHECK(sys_code(with("rule R { create a: A  delete a -r-> a }")) ==
        ErrorCode::ResolutionError);
  CHECK(sys_code(with("rule R { create a: A  preserve a -r-> a }")) ==
        ErrorCode::ResolutionError);
  CHECK(sys_code(with("rule R { preserve a: A }\nunit R = sequential [R]"), false) ==
        ErrorCode::ResolutionError);
  CHECK(sys_code(with("unit U = sequential [Ghost]"), false) == ErrorCode::ResolutionError);
  CHECK(sys_code(with("unit U = sequential [V]\nunit V = sequential [U]"), false) ==
        ErrorCode::ResolutionError);
  CHECK(sys_code(with("unit U = counted(-2) [U]")) == ErrorCode::SyntaxError);
  CHECK(sys_code(with("rule R { preserve a: A }\n"
                      "unit U = sequential [R] { param p: in  map U.p -> R.ghost }"),
                 false) == ErrorCode::ResolutionError);
  CHECK(sys_code(with("rule R { param p: out create a: A }\n"
                      "unit U = sequential [R] { param q: in  map R.p -> U.q }"),
                 false) == ErrorCode::ResolutionError);
}

TEST_CASE("amalgamation declarations are validated against their rules") {
  const char* base =
      "metamodel M { class A { attr x: int } class B {} }\n"
      "rule K { preserve n: M.A  delete d: M.B  create c: M.A }\n";
  auto with = [&](const std::string& multi, const std::string& unit) {
    return base + multi + "\n" + unit;
  };

  CHECK(sys_code(with("rule W { preserve n: M.B }",
                      "unit U = amalgamation kernel K multis [W]"),
                 false) == ErrorCode::ResolutionError);  // shared var class differs
  CHECK(sys_code(with("rule W { delete n: M.A }",
                      "unit U = amalgamation kernel K multis [W]"),
                 false) == ErrorCode::ResolutionError);  // deletes kernel-preserved
  CHECK(sys_code(with("rule W { create n: M.A }",
                      "unit U = amalgamation kernel K multis [W]"),
                 false) == ErrorCode::ResolutionError);  // re-creates kernel-matched
  CHECK(sys_code(with("rule W { create c: M.B }",
                      "unit U = amalgamation kernel K multis [W]"),
                 false) == ErrorCode::ResolutionError);  // shared creation class differs
  CHECK(sys_code(with("rule W { preserve w: M.A }",
                      "unit U = amalgamation kernel K multis [Ghost]"),
                 false) == ErrorCode::ResolutionError);
  CHECK(sys_code(with("rule W { preserve w: M.A }\nunit V = sequential [W]",
                      "unit U = amalgamation kernel K multis [V]"),
                 false) == ErrorCode::ResolutionError);  // multi must be a rule

  // The benign shapes parse: a shared preserved var, and a shared created
  // var (bound once, so every multi links to the same fresh object).
  CHECK_NOTHROW(parse_system(with("rule W { preserve n: M.A  create t: trace.Trace }",
                                  "unit U = amalgamation kernel K multis [W]")));
  CHECK_NOTHROW(parse_system(with("rule W { create c: M.A }",
                                  "unit U = amalgamation kernel K multis [W]")));
}

TEST_CASE("condition clauses print back with minimal parentheses") {
  const char* text =
      "metamodel M { class A {} }\n"
      "rule R {\n"
      "  preserve n: M.A\n"
      "  forbid(p) a: M.A\n"
      "  forbid(q) b: M.A\n"
      "  forbid(r) c: M.A\n"
      "  condition = !p & (q | !r)\n"
      "}\n";
  TransformationSystem sys = parse_system(text);
  const Rule* r = sys.find_rule("R");
  REQUIRE(r != nullptr);
  CHECK(r->explicit_condition);
  CHECK(print_formula(*r->condition) == "!p & (q | !r)");

  std::string once = print_system(sys);
  CHECK(print_system(parse_system(once)) == once);

  SUBCASE("associativity needs no parentheses, grouping does") {
    TransformationSystem s2 = parse_system(
        "metamodel M { class A {} }\n"
        "rule R {\n"
        "  preserve n: M.A\n"
        "  forbid(p) a: M.A\n"
        "  forbid(q) b: M.A\n"
        "  forbid(r) c: M.A\n"
        "  condition = (p & q) & r\n"
        "}\n");
    CHECK(print_formula(*s2.find_rule("R")->condition) == "p & q & r");
  }
}

TEST_CASE("without a condition clause the groups conjoin with their polarity") {
  TransformationSystem sys = parse_system(
      "metamodel M { class A {} }\n"
      "rule R {\n"
      "  preserve n: M.A\n"
      "  forbid(no) a: M.A\n"
      "  require(yes) b: M.A\n"
      "}\n");
  const Rule* r = sys.find_rule("R");
  REQUIRE(r->condition != nullptr);
  CHECK_FALSE(r->explicit_condition);
  CHECK(print_formula(*r->condition) == "!no & yes");
  // The implied formula is not printed back.
  CHECK(print_system(sys).find("condition") == std::string::npos);
}

TEST_CASE("unit headers and bodies round-trip") {
  const char* text =
      "metamodel M { class A {} }\n"
      "rule R { create a: M.A }\n"
      "rule S { delete a: M.A }\n"
      "unit U = conditional if R then S else R\n"
      "unit V = independent [R, S]\n"
      "unit W = counted(3) [U]\n";
  std::string once = print_system(parse_system(text));
  CHECK(once.find("unit U = conditional if R then S else R\n") != std::string::npos);
  CHECK(once.find("unit V = independent [R, S]\n") != std::string::npos);
  CHECK(once.find("unit W = counted(3) [U]\n") != std::string::npos);
  CHECK(print_system(parse_system(once)) == once);
}
