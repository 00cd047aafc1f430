#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "natt/driver.hpp"
#include "natt/surface.hpp"

using namespace natt;

namespace {

FileReport run(const std::string& text) {
  return check_text(text, "test.nat", DriverOptions{});
}

bool has_rule(const FileReport& r, const std::string& rule) {
  for (const auto& d : r.diagnostics)
    if (d.rule == rule) return true;
  return false;
}

std::string first_message(const FileReport& r) {
  return r.diagnostics.empty() ? "" : r.diagnostics.front().rule + ": " +
                                          r.diagnostics.front().message;
}

}  // namespace

TEST_CASE("parses and checks a basic file") {
  FileReport r = run(R"(
postulate A : Type ;
def idA : Pi (x : A) , A := fun (x : A) => x ;
check idA : A -> A ;
)");
  CAPTURE(first_message(r));
  CHECK(r.ok());
  CHECK(r.decl_count == 3);
}

TEST_CASE("natural beta via eq declarations") {
  FileReport r = run(R"(
postulate A : Type ;
eq fun (x : A) => dn(up(~x)) == fun (x : A) => ~x : A -> A ;
)");
  CAPTURE(first_message(r));
  CHECK(r.ok());
  REQUIRE(r.equalities.size() == 1);
  CHECK(r.equalities[0].kernel_equal);
}

TEST_CASE("up on a plain variable fails in the kernel") {
  FileReport r = run(R"(
postulate A : Type ;
def bad : A -> %(A) := fun (x : A) => up(x) ;
)");
  CHECK_FALSE(r.ok());
  CHECK(has_rule(r, "natural-intro"));
}

TEST_CASE("plain use of a marked binder fails") {
  FileReport r = run(R"(
postulate A : Type ;
def bad : Pi (~x :: A) , A := fun (~x :: A) => x ;
)");
  CHECK_FALSE(r.ok());
  CHECK(has_rule(r, "var-zero"));
}

TEST_CASE("dull Pi expands to a natural domain") {
  FileReport r = run(R"(
postulate A : Type ;
def duse : Pi (~x :: A) , %(A) := fun (~x :: A) => up(~x) ;
postulate a0 : A ;
check duse up(a0) : %(A) ;
eq duse up(a0) == up(a0) : %(A) ;
)");
  CAPTURE(first_message(r));
  CHECK(r.ok());
  REQUIRE(!r.equalities.empty());
  CHECK(r.equalities.back().kernel_equal);
}

TEST_CASE("dull application wraps dull arguments") {
  FileReport r = run(R"(
postulate A : Type ;
postulate a0 : A ;
def duse : Pi (~x :: A) , %(A) := fun (~x :: A) => up(~x) ;
eq duse a0 == up(a0) : %(A) ;
)");
  CAPTURE(first_message(r));
  CHECK(r.ok());
  CHECK(r.equalities.back().kernel_equal);
}

TEST_CASE("let-flat expands per its defining equation") {
  FileReport r = run(R"(
postulate A : Type ;
eq fun (x : A) => (let up(~u) = up(~x) in up(~u)) == fun (x : A) => up(~x) : A -> %(A) ;
)");
  CAPTURE(first_message(r));
  CHECK(r.ok());
  CHECK(r.equalities.back().kernel_equal);
}

TEST_CASE("shadowed binders are renamed away") {
  FileReport r = run(R"(
postulate A : Type ;
def k : A -> A -> A := fun (x : A) (x : A) => x ;
postulate a0 : A ;
postulate a1 : A ;
eq k a0 a1 == a1 : A ;
)");
  CAPTURE(first_message(r));
  CHECK(r.ok());
  CHECK(r.equalities.back().kernel_equal);
}

TEST_CASE("parse errors carry position and reserved words are rejected") {
  FileReport r = run("def fun : Type := Type ;");
  CHECK_FALSE(r.ok());
  REQUIRE(!r.diagnostics.empty());
  CHECK(r.diagnostics[0].rule == "parse");
  REQUIRE(r.diagnostics[0].span.has_value());
  CHECK(r.diagnostics[0].span->line == 1);

  FileReport r2 = run("def x : Type := ;");
  CHECK(has_rule(r2, "parse"));
}

TEST_CASE("kernel diagnostics on parsed files carry spans") {
  FileReport r = run(R"(
postulate A : Type ;
def bad : A -> A :=
  fun (x : A) => y ;
)");
  CHECK_FALSE(r.ok());
  REQUIRE(!r.diagnostics.empty());
  REQUIRE(r.diagnostics[0].span.has_value());
  CHECK(r.diagnostics[0].span->line == 4);
}

TEST_CASE("errors do not stop later declarations") {
  FileReport r = run(R"(
postulate A : Type ;
def bad : A := tt ;
def fine : Unit := tt ;
check fine : Unit ;
)");
  CHECK(r.decl_count == 4);
  CHECK(r.diagnostics.size() == 1);
  CHECK(r.globals.lookup("fine") != nullptr);
}

TEST_CASE("pretty/parse round trip on file definitions") {
  std::string text = R"(
postulate A : Type ;
postulate B : Type ;
postulate f : A -> B ;
postulate a0 : A ;
def u1 : %(A) := up(~a0) ;
def e1 : A -> B := fun (x : A) => f x ;
def e2 : Pi (g : A -> %(B)) , A -> %(B) := fun (g : A -> %(B)) (y : A) => up(dn(~g ~y)) ;
def p1 : Sig (x : A) , B := (a0 , f a0) ;
def s1 : B := snd p1 ;
def i1 : Id A a0 a0 := refl ;
def n1 : %(A -> A) := up(fun (x : A) => x) ;
)";
  FileReport r = run(text);
  CAPTURE(first_message(r));
  REQUIRE(r.ok());

  // re-elaborate each definition from its pretty-printed body
  DriverOptions opts;
  Checker checker(r.globals, opts.checker);
  Elaborator elab(checker);
  RawContext empty;
  for (const auto& g : r.globals.all()) {
    if (!g.body) continue;
    std::string body_src = "def tmp_rt : " + pretty(g.type) + " := " + pretty(*g.body) + " ;";
    SourceFile sf = parse(body_src, "rt.nat");
    REQUIRE(sf.decls.size() == 1);
    Term ty = elab.check_is_type(empty, sf.decls[0].type);
    Term body = elab.check_term(empty, sf.decls[0].body, ty);
    CAPTURE(g.name);
    CAPTURE(pretty(*g.body));
    CHECK(alpha_eq(ty, g.type));
    CHECK(alpha_eq(body, *g.body));
  }
}

TEST_CASE("normalize definition") {
  FileReport r = run(R"(
postulate A : Type ;
def rt : Pi (x : A) , A := fun (x : A) => dn(up(~x)) ;
)");
  REQUIRE(r.ok());
  auto n = normalize_definition(r, "rt", DriverOptions{});
  REQUIRE(n.has_value());
  CHECK(*n == "fun (x : A) => ~x");
  CHECK_FALSE(normalize_definition(r, "missing", DriverOptions{}).has_value());
}

TEST_CASE("json rendering is schema stable") {
  FileReport r = run("def bad : Unit := missing ;");
  std::string js = render_json(r);
  CHECK(js.find("\"file\"") != std::string::npos);
  CHECK(js.find("\"line\"") != std::string::npos);
  CHECK(js.find("\"col\"") != std::string::npos);
  CHECK(js.find("\"rule\"") != std::string::npos);
  CHECK(js.find("\"message\"") != std::string::npos);
}

TEST_CASE("eq with ill-typed side reports the kernel rule") {
  FileReport r = run(R"(
postulate A : Type ;
eq fun (x : A) => up(x) == fun (x : A) => up(~x) : A -> %(A) ;
)");
  CHECK_FALSE(r.ok());
  CHECK(has_rule(r, "natural-intro"));
}

TEST_CASE("natural keyword is an alias for the percent form") {
  FileReport r = run(R"(
postulate A : Type ;
check fun (x : natural A) => x : natural A -> %(A) ;
)");
  CAPTURE(first_message(r));
  CHECK(r.ok());
}
