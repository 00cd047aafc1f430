#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "natt/term.hpp"

using namespace natt;

namespace {

Term fn_type(Term a, Term b) { return tm::pi("_x", a, b); }

}  // namespace

TEST_CASE("zeroing marks plain uses of scope variables") {
  // (f x)^{0{f}} = ~f x, with x outside the zeroed prefix
  Term t = tm::app(tm::var("f"), tm::var("x"), tm::var("A"), "y", tm::var("B"));
  Term z = zero_term(t, {"f"});
  const auto* a = z.as<App>();
  REQUIRE(a != nullptr);
  CHECK(a->fn.is<MarkedVar>());
  CHECK(a->arg.is<Var>());
}

TEST_CASE("zeroing does not touch bound variables") {
  // (lam x:A. f x)^{0{f,x}} : the binder shadows x
  Term body = tm::app(tm::var("f"), tm::var("x"), tm::var("A"), "y", tm::var("B"));
  Term t = tm::lam("x", tm::var("A"), body, tm::var("B"));
  Term z = zero_term(t, {"f", "x"});
  const auto* l = z.as<Lam>();
  REQUIRE(l != nullptr);
  const auto* a = l->body.as<App>();
  REQUIRE(a != nullptr);
  CHECK(a->fn.is<MarkedVar>());
  CHECK(a->arg.is<Var>());  // bound x stays plain
}

TEST_CASE("zeroing fixes marked uses") {
  Term t = tm::marked("x");
  CHECK(alpha_eq(zero_term(t, {"x"}), t));
}

TEST_CASE("zeroing over the empty scope is the identity") {
  Term t = tm::lam("x", tm::var("A"),
                   tm::app(tm::var("f"), tm::marked("x"), tm::var("A"), "y", tm::var("B")),
                   tm::var("B"));
  CHECK(alpha_eq(zero_term(t, {}), t));
}

TEST_CASE("zero_context marks everything and zeroes plain types") {
  RawContext ctx = {{"x", false, tm::var("A")},
                    {"y", true, tm::var("B")},
                    {"z", false, tm::app(tm::var("F"), tm::var("x"), tm::var("A"), "v",
                                         tm::univ())}};
  RawContext zc = zero_context(ctx);
  REQUIRE(zc.size() == 3);
  CHECK(zc[0].marked);
  CHECK(zc[1].marked);
  CHECK(zc[2].marked);
  CHECK(alpha_eq(zc[1].type, tm::var("B")));  // marked entry untouched
  const auto* a = zc[2].type.as<App>();
  REQUIRE(a != nullptr);
  CHECK(a->arg.is<MarkedVar>());  // x marked inside z's type
}

TEST_CASE("zero_context is idempotent") {
  RawContext ctx = {{"x", false, tm::var("A")},
                    {"y", true, tm::var("B")},
                    {"w", false, tm::id(tm::var("A"), tm::var("x"), tm::var("x"))}};
  CHECK(alpha_eq_context(zero_context(zero_context(ctx)), zero_context(ctx)));
}

TEST_CASE("telescope zeroing preserves marks") {
  Telescope tele = {{"x", false, tm::app(tm::var("F"), tm::var("g"), tm::var("A"), "v",
                                         tm::univ())},
                    {"y", true, tm::var("A")}};
  Telescope z = zero_telescope(tele, {"g"});
  CHECK_FALSE(z[0].marked);
  const auto* a = z[0].type.as<App>();
  REQUIRE(a != nullptr);
  CHECK(a->arg.is<MarkedVar>());
  CHECK(z[1].marked);
  CHECK(alpha_eq(z[1].type, tm::var("A")));
}

TEST_CASE("substitution replaces marked occurrences by the zeroed term") {
  // (~x)[f y/x] = ~f ~y
  Term repl = tm::app(tm::var("f"), tm::var("y"), tm::var("A"), "v", tm::var("B"));
  Term out = substitute(tm::marked("x"), repl, "x");
  const auto* a = out.as<App>();
  REQUIRE(a != nullptr);
  CHECK(a->fn.is<MarkedVar>());
  CHECK(a->arg.is<MarkedVar>());
}

TEST_CASE("substitution leaves other marked variables alone") {
  Term out = substitute(tm::marked("y"), tm::var("a"), "x");
  CHECK(alpha_eq(out, tm::marked("y")));
}

TEST_CASE("plain substitution is ordinary") {
  Term out = substitute(tm::var("x"), tm::tt(), "x");
  CHECK(out.is<TtTerm>());
}

TEST_CASE("substitution avoids capture") {
  // (lam y:A. x)[y/x] must not capture the free y
  Term body = tm::lam("y", tm::var("A"), tm::var("x"), tm::var("A"));
  Term out = substitute(body, tm::var("y"), "x");
  const auto* l = out.as<Lam>();
  REQUIRE(l != nullptr);
  CHECK(l->var != "y");
  CHECK(l->body.is<Var>());
  CHECK(l->body.as<Var>()->name == "y");
}

TEST_CASE("substitution stops at shadowing binders") {
  Term body = tm::lam("x", tm::var("A"), tm::var("x"), tm::var("A"));
  Term out = substitute(body, tm::tt(), "x");
  CHECK(alpha_eq(out, body));
}

TEST_CASE("alpha equivalence") {
  Term a = tm::lam("x", tm::var("A"), tm::var("x"), tm::var("A"));
  Term b = tm::lam("y", tm::var("A"), tm::var("y"), tm::var("A"));
  CHECK(alpha_eq(a, b));
  CHECK_FALSE(alpha_eq(tm::marked("x"), tm::var("x")));
  CHECK(alpha_eq(tm::nat(a), tm::nat(b)));
  // marked uses of bound variables rename too
  Term ma = tm::lam("x", tm::var("A"), tm::marked("x"), tm::var("A"));
  Term mb = tm::lam("z", tm::var("A"), tm::marked("z"), tm::var("A"));
  CHECK(alpha_eq(ma, mb));
  // bound against free with the same spelling differs
  Term free_use = tm::lam("w", tm::var("A"), tm::var("x"), tm::var("A"));
  CHECK_FALSE(alpha_eq(a, free_use));
}

TEST_CASE("zeroing idempotence on terms") {
  Term t = tm::app(tm::var("f"), tm::app(tm::var("g"), tm::var("x"), tm::var("A"), "v",
                                         tm::var("B")),
                   tm::var("B"), "w", tm::var("C"));
  NameSet small = {"f"};
  NameSet big = {"f", "g", "x"};
  CHECK(alpha_eq(zero_term(zero_term(t, small), big), zero_term(t, big)));
  CHECK(alpha_eq(zero_term(zero_term(t, big), small), zero_term(t, big)));
}

TEST_CASE("free variables include marked uses") {
  Term t = tm::app(tm::marked("f"), tm::var("x"), tm::var("A"), "y", tm::var("B"));
  NameSet fv = free_vars(t);
  CHECK(fv.count("f"));
  CHECK(fv.count("x"));
  CHECK(fv.count("A"));
  CHECK(fv.count("B"));
  CHECK_FALSE(fv.count("y"));
}

TEST_CASE("fresh names avoid the given set") {
  CHECK(fresh_name("x", {}) == "x");
  CHECK(fresh_name("x", {"x"}) == "x1");
  CHECK(fresh_name("x1", {"x1"}) == "x2");
  CHECK(fresh_name("x", {"x", "x1"}) == "x2");
}

TEST_CASE("context splitting lemma on a hand example") {
  // zc(Psi, Gamma, Delta) = zc(Psi, zc(Gamma), Delta^{0Gamma})
  RawContext psi = {{"p", false, tm::unit()}};
  Telescope gamma = {{"x", false, tm::pb()}};
  Telescope delta = {{"y", false, tm::id(tm::pb(), tm::var("x"), tm::var("x"))}};

  RawContext whole = psi;
  whole.insert(whole.end(), gamma.begin(), gamma.end());
  whole.insert(whole.end(), delta.begin(), delta.end());

  RawContext rhs = psi;
  Telescope zg = zero_telescope_all(gamma, domain(psi));
  rhs.insert(rhs.end(), zg.begin(), zg.end());
  Telescope zd = zero_telescope(delta, {"x"});
  rhs.insert(rhs.end(), zd.begin(), zd.end());

  CHECK(alpha_eq_context(zero_context(whole), zero_context(rhs)));
}
