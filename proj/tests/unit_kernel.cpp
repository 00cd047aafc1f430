#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "natt/kernel.hpp"

using namespace natt;

namespace {

struct Fixture {
  Globals globals;
  Checker checker{globals};

  Fixture() {
    globals.add({"A", tm::univ(), std::nullopt});
    globals.add({"B", tm::univ(), std::nullopt});
    globals.add({"a0", tm::var("A"), std::nullopt});
  }
};

Term arrow(Term a, Term b) { return tm::pi("_x", a, b); }

}  // namespace

TEST_CASE("contexts: marked entry types live in the zeroed prefix") {
  Fixture f;
  // (X : Type, ~x :: X) is fine: X is usable marked in the zeroed prefix
  RawContext ctx = {{"X", false, tm::univ()}, {"x", true, tm::marked("X")}};
  CHECK_NOTHROW(f.checker.check_context(ctx));

  // (X : Type, ~x :: X-used-plain) must fail: in zc(X : Type) only ~X exists
  RawContext bad = {{"X", false, tm::univ()}, {"x", true, tm::var("X")}};
  CHECK_THROWS_AS(f.checker.check_context(bad), TypeError);

  RawContext dup = {{"x", false, tm::var("A")}, {"x", false, tm::var("A")}};
  CHECK_THROWS_AS(f.checker.check_context(dup), TypeError);
}

TEST_CASE("variables: plain, var-zero, var-roundtrip") {
  Fixture f;
  RawContext env = {{"x", false, tm::var("A")}};
  CHECK(alpha_eq(f.checker.infer(env, tm::var("x")), tm::var("A")));

  RawContext menv = {{"x", true, tm::var("A")}};
  CHECK(alpha_eq(f.checker.infer(menv, tm::marked("x")), tm::var("A")));
  CHECK_THROWS_WITH_AS(f.checker.infer(menv, tm::var("x")),
                       doctest::Contains("var-zero"), TypeError);

  // env = (g : A -> Type, x : g a0): ~x has type with g marked
  RawContext renv = {{"g", false, arrow(tm::var("A"), tm::univ())},
                     {"x", false, tm::app(tm::var("g"), tm::var("a0"), tm::var("A"), "_y",
                                          tm::univ())}};
  Term t = f.checker.infer(renv, tm::marked("x"));
  const auto* app = t.as<App>();
  REQUIRE(app != nullptr);
  CHECK(app->fn.is<MarkedVar>());
}

TEST_CASE("natural formation requires a dull body") {
  Fixture f;
  RawContext env = {{"x", false, tm::univ()}};
  CHECK_NOTHROW(f.checker.check_type(env, tm::nat(tm::marked("x"))));
  CHECK_THROWS_AS(f.checker.check_type(env, tm::nat(tm::var("x"))), TypeError);
}

TEST_CASE("natural intro and elim") {
  Fixture f;
  RawContext env = {{"x", true, tm::var("A")}};
  // ~x^nat : %(A)
  Term intro = tm::up(tm::marked("x"), tm::var("A"));
  CHECK(alpha_eq(f.checker.infer(env, intro), tm::nat(tm::var("A"))));

  // plain use under intro is rejected
  RawContext penv = {{"x", false, tm::var("A")}};
  CHECK_THROWS_WITH_AS(f.checker.infer(penv, tm::up(tm::var("x"), tm::var("A"))),
                       doctest::Contains("natural-intro"), TypeError);

  // composite (x : A) |- ((~x)^nat)_nat : zA
  Term composite = tm::dn(tm::up(tm::marked("x"), tm::var("A")), tm::var("A"));
  CHECK(alpha_eq(f.checker.infer(penv, composite), tm::var("A")));
}

TEST_CASE("whnf computes the natural beta rule") {
  Fixture f;
  Term t = tm::dn(tm::up(tm::marked("x"), tm::var("A")), tm::var("A"));
  CHECK(alpha_eq(f.checker.whnf(t), tm::marked("x")));

  Term lam = tm::lam("x", tm::var("A"), tm::var("x"), tm::var("A"));
  Term app = tm::app(lam, tm::var("a0"), tm::var("A"), "x", tm::var("A"));
  CHECK(alpha_eq(f.checker.whnf(app), tm::var("a0")));

  // neutral application is stuck
  RawContext env = {{"f", false, arrow(tm::var("A"), tm::var("A"))}};
  Term stuck = tm::app(tm::marked("f"), tm::var("a0"), tm::var("A"), "_y", tm::var("A"));
  CHECK(alpha_eq(f.checker.whnf(stuck), stuck));
}

TEST_CASE("conversion: beta and eta for the natural type") {
  Fixture f;
  RawContext env = {{"x", false, tm::var("A")}};
  // beta: dn(up(~x)) = ~x at zA (= A here since A is a closed constant)
  Term lhs = tm::dn(tm::up(tm::marked("x"), tm::var("A")), tm::var("A"));
  CHECK(f.checker.convert(env, lhs, tm::marked("x"), tm::var("A")));

  // eta: v = up(dn(~v)) at %(A)
  RawContext venv = {{"v", false, tm::nat(tm::var("A"))}};
  Term v = tm::var("v");
  Term expand = tm::up(tm::dn(tm::marked("v"), tm::var("A")), tm::var("A"));
  CHECK(f.checker.convert(venv, v, expand, tm::nat(tm::var("A"))));

  // zero-in-natural: v = ~v at %(A)
  CHECK(f.checker.convert(venv, v, tm::marked("v"), tm::nat(tm::var("A"))));
  // but not at a general type
  RawContext xenv = {{"x", false, tm::var("A")}};
  CHECK_FALSE(f.checker.convert(xenv, tm::var("x"), tm::marked("x"), tm::var("A")));
}

TEST_CASE("conversion: pi eta and alpha") {
  Fixture f;
  RawContext env;
  Term ty = arrow(tm::var("A"), tm::var("A"));
  Term id1 = tm::lam("x", tm::var("A"), tm::var("x"), tm::var("A"));
  Term id2 = tm::lam("y", tm::var("A"), tm::var("y"), tm::var("A"));
  CHECK(f.checker.convert(env, id1, id2, ty));

  // f = lam x. f x for a neutral f
  RawContext fenv = {{"f", false, ty}};
  Term eta = tm::lam("x", tm::var("A"),
                     tm::app(tm::var("f"), tm::var("x"), tm::var("A"), "_y", tm::var("A")),
                     tm::var("A"));
  CHECK(f.checker.convert(fenv, tm::var("f"), eta, ty));
  CHECK_FALSE(f.checker.convert(fenv, tm::var("f"), id1, ty));
}

TEST_CASE("section-retraction holds definitionally") {
  Fixture f;
  // for n : %(A): up(dn(~n)) = n
  RawContext nenv = {{"n", false, tm::nat(tm::var("A"))}};
  Term roundtrip = tm::up(tm::dn(tm::marked("n"), tm::var("A")), tm::var("A"));
  CHECK(f.checker.convert(nenv, roundtrip, tm::var("n"), tm::nat(tm::var("A"))));

  // for x : A: dn(up(~x)) = ~x
  RawContext xenv = {{"x", false, tm::var("A")}};
  Term other = tm::dn(tm::up(tm::marked("x"), tm::var("A")), tm::var("A"));
  CHECK(f.checker.convert(xenv, other, tm::marked("x"), tm::var("A")));
}

TEST_CASE("type checking presupposition") {
  Fixture f;
  RawContext env = {{"x", false, tm::var("A")}};
  Term t = tm::up(tm::marked("x"), tm::var("A"));
  Term ty = f.checker.infer(env, t);
  CHECK_NOTHROW(f.checker.check_type(env, ty));
}

TEST_CASE("application annotations are verified") {
  Fixture f;
  RawContext env = {{"f", false, arrow(tm::var("A"), tm::var("A"))}};
  Term good = tm::app(tm::var("f"), tm::var("a0"), tm::var("A"), "_x", tm::var("A"));
  CHECK_NOTHROW(f.checker.infer(env, good));
  Term bad = tm::app(tm::var("f"), tm::var("a0"), tm::var("B"), "_x", tm::var("A"));
  CHECK_THROWS_WITH_AS(f.checker.infer(env, bad), doctest::Contains("annotation-mismatch"),
                       TypeError);
}

TEST_CASE("pre-counit produces a judgement that re-checks") {
  Fixture f;
  // (f : A -> B, x : A) |- f x : B, telescope = (x : A)
  RawContext env = {{"f", false, arrow(tm::var("A"), tm::var("B"))},
                    {"x", false, tm::var("A")}};
  Term t = tm::app(tm::var("f"), tm::var("x"), tm::var("A"), "_y", tm::var("B"));
  f.checker.check_context(env);
  CHECK(alpha_eq(f.checker.infer(env, t), tm::var("B")));

  Judgement j = pre_counit(env, 1, t, tm::var("B"));
  REQUIRE(j.ctx.size() == 2);
  CHECK(j.ctx[0].marked);
  CHECK_FALSE(j.ctx[1].marked);
  const auto* app = j.term.as<App>();
  REQUIRE(app != nullptr);
  CHECK(app->fn.is<MarkedVar>());
  CHECK(app->arg.is<Var>());
  CHECK_NOTHROW(f.checker.check_context(j.ctx));
  CHECK_NOTHROW(f.checker.check(j.ctx, j.term, j.type));

  // zeroing over the already-marked prefix is a fixpoint on well-typed terms
  Judgement j2 = pre_counit(j.ctx, 1, j.term, j.type);
  CHECK(alpha_eq(j2.term, j.term));
  CHECK(alpha_eq(j2.type, j.type));
  CHECK(alpha_eq_context(j2.ctx, j.ctx));
}

TEST_CASE("pre-unit re-checks with the identical term") {
  Fixture f;
  RawContext env = {{"x", true, tm::var("A")}};
  Term t = tm::marked("x");
  f.checker.check_context(env);
  Term ty = f.checker.infer(env, t);

  RawContext unzeroed = pre_unit_context(env, 0, 1);
  CHECK_FALSE(unzeroed[0].marked);
  CHECK_NOTHROW(f.checker.check_context(unzeroed));
  // same raw term checks, at the roundtrip type
  Term ty2 = f.checker.infer(unzeroed, t);
  CHECK_NOTHROW(f.checker.check_type(unzeroed, ty2));
  CHECK(alpha_eq(ty, ty2));  // A is closed here so zA = A
}

TEST_CASE("substitution judgement re-checks") {
  Fixture f;
  // (x : A, y : Id A x x) |- y : Id A x x ; substitute a0 for x
  RawContext env = {{"x", false, tm::var("A")},
                    {"y", false, tm::id(tm::var("A"), tm::var("x"), tm::var("x"))}};
  f.checker.check_context(env);
  Judgement j = substitution_judgement(env, 0, tm::var("a0"), tm::var("y"),
                                       tm::id(tm::var("A"), tm::var("x"), tm::var("x")));
  CHECK_NOTHROW(f.checker.check_context(j.ctx));
  CHECK_NOTHROW(f.checker.check(j.ctx, j.term, j.type));
}

TEST_CASE("dull substitution collapses marked and plain substitution") {
  Fixture f;
  // (~x :: A) |- up(~x) : %(A), substitute the dull a0
  RawContext env = {{"x", true, tm::var("A")}};
  Term c = tm::up(tm::marked("x"), tm::var("A"));
  f.checker.check_context(env);
  Judgement j = dull_substitution(env, 0, tm::var("a0"), c, tm::nat(tm::var("A")));
  CHECK_NOTHROW(f.checker.check(j.ctx, j.term, j.type));
  // c[za/x] == c[a/x] for the marked variable
  Term with_zeroed = substitute(c, zero_all(tm::var("a0")), "x");
  CHECK(alpha_eq(j.term, with_zeroed));
}

TEST_CASE("fuel exhaustion is reported, not looped") {
  Globals g;
  g.add({"A", tm::univ(), std::nullopt});
  // omega-style loop through a transparent definition
  Term self = tm::app(tm::var("loop"), tm::tt(), tm::unit(), "_x", tm::unit());
  g.add({"loop", tm::pi("_x", tm::unit(), tm::unit()),
         tm::lam("_x", tm::unit(), self, tm::unit())});
  Checker c(g, {true, 100});
  CHECK_THROWS_AS(c.whnf(self), FuelExhausted);
}

TEST_CASE("universe flag") {
  Globals g;
  Checker off(g, {false, 10000});
  RawContext env;
  CHECK_THROWS_WITH_AS(off.infer(env, tm::univ()), doctest::Contains("univ-disabled"),
                       TypeError);
  CHECK_NOTHROW(off.check_type(env, tm::pi("x", tm::unit(), tm::unit())));
  Checker on(g, {true, 10000});
  CHECK(on.infer(env, tm::univ()).is<UnivType>());
}
