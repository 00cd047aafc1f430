#pragma once

#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "natt/term.hpp"

namespace natt {

struct Span {
  std::string file;
  int line = 0;
  int col = 0;
  bool valid() const { return line > 0; }
};

struct Diagnostic {
  std::string rule;     // name of the violated rule, e.g. "var-zero"
  std::string message;
  std::optional<Term> expected;
  std::optional<Term> actual;
  std::optional<Span> span;
};

// Thrown by checking; the driver turns these into reported diagnostics.
class TypeError : public std::exception {
public:
  explicit TypeError(Diagnostic d) : diag_(std::move(d)) { what_ = diag_.rule + ": " + diag_.message; }
  const Diagnostic& diag() const { return diag_; }
  Diagnostic& diag() { return diag_; }
  const char* what() const noexcept override { return what_.c_str(); }

private:
  Diagnostic diag_;
  std::string what_;
};

// Conversion ran out of head-reduction fuel; distinct from TypeError so that
// elaboration fallbacks never swallow it.
class FuelExhausted : public std::exception {
public:
  const char* what() const noexcept override { return "conversion fuel exhausted"; }
};

struct GlobalDecl {
  Name name;
  Term type;
  std::optional<Term> body;  // present for transparent `def`, absent for `postulate`
};

class Globals {
public:
  const GlobalDecl* lookup(const Name& n) const;
  void add(GlobalDecl d);  // throws TypeError on duplicate
  const std::vector<GlobalDecl>& all() const { return decls_; }

private:
  std::vector<GlobalDecl> decls_;
  std::map<Name, size_t> index_;
};

struct CheckerOptions {
  bool type_in_type = true;
  std::int64_t fuel = 10000;
};

// Decides the judgements over fully annotated raw syntax. An environment is a
// RawContext that the caller has validated (check_context), plus the globals.
class Checker {
public:
  explicit Checker(const Globals& globals, CheckerOptions opts = {})
      : globals_(globals), opts_(opts) {}

  const Globals& globals() const { return globals_; }
  const CheckerOptions& options() const { return opts_; }

  // Γ ctx: plain entry types check in their prefix, marked entry types in the
  // zeroed prefix. Throws on failure.
  void check_context(const RawContext& ctx);

  // Γ ⊢ A type
  void check_type(const RawContext& env, const Term& type);

  // Γ ⊢ a : A (A assumed well-formed) / Γ ⊢ a : ? synthesised
  void check(const RawContext& env, const Term& term, const Term& type);
  Term infer(const RawContext& env, const Term& term);

  // Weak head normal form; unfolds transparent definitions at the head.
  Term whnf(Term t);
  // Full normal form (whnf iterated under all subterms and annotations).
  Term normalize(const Term& t);

  // Definitional equality, type-directed at Pi and at the natural type.
  bool convert(const RawContext& env, const Term& a, const Term& b, const Term& type);
  bool convert_type(const RawContext& env, const Term& a, const Term& b);

private:
  Term infer_var(const RawContext& env, const Name& n, bool marked_use);
  bool spine_equal(const RawContext& env, const Term& a, const Term& b);
  void spend_fuel();
  NameSet scope_avoid(const RawContext& env) const;

  const Globals& globals_;
  CheckerOptions opts_;
  std::int64_t fuel_left_ = 0;
  bool fuel_active_ = false;
};

// ----- Admissible transformations, exposed for property testing -----

struct Judgement {
  RawContext ctx;
  Term term;
  Term type;
};

// pre-counit-gen: from Γ,Δ ⊢ a : A (split at `telescope_start`) to
// zc(Γ), Δ^{0Γ} ⊢ a^{0Γ} : A^{0Γ}.
Judgement pre_counit(const RawContext& env, size_t telescope_start, const Term& term,
                     const Term& type);

// pre-unit: unzeroes the all-marked segment [begin, end) of the context; the
// term and type are untouched (the rule is silent).
RawContext pre_unit_context(const RawContext& env, size_t begin, size_t end);

// Ordinary substitution admissibility: env must be Γ, x:A, Δ with the plain
// entry x at `var_index`; returns Γ, Δ[a/x] ⊢ b[a/x] : B[a/x].
Judgement substitution_judgement(const RawContext& env, size_t var_index, const Term& a,
                                 const Term& b, const Term& type_b);

// dull-subst: env must have the marked entry x at `var_index` and a must be
// dull over the prefix; c[a/zx] := c[a/x].
Judgement dull_substitution(const RawContext& env, size_t var_index, const Term& a,
                            const Term& c, const Term& type_c);

}  // namespace natt
