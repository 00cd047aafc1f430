#pragma once

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace natt {

using Name = std::string;

template <class... Fs> struct overloaded : Fs... { using Fs::operator()...; };
template <class... Fs> overloaded(Fs...) -> overloaded<Fs...>;

struct Node;

// Immutable fully annotated term. Copies are cheap and share structure.
class Term {
public:
  Term() = default;
  static Term make(Node n);
  const Node& node() const { return *ptr_; }
  bool empty() const { return ptr_ == nullptr; }
  template <class T> const T* as() const;
  template <class T> bool is() const { return as<T>() != nullptr; }

private:
  explicit Term(std::shared_ptr<const Node> p) : ptr_(std::move(p)) {}
  std::shared_ptr<const Node> ptr_;
};

struct Var { Name name; };
struct MarkedVar { Name name; };           // ~x, a term constructor on its own
struct NatType { Term body; };             // %(A)
struct NatIntro { Term body; Term ann; };  // up(a), annotated with its type A
struct NatElim { Term scrut; Term ann; };  // dn(b), annotated with the result type A
struct Pi { Name var; Term dom; Term cod; };
struct Lam { Name var; Term dom; Term body; Term body_ann; };
// f(a) annotated with the whole Pi decomposition: domain and var.codomain
struct App { Term fn; Term arg; Term dom_ann; Name var; Term cod_ann; };
struct Sigma { Name var; Term dom; Term cod; };
struct MkPair { Term first; Term second; Name var; Term second_ann; };
struct Fst { Term pair; Term dom_ann; Name var; Term cod_ann; };
struct Snd { Term pair; Term dom_ann; Name var; Term cod_ann; };
struct IdType { Term ann; Term lhs; Term rhs; };
struct Refl { Term ann; Term value; };
struct JElim {
  Term ann;               // endpoint type A
  Term from;              // left endpoint a
  Term to;                // right endpoint b
  Term path;              // q : Id A a b
  Name motive_var;        // x
  Name path_var;          // p
  Term motive;            // C under (x : A, p : Id A a x)
  Term base;              // value at refl : C[a/x, refl/p]
};
struct UnitType {};
struct TtTerm {};
struct UnivType {};
struct PBType {};  // built-in pointed booleans, opaque to the kernel

struct Node {
  std::variant<Var, MarkedVar, NatType, NatIntro, NatElim, Pi, Lam, App, Sigma,
               MkPair, Fst, Snd, IdType, Refl, JElim, UnitType, TtTerm,
               UnivType, PBType>
      v;
};

template <class T> const T* Term::as() const {
  return ptr_ ? std::get_if<T>(&ptr_->v) : nullptr;
}

// Concise term builders.
namespace tm {
Term var(Name n);
Term marked(Name n);
Term nat(Term body);
Term up(Term body, Term ann);
Term dn(Term scrut, Term ann);
Term pi(Name x, Term dom, Term cod);
Term lam(Name x, Term dom, Term body, Term body_ann);
Term app(Term fn, Term arg, Term dom_ann, Name x, Term cod_ann);
Term sigma(Name x, Term dom, Term cod);
Term pair(Term first, Term second, Name x, Term second_ann);
Term fst(Term p, Term dom_ann, Name x, Term cod_ann);
Term snd(Term p, Term dom_ann, Name x, Term cod_ann);
Term id(Term ann, Term lhs, Term rhs);
Term refl(Term ann, Term value);
Term j(Term ann, Term from, Term to, Term path, Name x, Name p, Term motive, Term base);
Term unit();
Term tt();
Term univ();
Term pb();
}  // namespace tm

using Scope = std::vector<Name>;
using NameSet = std::set<Name>;

// Context/telescope entry: `x : A` when plain, `~x :: A` when marked.
struct CtxEntry {
  Name name;
  bool marked = false;
  Term type;
};
using RawContext = std::vector<CtxEntry>;
using Telescope = std::vector<CtxEntry>;

Scope domain(const RawContext& ctx);
NameSet domain_set(const RawContext& ctx);
RawContext concat(const RawContext& ctx, const Telescope& tele);

NameSet free_vars(const Term& t);
// First of hint, hint1, hint2, ... not in avoid.
Name fresh_name(const Name& hint, const NameSet& avoid);

// a^{0γ}: mark every free use of a γ-variable; bound variables and already
// marked uses are untouched, annotations are zeroed recursively.
Term zero_term(const Term& t, const NameSet& over);
// za with γ = all free variables of a.
Term zero_all(const Term& t);
// zc(Γ): every entry marked, formerly plain entries get their type zeroed
// over the preceding scope.
RawContext zero_context(const RawContext& ctx);
// Δ^{0γ}: marks of the entries are preserved; only the types are zeroed.
Telescope zero_telescope(const Telescope& tele, const NameSet& over);
// zc(Δ) relative to an outer scope: like zc(Γ) but types are zeroed over
// the outer scope plus the telescope prefix.
Telescope zero_telescope_all(const Telescope& tele, const Scope& outer);

// b[a/x], capture-avoiding. Marked occurrences ~x become za.
Term substitute(const Term& body, const Term& replacement, const Name& target);

bool alpha_eq(const Term& a, const Term& b);
// Entrywise: same names, same marks, alpha-equal types.
bool alpha_eq_context(const RawContext& a, const RawContext& b);

// Compact s-expression rendering, for logs and test failure messages.
std::string debug_string(const Term& t);
std::string debug_string(const RawContext& ctx);

}  // namespace natt
