#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "natt/kernel.hpp"
#include "natt/term.hpp"

namespace natt {

// ----- Surface syntax (sugar-bearing trees with source spans) -----

struct STerm;
using SPtr = std::shared_ptr<const STerm>;

struct SVar { Name name; };
struct SMarked { Name name; };
struct SNat { SPtr body; };
struct SUp { SPtr body; };
struct SDn { SPtr body; };
struct SBinder {
  Name name;
  bool marked = false;  // ~x :: A binders introduce dull variables
  SPtr type;
  Span span;
};
struct SFun { std::vector<SBinder> binders; SPtr body; };
struct SPi { SBinder binder; SPtr body; };
struct SSig { SBinder binder; SPtr body; };
struct SArrow { SPtr dom; SPtr cod; };
struct SLetFlat { Name name; SPtr value; SPtr body; };  // let up(~u) = v in c
struct SApp { SPtr fn; SPtr arg; };
struct SPair { SPtr first; SPtr second; };
struct SFst { SPtr arg; };
struct SSnd { SPtr arg; };
struct SId { SPtr type; SPtr lhs; SPtr rhs; };
struct SRefl {};
struct SJ { Name motive_var; Name path_var; SPtr motive; SPtr base; SPtr path; };
struct SUnit {};
struct STt {};
struct SType {};
struct SPB {};

struct STerm {
  std::variant<SVar, SMarked, SNat, SUp, SDn, SFun, SPi, SSig, SArrow, SLetFlat, SApp,
               SPair, SFst, SSnd, SId, SRefl, SJ, SUnit, STt, SType, SPB>
      node;
  Span span;
};

struct Decl {
  enum class Kind { Def, Postulate, Check, Eq, ModelEq };
  Kind kind;
  Name name;   // Def/Postulate only
  SPtr type;   // the ascription
  SPtr body;   // Def body / Check term / Eq lhs
  SPtr rhs;    // Eq rhs
  Span span;
};

struct SourceFile {
  std::string filename;
  std::vector<Decl> decls;
};

// Throws TypeError with rule "parse" on lexical or syntax errors.
SourceFile parse(const std::string& text, const std::string& filename);

// ----- Elaboration: surface to fully annotated kernel syntax -----
//
// Bidirectional: annotations on applications, pairs and projections are filled
// from types synthesised along the way. Dull Pi/lambda/application and the
// let-flat form expand into their defining kernel terms here.
class Elaborator {
public:
  explicit Elaborator(Checker& checker) : checker_(checker) {}

  Term check_term(const RawContext& env, const SPtr& s, const Term& expected);
  std::pair<Term, Term> infer_term(const RawContext& env, const SPtr& s);
  Term check_is_type(const RawContext& env, const SPtr& s);

private:
  Term elab_pi(const RawContext& env, const SBinder& binder, const SPtr& body);
  NameSet scope_avoid(const RawContext& env) const;
  Checker& checker_;
};

// Concrete-syntax rendering; parse(pretty(t)) elaborates back to t up to alpha.
std::string pretty(const Term& t);
std::string pretty(const RawContext& ctx);

}  // namespace natt
