#include "natt/kernel.hpp"

#include <cassert>
#include <stdexcept>

namespace natt {

const GlobalDecl* Globals::lookup(const Name& n) const {
  auto it = index_.find(n);
  if (it == index_.end()) return nullptr;
  return &decls_[it->second];
}

void Globals::add(GlobalDecl d) {
  if (index_.count(d.name))
    throw TypeError({"duplicate", "name '" + d.name + "' is already declared"});
  index_[d.name] = decls_.size();
  decls_.push_back(std::move(d));
}

namespace {

// Activates the head-step budget for the outermost kernel entry point.
struct FuelScope {
  FuelScope(bool& active, std::int64_t& left, std::int64_t budget) : active_(active) {
    if (!active_) {
      active_ = true;
      owner_ = true;
      left = budget;
    }
  }
  ~FuelScope() {
    if (owner_) active_ = false;
  }
  bool& active_;
  bool owner_ = false;
};

TypeError err(std::string rule, std::string message) {
  return TypeError({std::move(rule), std::move(message)});
}

TypeError err(std::string rule, std::string message, Term expected, Term actual) {
  Diagnostic d{std::move(rule), std::move(message)};
  d.expected = std::move(expected);
  d.actual = std::move(actual);
  return TypeError(std::move(d));
}

int find_entry(const RawContext& env, const Name& n) {
  for (int i = static_cast<int>(env.size()) - 1; i >= 0; --i)
    if (env[static_cast<size_t>(i)].name == n) return i;
  return -1;
}

bool is_type_former(const Term& t) {
  return t.is<Pi>() || t.is<Sigma>() || t.is<NatType>() || t.is<IdType>() ||
         t.is<UnitType>() || t.is<UnivType>() || t.is<PBType>();
}

}  // namespace

void Checker::spend_fuel() {
  if (!fuel_active_) return;
  if (--fuel_left_ < 0) throw FuelExhausted();
}

NameSet Checker::scope_avoid(const RawContext& env) const {
  NameSet s = domain_set(env);
  for (const auto& g : globals_.all()) s.insert(g.name);
  return s;
}

Term Checker::whnf(Term t) {
  FuelScope scope(fuel_active_, fuel_left_, opts_.fuel);
  for (;;) {
    const Node& n = t.node();
    if (const auto* v = std::get_if<Var>(&n.v)) {
      const GlobalDecl* g = globals_.lookup(v->name);
      if (g && g->body) {
        spend_fuel();
        t = *g->body;
        continue;
      }
      return t;
    }
    if (const auto* m = std::get_if<MarkedVar>(&n.v)) {
      // globals are closed, so marking them is a definitional no-op
      if (globals_.lookup(m->name)) {
        t = tm::var(m->name);
        continue;
      }
      return t;
    }
    if (const auto* a = std::get_if<App>(&n.v)) {
      Term fn = whnf(a->fn);
      if (const auto* l = fn.as<Lam>()) {
        spend_fuel();
        t = substitute(l->body, a->arg, l->var);
        continue;
      }
      return tm::app(fn, a->arg, a->dom_ann, a->var, a->cod_ann);
    }
    if (const auto* e = std::get_if<NatElim>(&n.v)) {
      Term scrut = whnf(e->scrut);
      if (const auto* i = scrut.as<NatIntro>()) {
        spend_fuel();
        t = i->body;
        continue;
      }
      return tm::dn(scrut, e->ann);
    }
    if (const auto* f = std::get_if<Fst>(&n.v)) {
      Term p = whnf(f->pair);
      if (const auto* pr = p.as<MkPair>()) {
        spend_fuel();
        t = pr->first;
        continue;
      }
      return tm::fst(p, f->dom_ann, f->var, f->cod_ann);
    }
    if (const auto* s = std::get_if<Snd>(&n.v)) {
      Term p = whnf(s->pair);
      if (const auto* pr = p.as<MkPair>()) {
        spend_fuel();
        t = pr->second;
        continue;
      }
      return tm::snd(p, s->dom_ann, s->var, s->cod_ann);
    }
    if (const auto* j = std::get_if<JElim>(&n.v)) {
      Term q = whnf(j->path);
      if (q.is<Refl>()) {
        spend_fuel();
        t = j->base;
        continue;
      }
      return tm::j(j->ann, j->from, j->to, q, j->motive_var, j->path_var, j->motive, j->base);
    }
    return t;
  }
}

Term Checker::infer_var(const RawContext& env, const Name& n, bool marked_use) {
  int i = find_entry(env, n);
  if (i >= 0) {
    const CtxEntry& e = env[static_cast<size_t>(i)];
    if (!marked_use) {
      if (e.marked)
        throw err("var-zero",
                  "variable '" + n + "' is declared marked and can only be used as ~" + n);
      return e.type;
    }
    if (e.marked) return e.type;                        // var-zero, the counit
    return zero_term(e.type, domain_set(env));          // var-roundtrip
  }
  const GlobalDecl* g = globals_.lookup(n);
  if (g) {
    // globals are closed, so both g and ~g have the (closed) declared type
    return g->type;
  }
  throw err("scope", "unbound variable '" + n + "'");
}

void Checker::check_context(const RawContext& ctx) {
  FuelScope scope(fuel_active_, fuel_left_, opts_.fuel);
  RawContext prefix;
  NameSet seen;
  for (const auto& e : ctx) {
    if (!seen.insert(e.name).second)
      throw err("duplicate", "context declares '" + e.name + "' twice");
    if (globals_.lookup(e.name))
      throw err("duplicate", "context entry '" + e.name + "' shadows a global declaration");
    if (e.marked) {
      check_type(zero_context(prefix), e.type);
    } else {
      check_type(prefix, e.type);
    }
    prefix.push_back(e);
  }
}

void Checker::check_type(const RawContext& env, const Term& type) {
  FuelScope scope(fuel_active_, fuel_left_, opts_.fuel);
  const Node& n = type.node();
  if (const auto* nt = std::get_if<NatType>(&n.v)) {
    check_type(zero_context(env), nt->body);
    return;
  }
  if (const auto* p = std::get_if<Pi>(&n.v)) {
    check_type(env, p->dom);
    NameSet avoid = scope_avoid(env);
    Name x = p->var;
    Term cod = p->cod;
    if (avoid.count(x)) {
      Name x2 = fresh_name(x, avoid);
      cod = substitute(cod, tm::var(x2), x);
      x = x2;
    }
    RawContext env2 = env;
    env2.push_back({x, false, p->dom});
    check_type(env2, cod);
    return;
  }
  if (const auto* s = std::get_if<Sigma>(&n.v)) {
    check_type(env, s->dom);
    NameSet avoid = scope_avoid(env);
    Name x = s->var;
    Term cod = s->cod;
    if (avoid.count(x)) {
      Name x2 = fresh_name(x, avoid);
      cod = substitute(cod, tm::var(x2), x);
      x = x2;
    }
    RawContext env2 = env;
    env2.push_back({x, false, s->dom});
    check_type(env2, cod);
    return;
  }
  if (const auto* i = std::get_if<IdType>(&n.v)) {
    check_type(env, i->ann);
    check(env, i->lhs, i->ann);
    check(env, i->rhs, i->ann);
    return;
  }
  if (std::holds_alternative<UnitType>(n.v) || std::holds_alternative<UnivType>(n.v) ||
      std::holds_alternative<PBType>(n.v))
    return;
  if (std::holds_alternative<Lam>(n.v) || std::holds_alternative<MkPair>(n.v) ||
      std::holds_alternative<NatIntro>(n.v) || std::holds_alternative<Refl>(n.v) ||
      std::holds_alternative<TtTerm>(n.v))
    throw err("not-a-type", "term cannot be used as a type");
  // neutral type: a term whose type is the universe
  Term t = infer(env, type);
  if (!whnf(t).is<UnivType>())
    throw err("not-a-type", "expression does not denote a type", tm::univ(), t);
}

void Checker::check(const RawContext& env, const Term& term, const Term& type) {
  FuelScope scope(fuel_active_, fuel_left_, opts_.fuel);
  Term actual = infer(env, term);
  if (!convert_type(env, actual, type))
    throw err("type-mismatch", "term does not have the expected type", type, actual);
}

Term Checker::infer(const RawContext& env, const Term& term) {
  FuelScope scope(fuel_active_, fuel_left_, opts_.fuel);
  auto require_universe_terms = [&](const char* what) {
    if (!opts_.type_in_type)
      throw err("univ-disabled",
                std::string(what) + " is not a term without --type-in-type");
  };
  return std::visit(
      overloaded{
          [&](const Var& v) { return infer_var(env, v.name, false); },
          [&](const MarkedVar& v) { return infer_var(env, v.name, true); },
          [&](const NatType& n) -> Term {
            require_universe_terms("a natural type");
            check_type(zero_context(env), n.body);
            return tm::univ();
          },
          [&](const NatIntro& n) -> Term {
            RawContext zenv = zero_context(env);
            try {
              check_type(zenv, n.ann);
              check(zenv, n.body, n.ann);
            } catch (TypeError& e) {
              throw err("natural-intro",
                        "body of a natural introduction must be dull (" +
                            e.diag().rule + ": " + e.diag().message + ")");
            }
            return tm::nat(n.ann);
          },
          [&](const NatElim& n) -> Term {
            try {
              check_type(zero_context(env), n.ann);
            } catch (TypeError& e) {
              throw err("natural-elim",
                        "annotation of a natural eliminator must be a dull type (" +
                            e.diag().rule + ": " + e.diag().message + ")");
            }
            check(env, n.scrut, tm::nat(n.ann));
            return n.ann;
          },
          [&](const Pi& n) -> Term {
            require_universe_terms("a Pi type");
            check_type(env, term);
            return tm::univ();
          },
          [&](const Sigma& n) -> Term {
            require_universe_terms("a Sig type");
            check_type(env, term);
            return tm::univ();
          },
          [&](const IdType& n) -> Term {
            require_universe_terms("an Id type");
            check_type(env, term);
            return tm::univ();
          },
          [&](const UnitType&) -> Term {
            require_universe_terms("Unit");
            return tm::univ();
          },
          [&](const PBType&) -> Term {
            require_universe_terms("PB");
            return tm::univ();
          },
          [&](const UnivType&) -> Term {
            require_universe_terms("the universe");
            return tm::univ();
          },
          [&](const TtTerm&) -> Term { return tm::unit(); },
          [&](const Lam& n) -> Term {
            check_type(env, n.dom);
            NameSet avoid = scope_avoid(env);
            Name x = n.var;
            Term body = n.body;
            Term body_ann = n.body_ann;
            if (avoid.count(x)) {
              Name x2 = fresh_name(x, avoid);
              body = substitute(body, tm::var(x2), x);
              body_ann = substitute(body_ann, tm::var(x2), x);
              x = x2;
            }
            RawContext env2 = env;
            env2.push_back({x, false, n.dom});
            check_type(env2, body_ann);
            check(env2, body, body_ann);
            return tm::pi(n.var, n.dom, n.body_ann);
          },
          [&](const App& n) -> Term {
            check_type(env, n.dom_ann);
            {
              NameSet avoid = scope_avoid(env);
              Name x = n.var;
              Term cod = n.cod_ann;
              if (avoid.count(x)) {
                Name x2 = fresh_name(x, avoid);
                cod = substitute(cod, tm::var(x2), x);
                x = x2;
              }
              RawContext env2 = env;
              env2.push_back({x, false, n.dom_ann});
              check_type(env2, cod);
            }
            Term fn_type = whnf(infer(env, n.fn));
            const auto* p = fn_type.as<Pi>();
            if (!p)
              throw err("not-a-function", "application head is not of Pi type", Term(),
                        fn_type);
            if (!convert_type(env, n.dom_ann, p->dom))
              throw err("annotation-mismatch",
                        "application domain annotation disagrees with the head's type",
                        p->dom, n.dom_ann);
            {
              NameSet avoid = scope_avoid(env);
              avoid.merge(free_vars(n.cod_ann));
              NameSet fvp = free_vars(p->cod);
              avoid.insert(fvp.begin(), fvp.end());
              Name z = fresh_name(n.var, avoid);
              RawContext env2 = env;
              env2.push_back({z, false, n.dom_ann});
              if (!convert_type(env2, substitute(n.cod_ann, tm::var(z), n.var),
                                substitute(p->cod, tm::var(z), p->var)))
                throw err("annotation-mismatch",
                          "application codomain annotation disagrees with the head's type",
                          p->cod, n.cod_ann);
            }
            check(env, n.arg, n.dom_ann);
            return substitute(n.cod_ann, n.arg, n.var);
          },
          [&](const MkPair& n) -> Term {
            Term first_type = infer(env, n.first);
            {
              NameSet avoid = scope_avoid(env);
              Name x = n.var;
              Term ann = n.second_ann;
              if (avoid.count(x)) {
                Name x2 = fresh_name(x, avoid);
                ann = substitute(ann, tm::var(x2), x);
                x = x2;
              }
              RawContext env2 = env;
              env2.push_back({x, false, first_type});
              check_type(env2, ann);
            }
            check(env, n.second, substitute(n.second_ann, n.first, n.var));
            return tm::sigma(n.var, first_type, n.second_ann);
          },
          [&](const Fst& n) -> Term {
            Term pair_type = whnf(infer(env, n.pair));
            const auto* s = pair_type.as<Sigma>();
            if (!s)
              throw err("not-a-pair", "projection argument is not of Sig type", Term(),
                        pair_type);
            if (!convert_type(env, n.dom_ann, s->dom))
              throw err("annotation-mismatch",
                        "projection annotation disagrees with the pair's type", s->dom,
                        n.dom_ann);
            return n.dom_ann;
          },
          [&](const Snd& n) -> Term {
            Term pair_type = whnf(infer(env, n.pair));
            const auto* s = pair_type.as<Sigma>();
            if (!s)
              throw err("not-a-pair", "projection argument is not of Sig type", Term(),
                        pair_type);
            if (!convert_type(env, n.dom_ann, s->dom))
              throw err("annotation-mismatch",
                        "projection annotation disagrees with the pair's type", s->dom,
                        n.dom_ann);
            {
              NameSet avoid = scope_avoid(env);
              avoid.merge(free_vars(n.cod_ann));
              NameSet fvp = free_vars(s->cod);
              avoid.insert(fvp.begin(), fvp.end());
              Name z = fresh_name(n.var, avoid);
              RawContext env2 = env;
              env2.push_back({z, false, n.dom_ann});
              if (!convert_type(env2, substitute(n.cod_ann, tm::var(z), n.var),
                                substitute(s->cod, tm::var(z), s->var)))
                throw err("annotation-mismatch",
                          "projection annotation disagrees with the pair's type", s->cod,
                          n.cod_ann);
            }
            return substitute(n.cod_ann, tm::fst(n.pair, n.dom_ann, n.var, n.cod_ann),
                              n.var);
          },
          [&](const Refl& n) -> Term {
            check_type(env, n.ann);
            check(env, n.value, n.ann);
            return tm::id(n.ann, n.value, n.value);
          },
          [&](const JElim& n) -> Term {
            check_type(env, n.ann);
            check(env, n.from, n.ann);
            check(env, n.to, n.ann);
            check(env, n.path, tm::id(n.ann, n.from, n.to));
            NameSet avoid = scope_avoid(env);
            avoid.merge(free_vars(n.motive));
            Name x = fresh_name(n.motive_var, avoid);
            avoid.insert(x);
            Name p = fresh_name(n.path_var == x ? n.path_var + "p" : n.path_var, avoid);
            Term motive = n.motive;
            if (x != n.motive_var) motive = substitute(motive, tm::var(x), n.motive_var);
            if (p != n.path_var) motive = substitute(motive, tm::var(p), n.path_var);
            RawContext env2 = env;
            env2.push_back({x, false, n.ann});
            env2.push_back({p, false, tm::id(n.ann, n.from, tm::var(x))});
            check_type(env2, motive);
            Term at_refl =
                substitute(substitute(motive, n.from, x), tm::refl(n.ann, n.from), p);
            check(env, n.base, at_refl);
            return substitute(substitute(motive, n.to, x), n.path, p);
          },
      },
      term.node().v);
}

bool Checker::convert(const RawContext& env, const Term& a, const Term& b, const Term& type) {
  FuelScope scope(fuel_active_, fuel_left_, opts_.fuel);
  Term ty = whnf(type);
  if (const auto* p = ty.as<Pi>()) {
    NameSet avoid = scope_avoid(env);
    avoid.merge(free_vars(a));
    avoid.merge(free_vars(b));
    avoid.merge(free_vars(p->cod));
    Name z = fresh_name(p->var, avoid);
    RawContext env2 = env;
    env2.push_back({z, false, p->dom});
    Term za = tm::app(a, tm::var(z), p->dom, p->var, p->cod);
    Term zb = tm::app(b, tm::var(z), p->dom, p->var, p->cod);
    return convert(env2, za, zb, substitute(p->cod, tm::var(z), p->var));
  }
  if (const auto* nt = ty.as<NatType>()) {
    // sound by the natural eta rule: u = (zu_nat)^nat, plus congruence
    NameSet over = domain_set(env);
    Term da = tm::dn(zero_term(a, over), nt->body);
    Term db = tm::dn(zero_term(b, over), nt->body);
    return convert(env, da, db, nt->body);
  }
  if (ty.is<UnivType>()) return convert_type(env, a, b);

  Term wa = whnf(a);
  Term wb = whnf(b);

  if (const auto* s = ty.as<Sigma>()) {
    const auto* pa = wa.as<MkPair>();
    const auto* pb = wb.as<MkPair>();
    if (pa && pb) {
      if (!convert(env, pa->first, pb->first, s->dom)) return false;
      return convert(env, pa->second, pb->second, substitute(s->cod, pa->first, s->var));
    }
    if (!pa && !pb) return spine_equal(env, wa, wb);
    return false;
  }
  if (ty.is<IdType>()) {
    if (wa.is<Refl>() && wb.is<Refl>()) return true;
    if (!wa.is<Refl>() && !wb.is<Refl>()) return spine_equal(env, wa, wb);
    return false;
  }
  if (ty.is<UnitType>()) {
    if (wa.is<TtTerm>() && wb.is<TtTerm>()) return true;
    if (!wa.is<TtTerm>() && !wb.is<TtTerm>()) return spine_equal(env, wa, wb);
    return false;
  }

  // base type, PB, or neutral comparison type
  if (is_type_former(wa) && is_type_former(wb)) return convert_type(env, wa, wb);
  const auto* la = wa.as<Lam>();
  const auto* lb = wb.as<Lam>();
  if (la || lb) {
    // eta at an unknown Pi: annotations carry the binder type
    const Lam* l = la ? la : lb;
    NameSet avoid = scope_avoid(env);
    avoid.merge(free_vars(wa));
    avoid.merge(free_vars(wb));
    Name z = fresh_name(l->var, avoid);
    RawContext env2 = env;
    env2.push_back({z, false, l->dom});
    auto apply = [&](const Term& t) {
      if (const auto* lt = t.as<Lam>()) return substitute(lt->body, tm::var(z), lt->var);
      return tm::app(t, tm::var(z), l->dom, l->var, l->body_ann);
    };
    return convert(env2, apply(wa), apply(wb), substitute(l->body_ann, tm::var(z), l->var));
  }
  const auto* ia = wa.as<NatIntro>();
  const auto* ib = wb.as<NatIntro>();
  if (ia && ib) return convert(zero_context(env), ia->body, ib->body, ia->ann);
  if (ia || ib) return false;
  if (wa.is<Refl>() && wb.is<Refl>()) return true;
  if (wa.is<TtTerm>() && wb.is<TtTerm>()) return true;
  if (wa.is<MkPair>() || wb.is<MkPair>()) return false;  // cannot be typed at a neutral type
  return spine_equal(env, wa, wb);
}

bool Checker::spine_equal(const RawContext& env, const Term& a, const Term& b) {
  const Node& na = a.node();
  const Node& nb = b.node();
  if (na.v.index() != nb.v.index()) return false;
  return std::visit(
      overloaded{
          [&](const Var& x) { return x.name == std::get<Var>(nb.v).name; },
          [&](const MarkedVar& x) { return x.name == std::get<MarkedVar>(nb.v).name; },
          [&](const App& x) {
            const auto& y = std::get<App>(nb.v);
            if (!spine_equal(env, whnf(x.fn), whnf(y.fn))) return false;
            if (!convert_type(env, x.dom_ann, y.dom_ann)) return false;
            return convert(env, x.arg, y.arg, x.dom_ann);
          },
          [&](const NatElim& x) {
            const auto& y = std::get<NatElim>(nb.v);
            if (!convert_type(zero_context(env), x.ann, y.ann)) return false;
            return spine_equal(env, whnf(x.scrut), whnf(y.scrut));
          },
          [&](const Fst& x) {
            const auto& y = std::get<Fst>(nb.v);
            return spine_equal(env, whnf(x.pair), whnf(y.pair)) &&
                   convert_type(env, x.dom_ann, y.dom_ann);
          },
          [&](const Snd& x) {
            const auto& y = std::get<Snd>(nb.v);
            return spine_equal(env, whnf(x.pair), whnf(y.pair)) &&
                   convert_type(env, x.dom_ann, y.dom_ann);
          },
          [&](const JElim& x) {
            const auto& y = std::get<JElim>(nb.v);
            if (!convert_type(env, x.ann, y.ann)) return false;
            if (!convert(env, x.from, y.from, x.ann)) return false;
            if (!convert(env, x.to, y.to, x.ann)) return false;
            if (!spine_equal(env, whnf(x.path), whnf(y.path))) return false;
            NameSet avoid = scope_avoid(env);
            avoid.merge(free_vars(x.motive));
            avoid.merge(free_vars(y.motive));
            Name vx = fresh_name(x.motive_var, avoid);
            avoid.insert(vx);
            Name vp = fresh_name(x.path_var, avoid);
            Term ma = substitute(substitute(x.motive, tm::var(vx), x.motive_var),
                                 tm::var(vp), x.path_var);
            Term mb = substitute(substitute(y.motive, tm::var(vx), y.motive_var),
                                 tm::var(vp), y.path_var);
            RawContext env2 = env;
            env2.push_back({vx, false, x.ann});
            env2.push_back({vp, false, tm::id(x.ann, x.from, tm::var(vx))});
            if (!convert_type(env2, ma, mb)) return false;
            Term at_refl = substitute(substitute(x.motive, x.from, x.motive_var),
                                      tm::refl(x.ann, x.from), x.path_var);
            return convert(env, x.base, y.base, at_refl);
          },
          [&](const auto&) { return false; },
      },
      na.v);
}

bool Checker::convert_type(const RawContext& env, const Term& a, const Term& b) {
  FuelScope scope(fuel_active_, fuel_left_, opts_.fuel);
  Term wa = whnf(a);
  Term wb = whnf(b);
  const Node& na = wa.node();
  const Node& nb = wb.node();
  if (na.v.index() != nb.v.index()) return false;
  return std::visit(
      overloaded{
          [&](const Pi& x) {
            const auto& y = std::get<Pi>(nb.v);
            if (!convert_type(env, x.dom, y.dom)) return false;
            NameSet avoid = scope_avoid(env);
            avoid.merge(free_vars(x.cod));
            avoid.merge(free_vars(y.cod));
            Name z = fresh_name(x.var, avoid);
            RawContext env2 = env;
            env2.push_back({z, false, x.dom});
            return convert_type(env2, substitute(x.cod, tm::var(z), x.var),
                                substitute(y.cod, tm::var(z), y.var));
          },
          [&](const Sigma& x) {
            const auto& y = std::get<Sigma>(nb.v);
            if (!convert_type(env, x.dom, y.dom)) return false;
            NameSet avoid = scope_avoid(env);
            avoid.merge(free_vars(x.cod));
            avoid.merge(free_vars(y.cod));
            Name z = fresh_name(x.var, avoid);
            RawContext env2 = env;
            env2.push_back({z, false, x.dom});
            return convert_type(env2, substitute(x.cod, tm::var(z), x.var),
                                substitute(y.cod, tm::var(z), y.var));
          },
          [&](const NatType& x) {
            const auto& y = std::get<NatType>(nb.v);
            return convert_type(zero_context(env), x.body, y.body);
          },
          [&](const IdType& x) {
            const auto& y = std::get<IdType>(nb.v);
            return convert_type(env, x.ann, y.ann) && convert(env, x.lhs, y.lhs, x.ann) &&
                   convert(env, x.rhs, y.rhs, x.ann);
          },
          [&](const UnitType&) { return true; },
          [&](const UnivType&) { return true; },
          [&](const PBType&) { return true; },
          [&](const auto&) { return spine_equal(env, wa, wb); },
      },
      na.v);
}

Term Checker::normalize(const Term& t) {
  FuelScope scope(fuel_active_, fuel_left_, opts_.fuel);
  Term w = whnf(t);
  auto rec = [&](const Term& s) { return normalize(s); };
  return std::visit(
      overloaded{
          [&](const Var&) { return w; },
          [&](const MarkedVar&) { return w; },
          [&](const NatType& n) { return tm::nat(rec(n.body)); },
          [&](const NatIntro& n) { return tm::up(rec(n.body), rec(n.ann)); },
          [&](const NatElim& n) { return tm::dn(rec(n.scrut), rec(n.ann)); },
          [&](const Pi& n) { return tm::pi(n.var, rec(n.dom), rec(n.cod)); },
          [&](const Lam& n) {
            return tm::lam(n.var, rec(n.dom), rec(n.body), rec(n.body_ann));
          },
          [&](const App& n) {
            return tm::app(rec(n.fn), rec(n.arg), rec(n.dom_ann), n.var, rec(n.cod_ann));
          },
          [&](const Sigma& n) { return tm::sigma(n.var, rec(n.dom), rec(n.cod)); },
          [&](const MkPair& n) {
            return tm::pair(rec(n.first), rec(n.second), n.var, rec(n.second_ann));
          },
          [&](const Fst& n) {
            return tm::fst(rec(n.pair), rec(n.dom_ann), n.var, rec(n.cod_ann));
          },
          [&](const Snd& n) {
            return tm::snd(rec(n.pair), rec(n.dom_ann), n.var, rec(n.cod_ann));
          },
          [&](const IdType& n) { return tm::id(rec(n.ann), rec(n.lhs), rec(n.rhs)); },
          [&](const Refl& n) { return tm::refl(rec(n.ann), rec(n.value)); },
          [&](const JElim& n) {
            return tm::j(rec(n.ann), rec(n.from), rec(n.to), rec(n.path), n.motive_var,
                         n.path_var, rec(n.motive), rec(n.base));
          },
          [&](const UnitType&) { return w; },
          [&](const TtTerm&) { return w; },
          [&](const UnivType&) { return w; },
          [&](const PBType&) { return w; },
      },
      w.node().v);
}

Judgement pre_counit(const RawContext& env, size_t telescope_start, const Term& term,
                     const Term& type) {
  assert(telescope_start <= env.size());
  RawContext gamma(env.begin(), env.begin() + static_cast<long>(telescope_start));
  Telescope delta(env.begin() + static_cast<long>(telescope_start), env.end());
  NameSet over = domain_set(gamma);
  RawContext out = concat(zero_context(gamma), zero_telescope(delta, over));
  return {std::move(out), zero_term(term, over), zero_term(type, over)};
}

RawContext pre_unit_context(const RawContext& env, size_t begin, size_t end) {
  assert(begin <= end && end <= env.size());
  RawContext out = env;
  for (size_t i = begin; i < end; ++i) {
    if (!out[i].marked)
      throw std::invalid_argument("pre_unit_context: segment entry is not marked");
    out[i].marked = false;
  }
  return out;
}

namespace {

Judgement substitute_at(const RawContext& env, size_t var_index, bool want_marked,
                        const Term& a, const Term& body, const Term& type) {
  assert(var_index < env.size());
  const CtxEntry& entry = env[var_index];
  if (entry.marked != want_marked)
    throw std::invalid_argument("substitution: context entry has the wrong mark");
  const Name& x = entry.name;
  RawContext out(env.begin(), env.begin() + static_cast<long>(var_index));
  for (size_t i = var_index + 1; i < env.size(); ++i) {
    const CtxEntry& e = env[i];
    out.push_back({e.name, e.marked, substitute(e.type, a, x)});
  }
  return {std::move(out), substitute(body, a, x), substitute(type, a, x)};
}

}  // namespace

Judgement substitution_judgement(const RawContext& env, size_t var_index, const Term& a,
                                 const Term& b, const Term& type_b) {
  return substitute_at(env, var_index, false, a, b, type_b);
}

Judgement dull_substitution(const RawContext& env, size_t var_index, const Term& a,
                            const Term& c, const Term& type_c) {
  return substitute_at(env, var_index, true, a, c, type_c);
}

}  // namespace natt
