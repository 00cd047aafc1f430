#include "natt/term.hpp"

#include <sstream>

namespace natt {

Term Term::make(Node n) { return Term(std::make_shared<const Node>(std::move(n))); }

namespace tm {
Term var(Name n) { return Term::make({Var{std::move(n)}}); }
Term marked(Name n) { return Term::make({MarkedVar{std::move(n)}}); }
Term nat(Term body) { return Term::make({NatType{std::move(body)}}); }
Term up(Term body, Term ann) { return Term::make({NatIntro{std::move(body), std::move(ann)}}); }
Term dn(Term scrut, Term ann) { return Term::make({NatElim{std::move(scrut), std::move(ann)}}); }
Term pi(Name x, Term dom, Term cod) {
  return Term::make({Pi{std::move(x), std::move(dom), std::move(cod)}});
}
Term lam(Name x, Term dom, Term body, Term body_ann) {
  return Term::make({Lam{std::move(x), std::move(dom), std::move(body), std::move(body_ann)}});
}
Term app(Term fn, Term arg, Term dom_ann, Name x, Term cod_ann) {
  return Term::make(
      {App{std::move(fn), std::move(arg), std::move(dom_ann), std::move(x), std::move(cod_ann)}});
}
Term sigma(Name x, Term dom, Term cod) {
  return Term::make({Sigma{std::move(x), std::move(dom), std::move(cod)}});
}
Term pair(Term first, Term second, Name x, Term second_ann) {
  return Term::make(
      {MkPair{std::move(first), std::move(second), std::move(x), std::move(second_ann)}});
}
Term fst(Term p, Term dom_ann, Name x, Term cod_ann) {
  return Term::make({Fst{std::move(p), std::move(dom_ann), std::move(x), std::move(cod_ann)}});
}
Term snd(Term p, Term dom_ann, Name x, Term cod_ann) {
  return Term::make({Snd{std::move(p), std::move(dom_ann), std::move(x), std::move(cod_ann)}});
}
Term id(Term ann, Term lhs, Term rhs) {
  return Term::make({IdType{std::move(ann), std::move(lhs), std::move(rhs)}});
}
Term refl(Term ann, Term value) { return Term::make({Refl{std::move(ann), std::move(value)}}); }
Term j(Term ann, Term from, Term to, Term path, Name x, Name p, Term motive, Term base) {
  return Term::make({JElim{std::move(ann), std::move(from), std::move(to), std::move(path),
                           std::move(x), std::move(p), std::move(motive), std::move(base)}});
}
Term unit() { return Term::make({UnitType{}}); }
Term tt() { return Term::make({TtTerm{}}); }
Term univ() { return Term::make({UnivType{}}); }
Term pb() { return Term::make({PBType{}}); }
}  // namespace tm

Scope domain(const RawContext& ctx) {
  Scope out;
  out.reserve(ctx.size());
  for (const auto& e : ctx) out.push_back(e.name);
  return out;
}

NameSet domain_set(const RawContext& ctx) {
  NameSet out;
  for (const auto& e : ctx) out.insert(e.name);
  return out;
}

RawContext concat(const RawContext& ctx, const Telescope& tele) {
  RawContext out = ctx;
  out.insert(out.end(), tele.begin(), tele.end());
  return out;
}

namespace {

void collect_free(const Term& t, NameSet& bound, NameSet& out) {
  std::visit(
      overloaded{
          [&](const Var& v) {
            if (!bound.count(v.name)) out.insert(v.name);
          },
          [&](const MarkedVar& v) {
            if (!bound.count(v.name)) out.insert(v.name);
          },
          [&](const NatType& n) { collect_free(n.body, bound, out); },
          [&](const NatIntro& n) {
            collect_free(n.body, bound, out);
            collect_free(n.ann, bound, out);
          },
          [&](const NatElim& n) {
            collect_free(n.scrut, bound, out);
            collect_free(n.ann, bound, out);
          },
          [&](const Pi& n) {
            collect_free(n.dom, bound, out);
            bool fresh = bound.insert(n.var).second;
            collect_free(n.cod, bound, out);
            if (fresh) bound.erase(n.var);
          },
          [&](const Lam& n) {
            collect_free(n.dom, bound, out);
            bool fresh = bound.insert(n.var).second;
            collect_free(n.body, bound, out);
            collect_free(n.body_ann, bound, out);
            if (fresh) bound.erase(n.var);
          },
          [&](const App& n) {
            collect_free(n.fn, bound, out);
            collect_free(n.arg, bound, out);
            collect_free(n.dom_ann, bound, out);
            bool fresh = bound.insert(n.var).second;
            collect_free(n.cod_ann, bound, out);
            if (fresh) bound.erase(n.var);
          },
          [&](const Sigma& n) {
            collect_free(n.dom, bound, out);
            bool fresh = bound.insert(n.var).second;
            collect_free(n.cod, bound, out);
            if (fresh) bound.erase(n.var);
          },
          [&](const MkPair& n) {
            collect_free(n.first, bound, out);
            collect_free(n.second, bound, out);
            bool fresh = bound.insert(n.var).second;
            collect_free(n.second_ann, bound, out);
            if (fresh) bound.erase(n.var);
          },
          [&](const Fst& n) {
            collect_free(n.pair, bound, out);
            collect_free(n.dom_ann, bound, out);
            bool fresh = bound.insert(n.var).second;
            collect_free(n.cod_ann, bound, out);
            if (fresh) bound.erase(n.var);
          },
          [&](const Snd& n) {
            collect_free(n.pair, bound, out);
            collect_free(n.dom_ann, bound, out);
            bool fresh = bound.insert(n.var).second;
            collect_free(n.cod_ann, bound, out);
            if (fresh) bound.erase(n.var);
          },
          [&](const IdType& n) {
            collect_free(n.ann, bound, out);
            collect_free(n.lhs, bound, out);
            collect_free(n.rhs, bound, out);
          },
          [&](const Refl& n) {
            collect_free(n.ann, bound, out);
            collect_free(n.value, bound, out);
          },
          [&](const JElim& n) {
            collect_free(n.ann, bound, out);
            collect_free(n.from, bound, out);
            collect_free(n.to, bound, out);
            collect_free(n.path, bound, out);
            collect_free(n.base, bound, out);
            bool fx = bound.insert(n.motive_var).second;
            bool fp = bound.insert(n.path_var).second;
            collect_free(n.motive, bound, out);
            if (fp) bound.erase(n.path_var);
            if (fx) bound.erase(n.motive_var);
          },
          [&](const UnitType&) {},
          [&](const TtTerm&) {},
          [&](const UnivType&) {},
          [&](const PBType&) {},
      },
      t.node().v);
}

}  // namespace

NameSet free_vars(const Term& t) {
  NameSet bound, out;
  collect_free(t, bound, out);
  return out;
}

Name fresh_name(const Name& hint, const NameSet& avoid) {
  // strip a numeric suffix so x3 freshens to x4 rather than x31
  Name base = hint;
  while (!base.empty() && base.size() > 1 && std::isdigit(static_cast<unsigned char>(base.back())))
    base.pop_back();
  if (base.empty()) base = "x";
  if (!avoid.count(hint)) return hint;
  for (int i = 1;; ++i) {
    Name cand = base + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

Term zero_term(const Term& t, const NameSet& over) {
  auto without = [](NameSet s, std::initializer_list<Name> names) {
    for (const auto& n : names) s.erase(n);
    return s;
  };
  return std::visit(
      overloaded{
          [&](const Var& v) { return over.count(v.name) ? tm::marked(v.name) : Term(t); },
          [&](const MarkedVar&) { return t; },
          [&](const NatType& n) { return tm::nat(zero_term(n.body, over)); },
          [&](const NatIntro& n) {
            return tm::up(zero_term(n.body, over), zero_term(n.ann, over));
          },
          [&](const NatElim& n) {
            return tm::dn(zero_term(n.scrut, over), zero_term(n.ann, over));
          },
          [&](const Pi& n) {
            return tm::pi(n.var, zero_term(n.dom, over), zero_term(n.cod, without(over, {n.var})));
          },
          [&](const Lam& n) {
            NameSet inner = without(over, {n.var});
            return tm::lam(n.var, zero_term(n.dom, over), zero_term(n.body, inner),
                           zero_term(n.body_ann, inner));
          },
          [&](const App& n) {
            return tm::app(zero_term(n.fn, over), zero_term(n.arg, over),
                           zero_term(n.dom_ann, over), n.var,
                           zero_term(n.cod_ann, without(over, {n.var})));
          },
          [&](const Sigma& n) {
            return tm::sigma(n.var, zero_term(n.dom, over),
                             zero_term(n.cod, without(over, {n.var})));
          },
          [&](const MkPair& n) {
            return tm::pair(zero_term(n.first, over), zero_term(n.second, over), n.var,
                            zero_term(n.second_ann, without(over, {n.var})));
          },
          [&](const Fst& n) {
            return tm::fst(zero_term(n.pair, over), zero_term(n.dom_ann, over), n.var,
                           zero_term(n.cod_ann, without(over, {n.var})));
          },
          [&](const Snd& n) {
            return tm::snd(zero_term(n.pair, over), zero_term(n.dom_ann, over), n.var,
                           zero_term(n.cod_ann, without(over, {n.var})));
          },
          [&](const IdType& n) {
            return tm::id(zero_term(n.ann, over), zero_term(n.lhs, over),
                          zero_term(n.rhs, over));
          },
          [&](const Refl& n) {
            return tm::refl(zero_term(n.ann, over), zero_term(n.value, over));
          },
          [&](const JElim& n) {
            NameSet inner = without(over, {n.motive_var, n.path_var});
            return tm::j(zero_term(n.ann, over), zero_term(n.from, over),
                         zero_term(n.to, over), zero_term(n.path, over), n.motive_var,
                         n.path_var, zero_term(n.motive, inner), zero_term(n.base, over));
          },
          [&](const UnitType&) { return t; },
          [&](const TtTerm&) { return t; },
          [&](const UnivType&) { return t; },
          [&](const PBType&) { return t; },
      },
      t.node().v);
}

Term zero_all(const Term& t) { return zero_term(t, free_vars(t)); }

RawContext zero_context(const RawContext& ctx) {
  RawContext out;
  out.reserve(ctx.size());
  NameSet scope;
  for (const auto& e : ctx) {
    if (e.marked) {
      out.push_back(e);
    } else {
      out.push_back({e.name, true, zero_term(e.type, scope)});
    }
    scope.insert(e.name);
  }
  return out;
}

Telescope zero_telescope(const Telescope& tele, const NameSet& over) {
  Telescope out;
  out.reserve(tele.size());
  for (const auto& e : tele) {
    if (e.marked) {
      out.push_back(e);
    } else {
      out.push_back({e.name, false, zero_term(e.type, over)});
    }
  }
  return out;
}

Telescope zero_telescope_all(const Telescope& tele, const Scope& outer) {
  Telescope out;
  out.reserve(tele.size());
  NameSet scope(outer.begin(), outer.end());
  for (const auto& e : tele) {
    if (e.marked) {
      out.push_back(e);
    } else {
      out.push_back({e.name, true, zero_term(e.type, scope)});
    }
    scope.insert(e.name);
  }
  return out;
}

namespace {

// Renames a binder so that substitution can go under it without capture.
struct BinderRename {
  Name name;
  bool renamed = false;
  Term apply(const Term& body) const {
    if (!renamed) return body;
    return substitute(body, tm::var(name), original);
  }
  Name original;
};

BinderRename plan_rename(const Name& bvar, const NameSet& repl_free, const Name& target,
                         std::initializer_list<const Term*> bodies,
                         std::initializer_list<Name> also_avoid = {}) {
  BinderRename r{bvar, false, bvar};
  if (bvar == target || !repl_free.count(bvar)) return r;
  NameSet avoid = repl_free;
  avoid.insert(target);
  for (const Name& n : also_avoid) avoid.insert(n);
  for (const Term* b : bodies) {
    NameSet f = free_vars(*b);
    avoid.insert(f.begin(), f.end());
  }
  r.name = fresh_name(bvar, avoid);
  r.renamed = true;
  return r;
}

}  // namespace

Term substitute(const Term& body, const Term& replacement, const Name& target) {
  NameSet repl_free = free_vars(replacement);
  auto go = [&](const Term& t, auto&& self) -> Term {
    auto rec = [&](const Term& s) { return self(s, self); };
    // substitute under one binder, renaming it when it would capture
    auto under = [&](const Name& bvar, const Term& sub,
                     std::initializer_list<const Term*> siblings) -> std::pair<Name, Term> {
      if (bvar == target) return {bvar, sub};
      BinderRename r = plan_rename(bvar, repl_free, target, siblings);
      return {r.name, rec(r.apply(sub))};
    };
    return std::visit(
        overloaded{
            [&](const Var& v) { return v.name == target ? replacement : t; },
            [&](const MarkedVar& v) {
              return v.name == target ? zero_all(replacement) : t;
            },
            [&](const NatType& n) { return tm::nat(rec(n.body)); },
            [&](const NatIntro& n) { return tm::up(rec(n.body), rec(n.ann)); },
            [&](const NatElim& n) { return tm::dn(rec(n.scrut), rec(n.ann)); },
            [&](const Pi& n) {
              auto [x, cod] = under(n.var, n.cod, {&n.cod});
              return tm::pi(x, rec(n.dom), cod);
            },
            [&](const Lam& n) {
              if (n.var == target) return tm::lam(n.var, rec(n.dom), n.body, n.body_ann);
              BinderRename r = plan_rename(n.var, repl_free, target, {&n.body, &n.body_ann});
              return tm::lam(r.name, rec(n.dom), rec(r.apply(n.body)), rec(r.apply(n.body_ann)));
            },
            [&](const App& n) {
              auto [x, cod] = under(n.var, n.cod_ann, {&n.cod_ann});
              return tm::app(rec(n.fn), rec(n.arg), rec(n.dom_ann), x, cod);
            },
            [&](const Sigma& n) {
              auto [x, cod] = under(n.var, n.cod, {&n.cod});
              return tm::sigma(x, rec(n.dom), cod);
            },
            [&](const MkPair& n) {
              auto [x, ann] = under(n.var, n.second_ann, {&n.second_ann});
              return tm::pair(rec(n.first), rec(n.second), x, ann);
            },
            [&](const Fst& n) {
              auto [x, cod] = under(n.var, n.cod_ann, {&n.cod_ann});
              return tm::fst(rec(n.pair), rec(n.dom_ann), x, cod);
            },
            [&](const Snd& n) {
              auto [x, cod] = under(n.var, n.cod_ann, {&n.cod_ann});
              return tm::snd(rec(n.pair), rec(n.dom_ann), x, cod);
            },
            [&](const IdType& n) { return tm::id(rec(n.ann), rec(n.lhs), rec(n.rhs)); },
            [&](const Refl& n) { return tm::refl(rec(n.ann), rec(n.value)); },
            [&](const JElim& n) {
              Term motive = n.motive;
              Name mx = n.motive_var;
              Name mp = n.path_var;
              if (mx != target && mp != target) {
                BinderRename rx = plan_rename(mx, repl_free, target, {&motive}, {mp});
                if (rx.renamed) {
                  motive = rx.apply(motive);
                  mx = rx.name;
                }
                BinderRename rp = plan_rename(mp, repl_free, target, {&motive}, {mx});
                if (rp.renamed) {
                  motive = rp.apply(motive);
                  mp = rp.name;
                }
                motive = rec(motive);
              }
              // otherwise the target is shadowed by a motive binder
              return tm::j(rec(n.ann), rec(n.from), rec(n.to), rec(n.path), mx, mp, motive,
                           rec(n.base));
            },
            [&](const UnitType&) { return t; },
            [&](const TtTerm&) { return t; },
            [&](const UnivType&) { return t; },
            [&](const PBType&) { return t; },
        },
        t.node().v);
  };
  return go(body, go);
}

namespace {

int bound_index(const std::vector<Name>& binders, const Name& n) {
  for (int i = static_cast<int>(binders.size()) - 1; i >= 0; --i)
    if (binders[static_cast<size_t>(i)] == n) return i;
  return -1;
}

bool alpha_rec(const Term& a, const Term& b, std::vector<Name>& ba, std::vector<Name>& bb) {
  const Node& na = a.node();
  const Node& nb = b.node();
  if (na.v.index() != nb.v.index()) return false;
  auto names_eq = [&](const Name& x, const Name& y) {
    int ia = bound_index(ba, x);
    int ib = bound_index(bb, y);
    if (ia != ib) return false;
    return ia >= 0 || x == y;
  };
  auto under = [&](const Name& x, const Name& y, auto&& fn) {
    ba.push_back(x);
    bb.push_back(y);
    bool ok = fn();
    ba.pop_back();
    bb.pop_back();
    return ok;
  };
  auto eq = [&](const Term& x, const Term& y) { return alpha_rec(x, y, ba, bb); };
  return std::visit(
      overloaded{
          [&](const Var& x) { return names_eq(x.name, std::get<Var>(nb.v).name); },
          [&](const MarkedVar& x) { return names_eq(x.name, std::get<MarkedVar>(nb.v).name); },
          [&](const NatType& x) { return eq(x.body, std::get<NatType>(nb.v).body); },
          [&](const NatIntro& x) {
            const auto& y = std::get<NatIntro>(nb.v);
            return eq(x.body, y.body) && eq(x.ann, y.ann);
          },
          [&](const NatElim& x) {
            const auto& y = std::get<NatElim>(nb.v);
            return eq(x.scrut, y.scrut) && eq(x.ann, y.ann);
          },
          [&](const Pi& x) {
            const auto& y = std::get<Pi>(nb.v);
            return eq(x.dom, y.dom) &&
                   under(x.var, y.var, [&] { return eq(x.cod, y.cod); });
          },
          [&](const Lam& x) {
            const auto& y = std::get<Lam>(nb.v);
            return eq(x.dom, y.dom) && under(x.var, y.var, [&] {
                     return eq(x.body, y.body) && eq(x.body_ann, y.body_ann);
                   });
          },
          [&](const App& x) {
            const auto& y = std::get<App>(nb.v);
            return eq(x.fn, y.fn) && eq(x.arg, y.arg) && eq(x.dom_ann, y.dom_ann) &&
                   under(x.var, y.var, [&] { return eq(x.cod_ann, y.cod_ann); });
          },
          [&](const Sigma& x) {
            const auto& y = std::get<Sigma>(nb.v);
            return eq(x.dom, y.dom) &&
                   under(x.var, y.var, [&] { return eq(x.cod, y.cod); });
          },
          [&](const MkPair& x) {
            const auto& y = std::get<MkPair>(nb.v);
            return eq(x.first, y.first) && eq(x.second, y.second) &&
                   under(x.var, y.var, [&] { return eq(x.second_ann, y.second_ann); });
          },
          [&](const Fst& x) {
            const auto& y = std::get<Fst>(nb.v);
            return eq(x.pair, y.pair) && eq(x.dom_ann, y.dom_ann) &&
                   under(x.var, y.var, [&] { return eq(x.cod_ann, y.cod_ann); });
          },
          [&](const Snd& x) {
            const auto& y = std::get<Snd>(nb.v);
            return eq(x.pair, y.pair) && eq(x.dom_ann, y.dom_ann) &&
                   under(x.var, y.var, [&] { return eq(x.cod_ann, y.cod_ann); });
          },
          [&](const IdType& x) {
            const auto& y = std::get<IdType>(nb.v);
            return eq(x.ann, y.ann) && eq(x.lhs, y.lhs) && eq(x.rhs, y.rhs);
          },
          [&](const Refl& x) {
            const auto& y = std::get<Refl>(nb.v);
            return eq(x.ann, y.ann) && eq(x.value, y.value);
          },
          [&](const JElim& x) {
            const auto& y = std::get<JElim>(nb.v);
            if (!(eq(x.ann, y.ann) && eq(x.from, y.from) && eq(x.to, y.to) &&
                  eq(x.path, y.path) && eq(x.base, y.base)))
              return false;
            return under(x.motive_var, y.motive_var, [&] {
              return under(x.path_var, y.path_var, [&] { return eq(x.motive, y.motive); });
            });
          },
          [&](const UnitType&) { return true; },
          [&](const TtTerm&) { return true; },
          [&](const UnivType&) { return true; },
          [&](const PBType&) { return true; },
      },
      na.v);
}

}  // namespace

bool alpha_eq(const Term& a, const Term& b) {
  std::vector<Name> ba, bb;
  return alpha_rec(a, b, ba, bb);
}

bool alpha_eq_context(const RawContext& a, const RawContext& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].marked != b[i].marked) return false;
    if (!alpha_eq(a[i].type, b[i].type)) return false;
  }
  return true;
}

namespace {

void write_term(std::ostringstream& os, const Term& t) {
  std::visit(
      overloaded{
          [&](const Var& n) { os << n.name; },
          [&](const MarkedVar& n) { os << "~" << n.name; },
          [&](const NatType& n) {
            os << "(nat ";
            write_term(os, n.body);
            os << ")";
          },
          [&](const NatIntro& n) {
            os << "(up ";
            write_term(os, n.body);
            os << " : ";
            write_term(os, n.ann);
            os << ")";
          },
          [&](const NatElim& n) {
            os << "(dn ";
            write_term(os, n.scrut);
            os << " : ";
            write_term(os, n.ann);
            os << ")";
          },
          [&](const Pi& n) {
            os << "(pi " << n.var << " ";
            write_term(os, n.dom);
            os << " ";
            write_term(os, n.cod);
            os << ")";
          },
          [&](const Lam& n) {
            os << "(lam " << n.var << " ";
            write_term(os, n.dom);
            os << " ";
            write_term(os, n.body);
            os << " : ";
            write_term(os, n.body_ann);
            os << ")";
          },
          [&](const App& n) {
            os << "(app ";
            write_term(os, n.fn);
            os << " ";
            write_term(os, n.arg);
            os << " {";
            write_term(os, n.dom_ann);
            os << " " << n.var << ".";
            write_term(os, n.cod_ann);
            os << "})";
          },
          [&](const Sigma& n) {
            os << "(sig " << n.var << " ";
            write_term(os, n.dom);
            os << " ";
            write_term(os, n.cod);
            os << ")";
          },
          [&](const MkPair& n) {
            os << "(pair ";
            write_term(os, n.first);
            os << " ";
            write_term(os, n.second);
            os << ")";
          },
          [&](const Fst& n) {
            os << "(fst ";
            write_term(os, n.pair);
            os << ")";
          },
          [&](const Snd& n) {
            os << "(snd ";
            write_term(os, n.pair);
            os << ")";
          },
          [&](const IdType& n) {
            os << "(id ";
            write_term(os, n.ann);
            os << " ";
            write_term(os, n.lhs);
            os << " ";
            write_term(os, n.rhs);
            os << ")";
          },
          [&](const Refl& n) {
            os << "(refl ";
            write_term(os, n.value);
            os << ")";
          },
          [&](const JElim& n) {
            os << "(j " << n.motive_var << " " << n.path_var << " ";
            write_term(os, n.motive);
            os << " ";
            write_term(os, n.base);
            os << " ";
            write_term(os, n.path);
            os << ")";
          },
          [&](const UnitType&) { os << "Unit"; },
          [&](const TtTerm&) { os << "tt"; },
          [&](const UnivType&) { os << "Type"; },
          [&](const PBType&) { os << "PB"; },
      },
      t.node().v);
}

}  // namespace

std::string debug_string(const Term& t) {
  std::ostringstream os;
  write_term(os, t);
  return os.str();
}

std::string debug_string(const RawContext& ctx) {
  std::ostringstream os;
  bool first = true;
  for (const auto& e : ctx) {
    if (!first) os << ", ";
    first = false;
    os << (e.marked ? "~" : "") << e.name << (e.marked ? " :: " : " : ");
    write_term(os, e.type);
  }
  return os.str();
}

}  // namespace natt
