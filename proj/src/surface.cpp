#include "natt/surface.hpp"

#include <cctype>
#include <map>
#include <sstream>

namespace natt {

// ----------------------------------------------------------------------------
// Lexer
// ----------------------------------------------------------------------------

namespace {

enum class Tok {
  Ident, KwDef, KwPostulate, KwCheck, KwEq, KwModelEq, KwFun, KwPi, KwSig, KwLet,
  KwUp, KwDn, KwIn, KwFst, KwSnd, KwId, KwRefl, KwUnit, KwTt, KwType, KwPB,
  KwNatural, KwJelim,
  Colon, ColonColon, Assign, Semi, Comma, FatArrow, Arrow, EqEq, Equal,
  LParen, RParen, Tilde, PercentParen, Eof
};

struct Token {
  Tok kind;
  std::string text;
  int line = 1;
  int col = 1;
};

const std::map<std::string, Tok> kKeywords = {
    {"def", Tok::KwDef},       {"postulate", Tok::KwPostulate},
    {"check", Tok::KwCheck},   {"eq", Tok::KwEq},
    {"modeleq", Tok::KwModelEq}, {"fun", Tok::KwFun},
    {"Pi", Tok::KwPi},         {"Sig", Tok::KwSig},
    {"let", Tok::KwLet},       {"up", Tok::KwUp},
    {"dn", Tok::KwDn},         {"in", Tok::KwIn},
    {"fst", Tok::KwFst},       {"snd", Tok::KwSnd},
    {"Id", Tok::KwId},         {"refl", Tok::KwRefl},
    {"Unit", Tok::KwUnit},     {"tt", Tok::KwTt},
    {"Type", Tok::KwType},     {"PB", Tok::KwPB},
    {"natural", Tok::KwNatural}, {"jelim", Tok::KwJelim},
};

[[noreturn]] void parse_fail(const std::string& file, int line, int col, const std::string& msg) {
  Diagnostic d{"parse", msg};
  d.span = Span{file, line, col};
  throw TypeError(std::move(d));
}

struct Lexer {
  const std::string& src;
  const std::string& file;
  size_t pos = 0;
  int line = 1, col = 1;

  char peek(size_t k = 0) const { return pos + k < src.size() ? src[pos + k] : '\0'; }
  void advance() {
    if (peek() == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      while (true) {
        if (std::isspace(static_cast<unsigned char>(peek()))) {
          advance();
        } else if (peek() == '-' && peek(1) == '-') {
          while (peek() != '\n' && peek() != '\0') advance();
        } else {
          break;
        }
      }
      if (pos >= src.size()) {
        out.push_back({Tok::Eof, "", line, col});
        return out;
      }
      int l = line, c = col;
      char ch = peek();
      auto push = [&](Tok k, std::string text, int chars) {
        for (int i = 0; i < chars; ++i) advance();
        out.push_back({k, std::move(text), l, c});
      };
      if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        std::string id;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
               peek() == '\'') {
          id.push_back(peek());
          advance();
        }
        auto kw = kKeywords.find(id);
        out.push_back({kw == kKeywords.end() ? Tok::Ident : kw->second, id, l, c});
        continue;
      }
      switch (ch) {
        case ':':
          if (peek(1) == '=') { push(Tok::Assign, ":=", 2); break; }
          if (peek(1) == ':') { push(Tok::ColonColon, "::", 2); break; }
          push(Tok::Colon, ":", 1);
          break;
        case ';': push(Tok::Semi, ";", 1); break;
        case ',': push(Tok::Comma, ",", 1); break;
        case '=':
          if (peek(1) == '>') { push(Tok::FatArrow, "=>", 2); break; }
          if (peek(1) == '=') { push(Tok::EqEq, "==", 2); break; }
          push(Tok::Equal, "=", 1);
          break;
        case '-':
          if (peek(1) == '>') { push(Tok::Arrow, "->", 2); break; }
          parse_fail(file, l, c, "stray '-'");
        case '(': push(Tok::LParen, "(", 1); break;
        case ')': push(Tok::RParen, ")", 1); break;
        case '~': push(Tok::Tilde, "~", 1); break;
        case '%':
          if (peek(1) == '(') { push(Tok::PercentParen, "%(", 2); break; }
          parse_fail(file, l, c, "'%' must be followed by '('");
        default:
          parse_fail(file, l, c, std::string("unexpected character '") + ch + "'");
      }
    }
  }
};

// ----------------------------------------------------------------------------
// Parser
// ----------------------------------------------------------------------------

SPtr snode(STerm t) { return std::make_shared<const STerm>(std::move(t)); }

struct Parser {
  std::vector<Token> toks;
  size_t at = 0;
  std::string file;

  const Token& cur() const { return toks[at]; }
  Token next() { return toks[at++]; }
  bool is(Tok k) const { return cur().kind == k; }
  Span here() const { return Span{file, cur().line, cur().col}; }

  Token expect(Tok k, const char* what) {
    if (!is(k))
      parse_fail(file, cur().line, cur().col,
                 std::string("expected ") + what + ", found '" + cur().text + "'");
    return next();
  }

  std::string expect_ident() {
    if (!is(Tok::Ident))
      parse_fail(file, cur().line, cur().col,
                 cur().kind == Tok::Eof
                     ? "expected identifier"
                     : "expected identifier, found '" + cur().text +
                           "' (reserved words cannot be identifiers)");
    return next().text;
  }

  SourceFile parse_file() {
    SourceFile out;
    out.filename = file;
    while (!is(Tok::Eof)) out.decls.push_back(parse_decl());
    return out;
  }

  Decl parse_decl() {
    Span sp = here();
    if (is(Tok::KwDef)) {
      next();
      Decl d{Decl::Kind::Def, expect_ident(), nullptr, nullptr, nullptr, sp};
      expect(Tok::Colon, "':'");
      d.type = parse_term();
      expect(Tok::Assign, "':='");
      d.body = parse_term();
      expect(Tok::Semi, "';'");
      return d;
    }
    if (is(Tok::KwPostulate)) {
      next();
      Decl d{Decl::Kind::Postulate, expect_ident(), nullptr, nullptr, nullptr, sp};
      expect(Tok::Colon, "':'");
      d.type = parse_term();
      expect(Tok::Semi, "';'");
      return d;
    }
    if (is(Tok::KwCheck)) {
      next();
      Decl d{Decl::Kind::Check, "", nullptr, nullptr, nullptr, sp};
      d.body = parse_term();
      expect(Tok::Colon, "':'");
      d.type = parse_term();
      expect(Tok::Semi, "';'");
      return d;
    }
    if (is(Tok::KwEq) || is(Tok::KwModelEq)) {
      bool model = is(Tok::KwModelEq);
      next();
      Decl d{model ? Decl::Kind::ModelEq : Decl::Kind::Eq, "", nullptr, nullptr, nullptr, sp};
      d.body = parse_term();
      expect(Tok::EqEq, "'=='");
      d.rhs = parse_term();
      expect(Tok::Colon, "':'");
      d.type = parse_term();
      expect(Tok::Semi, "';'");
      return d;
    }
    parse_fail(file, sp.line, sp.col,
               "expected a declaration (def, postulate, check, eq, modeleq)");
  }

  SBinder parse_binder() {
    Span sp = here();
    expect(Tok::LParen, "'('");
    bool tilde = false;
    if (is(Tok::Tilde)) {
      tilde = true;
      next();
    }
    SBinder b;
    b.span = sp;
    b.name = expect_ident();
    bool dcolon = is(Tok::ColonColon);
    if (!dcolon && !is(Tok::Colon))
      parse_fail(file, cur().line, cur().col, "expected ':' or '::' in binder");
    next();
    if (tilde != dcolon)
      parse_fail(file, sp.line, sp.col, "marked binders are written '(~x :: A)'");
    b.marked = tilde;
    b.type = parse_term();
    expect(Tok::RParen, "')'");
    return b;
  }

  bool starts_atom() const {
    switch (cur().kind) {
      case Tok::Ident: case Tok::Tilde: case Tok::PercentParen: case Tok::LParen:
      case Tok::KwUp: case Tok::KwDn: case Tok::KwFst: case Tok::KwSnd: case Tok::KwId:
      case Tok::KwRefl: case Tok::KwUnit: case Tok::KwTt: case Tok::KwType: case Tok::KwPB:
      case Tok::KwNatural: case Tok::KwJelim:
        return true;
      default:
        return false;
    }
  }

  SPtr parse_term() {
    Span sp = here();
    if (is(Tok::KwFun)) {
      next();
      SFun fn;
      fn.binders.push_back(parse_binder());
      while (is(Tok::LParen)) fn.binders.push_back(parse_binder());
      expect(Tok::FatArrow, "'=>'");
      fn.body = parse_term();
      return snode({std::move(fn), sp});
    }
    if (is(Tok::KwPi)) {
      next();
      SPi pi{parse_binder(), nullptr};
      expect(Tok::Comma, "','");
      pi.body = parse_term();
      return snode({std::move(pi), sp});
    }
    if (is(Tok::KwSig)) {
      next();
      SSig sg{parse_binder(), nullptr};
      expect(Tok::Comma, "','");
      sg.body = parse_term();
      return snode({std::move(sg), sp});
    }
    if (is(Tok::KwLet)) {
      next();
      expect(Tok::KwUp, "'up'");
      expect(Tok::LParen, "'('");
      expect(Tok::Tilde, "'~'");
      SLetFlat lf;
      lf.name = expect_ident();
      expect(Tok::RParen, "')'");
      expect(Tok::Equal, "'='");
      lf.value = parse_term();
      expect(Tok::KwIn, "'in'");
      lf.body = parse_term();
      return snode({std::move(lf), sp});
    }
    SPtr t = parse_app();
    if (is(Tok::Arrow)) {
      next();
      SPtr cod = parse_term();
      return snode({SArrow{t, cod}, sp});
    }
    return t;
  }

  SPtr parse_app() {
    Span sp = here();
    SPtr t = parse_atom();
    while (starts_atom()) {
      SPtr arg = parse_atom();
      t = snode({SApp{t, arg}, sp});
    }
    return t;
  }

  SPtr parse_atom() {
    Span sp = here();
    switch (cur().kind) {
      case Tok::Ident:
        return snode({SVar{next().text}, sp});
      case Tok::Tilde: {
        next();
        return snode({SMarked{expect_ident()}, sp});
      }
      case Tok::PercentParen: {
        next();
        SPtr t = parse_term();
        expect(Tok::RParen, "')'");
        return snode({SNat{t}, sp});
      }
      case Tok::KwNatural: {
        next();
        return snode({SNat{parse_atom()}, sp});
      }
      case Tok::KwUp: {
        next();
        expect(Tok::LParen, "'('");
        SPtr t = parse_term();
        expect(Tok::RParen, "')'");
        return snode({SUp{t}, sp});
      }
      case Tok::KwDn: {
        next();
        expect(Tok::LParen, "'('");
        SPtr t = parse_term();
        expect(Tok::RParen, "')'");
        return snode({SDn{t}, sp});
      }
      case Tok::LParen: {
        next();
        SPtr t = parse_term();
        if (is(Tok::Comma)) {
          next();
          SPtr s = parse_term();
          expect(Tok::RParen, "')'");
          return snode({SPair{t, s}, sp});
        }
        expect(Tok::RParen, "')'");
        return t;
      }
      case Tok::KwFst: {
        next();
        return snode({SFst{parse_atom()}, sp});
      }
      case Tok::KwSnd: {
        next();
        return snode({SSnd{parse_atom()}, sp});
      }
      case Tok::KwId: {
        next();
        SPtr a = parse_atom();
        SPtr l = parse_atom();
        SPtr r = parse_atom();
        return snode({SId{a, l, r}, sp});
      }
      case Tok::KwJelim: {
        next();
        expect(Tok::LParen, "'('");
        SJ j;
        j.motive_var = expect_ident();
        expect(Tok::Comma, "','");
        j.path_var = expect_ident();
        expect(Tok::Comma, "','");
        j.motive = parse_term();
        expect(Tok::Comma, "','");
        j.base = parse_term();
        expect(Tok::Comma, "','");
        j.path = parse_term();
        expect(Tok::RParen, "')'");
        return snode({std::move(j), sp});
      }
      case Tok::KwRefl: next(); return snode({SRefl{}, sp});
      case Tok::KwUnit: next(); return snode({SUnit{}, sp});
      case Tok::KwTt: next(); return snode({STt{}, sp});
      case Tok::KwType: next(); return snode({SType{}, sp});
      case Tok::KwPB: next(); return snode({SPB{}, sp});
      default:
        parse_fail(file, sp.line, sp.col, "expected a term, found '" + cur().text + "'");
    }
  }
};

}  // namespace

SourceFile parse(const std::string& text, const std::string& filename) {
  Lexer lex{text, filename};
  Parser p{lex.run(), 0, filename};
  return p.parse_file();
}

// ----------------------------------------------------------------------------
// Elaboration
// ----------------------------------------------------------------------------

namespace {

// Binders get fresh kernel names when they would shadow; surface names are
// resolved through this stack.
thread_local std::vector<std::pair<Name, Name>>* g_renames = nullptr;

struct RenameScope {
  std::vector<std::pair<Name, Name>> storage;
  std::vector<std::pair<Name, Name>>* prev;
  bool owner = false;
  RenameScope() : prev(g_renames) {
    if (!g_renames) {
      g_renames = &storage;
      owner = true;
    }
  }
  ~RenameScope() {
    if (owner) g_renames = prev;
  }
};

std::optional<Name> lookup_rename(const Name& surface) {
  if (!g_renames) return std::nullopt;
  for (auto it = g_renames->rbegin(); it != g_renames->rend(); ++it)
    if (it->first == surface) return it->second;
  return std::nullopt;
}

struct BinderPush {
  BinderPush(Name surface, Name kernel) {
    g_renames->push_back({std::move(surface), std::move(kernel)});
  }
  ~BinderPush() { g_renames->pop_back(); }
};

// every identifier occurring in a surface term, for freshness decisions
void surface_idents(const SPtr& s, NameSet& out) {
  if (!s) return;
  std::visit(
      overloaded{
          [&](const SVar& n) { out.insert(n.name); },
          [&](const SMarked& n) { out.insert(n.name); },
          [&](const SNat& n) { surface_idents(n.body, out); },
          [&](const SUp& n) { surface_idents(n.body, out); },
          [&](const SDn& n) { surface_idents(n.body, out); },
          [&](const SFun& n) {
            for (const auto& b : n.binders) {
              out.insert(b.name);
              surface_idents(b.type, out);
            }
            surface_idents(n.body, out);
          },
          [&](const SPi& n) {
            out.insert(n.binder.name);
            surface_idents(n.binder.type, out);
            surface_idents(n.body, out);
          },
          [&](const SSig& n) {
            out.insert(n.binder.name);
            surface_idents(n.binder.type, out);
            surface_idents(n.body, out);
          },
          [&](const SArrow& n) {
            surface_idents(n.dom, out);
            surface_idents(n.cod, out);
          },
          [&](const SLetFlat& n) {
            out.insert(n.name);
            surface_idents(n.value, out);
            surface_idents(n.body, out);
          },
          [&](const SApp& n) {
            surface_idents(n.fn, out);
            surface_idents(n.arg, out);
          },
          [&](const SPair& n) {
            surface_idents(n.first, out);
            surface_idents(n.second, out);
          },
          [&](const SFst& n) { surface_idents(n.arg, out); },
          [&](const SSnd& n) { surface_idents(n.arg, out); },
          [&](const SId& n) {
            surface_idents(n.type, out);
            surface_idents(n.lhs, out);
            surface_idents(n.rhs, out);
          },
          [&](const SJ& n) {
            out.insert(n.motive_var);
            out.insert(n.path_var);
            surface_idents(n.motive, out);
            surface_idents(n.base, out);
            surface_idents(n.path, out);
          },
          [&](const auto&) {},
      },
      s->node);
}

}  // namespace

NameSet Elaborator::scope_avoid(const RawContext& env) const {
  NameSet s = domain_set(env);
  for (const auto& g : checker_.globals().all()) s.insert(g.name);
  return s;
}

Term Elaborator::elab_pi(const RawContext& env, const SBinder& binder, const SPtr& body) {
  if (!binder.marked) {
    Term dom = check_is_type(env, binder.type);
    Name x = fresh_name(binder.name, scope_avoid(env));
    RawContext env2 = env;
    env2.push_back({x, false, dom});
    BinderPush push(binder.name, x);
    Term cod = check_is_type(env2, body);
    return tm::pi(x, dom, cod);
  }
  // dull Pi: (~x :: A) is a plain binder of the natural type in disguise
  Term dom = check_is_type(zero_context(env), binder.type);
  Name x = fresh_name(binder.name, scope_avoid(env));
  RawContext env2 = env;
  env2.push_back({x, true, dom});
  Term cod;
  {
    BinderPush push(binder.name, x);
    cod = check_is_type(env2, body);
  }
  NameSet avoid = scope_avoid(env);
  avoid.merge(free_vars(cod));
  avoid.insert(x);
  Name y = fresh_name(binder.name, avoid);
  return tm::pi(y, tm::nat(dom), substitute(cod, tm::dn(tm::marked(y), dom), x));
}

Term Elaborator::check_is_type(const RawContext& env, const SPtr& s) {
  RenameScope scope;
  try {
    return std::visit(
        overloaded{
            [&](const SNat& n) { return tm::nat(check_is_type(zero_context(env), n.body)); },
            [&](const SPi& n) { return elab_pi(env, n.binder, n.body); },
            [&](const SSig& n) -> Term {
              if (n.binder.marked)
                throw TypeError({"parse", "marked binders are supported in Pi and fun only"});
              Term dom = check_is_type(env, n.binder.type);
              Name x = fresh_name(n.binder.name, scope_avoid(env));
              RawContext env2 = env;
              env2.push_back({x, false, dom});
              BinderPush push(n.binder.name, x);
              Term cod = check_is_type(env2, n.body);
              return tm::sigma(x, dom, cod);
            },
            [&](const SArrow& n) -> Term {
              Term dom = check_is_type(env, n.dom);
              NameSet avoid = scope_avoid(env);
              surface_idents(n.cod, avoid);
              Name x = fresh_name("x", avoid);
              RawContext env2 = env;
              env2.push_back({x, false, dom});
              Term cod = check_is_type(env2, n.cod);
              return tm::pi(x, dom, cod);
            },
            [&](const SId& n) -> Term {
              Term ann = check_is_type(env, n.type);
              Term l = check_term(env, n.lhs, ann);
              Term r = check_term(env, n.rhs, ann);
              return tm::id(ann, l, r);
            },
            [&](const SUnit&) { return tm::unit(); },
            [&](const SType&) { return tm::univ(); },
            [&](const SPB&) { return tm::pb(); },
            [&](const auto&) -> Term {
              auto [t, ty] = infer_term(env, s);
              if (!checker_.whnf(ty).is<UnivType>()) {
                Diagnostic d{"not-a-type", "expression does not denote a type"};
                d.actual = ty;
                throw TypeError(std::move(d));
              }
              return t;
            },
        },
        s->node);
  } catch (TypeError& e) {
    if (!e.diag().span) e.diag().span = s->span;
    throw;
  }
}

Term Elaborator::check_term(const RawContext& env, const SPtr& s, const Term& expected) {
  RenameScope scope;
  try {
    if (const auto* fn = std::get_if<SFun>(&s->node)) {
      Term ty = checker_.whnf(expected);
      const auto* p = ty.as<Pi>();
      if (!p) {
        Diagnostic d{"type-mismatch", "function literal checked against a non-Pi type"};
        d.expected = expected;
        throw TypeError(std::move(d));
      }
      const SBinder& b = fn->binders.front();
      SPtr rest = fn->body;
      if (fn->binders.size() > 1) {
        SFun tail{std::vector<SBinder>(fn->binders.begin() + 1, fn->binders.end()), fn->body};
        rest = snode({std::move(tail), s->span});
      }
      if (!b.marked) {
        Term dom = check_is_type(env, b.type);
        if (!checker_.convert_type(env, dom, p->dom)) {
          Diagnostic d{"type-mismatch", "binder annotation disagrees with the expected domain"};
          d.expected = p->dom;
          d.actual = dom;
          throw TypeError(std::move(d));
        }
        Name x = fresh_name(b.name, scope_avoid(env));
        RawContext env2 = env;
        env2.push_back({x, false, dom});
        Term cod = substitute(p->cod, tm::var(x), p->var);
        BinderPush push(b.name, x);
        Term body = check_term(env2, rest, cod);
        return tm::lam(x, dom, body, cod);
      }
      // dull lambda against Pi (y : %(A)) , B
      Term dom_nat = checker_.whnf(p->dom);
      const auto* nt = dom_nat.as<NatType>();
      if (!nt) {
        Diagnostic d{"type-mismatch", "dull binder checked against a non-natural domain"};
        d.expected = p->dom;
        throw TypeError(std::move(d));
      }
      RawContext zenv = zero_context(env);
      Term dom = check_is_type(zenv, b.type);
      if (!checker_.convert_type(zenv, dom, nt->body)) {
        Diagnostic d{"type-mismatch",
                     "dull binder annotation disagrees with the expected domain"};
        d.expected = nt->body;
        d.actual = dom;
        throw TypeError(std::move(d));
      }
      Name x = fresh_name(b.name, scope_avoid(env));
      RawContext env2 = env;
      env2.push_back({x, true, nt->body});
      Term expected_body = substitute(p->cod, tm::up(tm::marked(x), nt->body), p->var);
      Term body;
      {
        BinderPush push(b.name, x);
        body = check_term(env2, rest, expected_body);
      }
      NameSet avoid = scope_avoid(env);
      avoid.merge(free_vars(body));
      avoid.merge(free_vars(p->cod));
      avoid.insert(x);
      Name y = fresh_name(b.name, avoid);
      return tm::lam(y, tm::nat(nt->body),
                     substitute(body, tm::dn(tm::marked(y), nt->body), x),
                     substitute(p->cod, tm::var(y), p->var));
    }
    if (const auto* pr = std::get_if<SPair>(&s->node)) {
      Term ty = checker_.whnf(expected);
      const auto* sg = ty.as<Sigma>();
      if (!sg) {
        Diagnostic d{"type-mismatch", "pair checked against a non-Sig type"};
        d.expected = expected;
        throw TypeError(std::move(d));
      }
      Term first = check_term(env, pr->first, sg->dom);
      Term second = check_term(env, pr->second, substitute(sg->cod, first, sg->var));
      return tm::pair(first, second, sg->var, sg->cod);
    }
    if (std::get_if<SRefl>(&s->node)) {
      Term ty = checker_.whnf(expected);
      const auto* idt = ty.as<IdType>();
      if (!idt) {
        Diagnostic d{"type-mismatch", "refl checked against a non-Id type"};
        d.expected = expected;
        throw TypeError(std::move(d));
      }
      if (!checker_.convert(env, idt->lhs, idt->rhs, idt->ann)) {
        Diagnostic d{"conversion", "refl requires definitionally equal endpoints"};
        d.expected = idt->lhs;
        d.actual = idt->rhs;
        throw TypeError(std::move(d));
      }
      return tm::refl(idt->ann, idt->lhs);
    }
    if (const auto* u = std::get_if<SUp>(&s->node)) {
      Term ty = checker_.whnf(expected);
      const auto* nt = ty.as<NatType>();
      if (!nt) {
        Diagnostic d{"type-mismatch", "up(...) checked against a non-natural type"};
        d.expected = expected;
        throw TypeError(std::move(d));
      }
      Term body;
      try {
        body = check_term(zero_context(env), u->body, nt->body);
      } catch (TypeError& e) {
        Diagnostic d{"natural-intro", "body of a natural introduction must be dull (" +
                                          e.diag().rule + ": " + e.diag().message + ")"};
        d.span = e.diag().span;
        throw TypeError(std::move(d));
      }
      return tm::up(body, nt->body);
    }
    if (const auto* lf = std::get_if<SLetFlat>(&s->node)) {
      auto [value, vty] = infer_term(env, lf->value);
      Term wv = checker_.whnf(vty);
      const auto* nt = wv.as<NatType>();
      if (!nt) {
        Diagnostic d{"natural-elim", "let up(...) requires a scrutinee of natural type"};
        d.actual = vty;
        throw TypeError(std::move(d));
      }
      Name u2 = fresh_name(lf->name, scope_avoid(env));
      RawContext env2 = env;
      env2.push_back({u2, true, nt->body});
      Term body;
      {
        BinderPush push(lf->name, u2);
        body = check_term(env2, lf->body, expected);
      }
      Term zeroed = zero_term(value, domain_set(env));
      return substitute(body, tm::dn(zeroed, nt->body), u2);
    }
    auto [t, ty] = infer_term(env, s);
    if (!checker_.convert_type(env, ty, expected)) {
      Diagnostic d{"type-mismatch", "term does not have the expected type"};
      d.expected = expected;
      d.actual = ty;
      throw TypeError(std::move(d));
    }
    return t;
  } catch (TypeError& e) {
    if (!e.diag().span) e.diag().span = s->span;
    throw;
  }
}

std::pair<Term, Term> Elaborator::infer_term(const RawContext& env, const SPtr& s) {
  RenameScope scope;
  try {
    return std::visit(
        overloaded{
            [&](const SVar& n) -> std::pair<Term, Term> {
              Name name = lookup_rename(n.name).value_or(n.name);
              Term v = tm::var(name);
              return {v, checker_.infer(env, v)};
            },
            [&](const SMarked& n) -> std::pair<Term, Term> {
              Name name = lookup_rename(n.name).value_or(n.name);
              Term v = tm::marked(name);
              return {v, checker_.infer(env, v)};
            },
            [&](const SUp& n) -> std::pair<Term, Term> {
              try {
                auto [body, ty] = infer_term(zero_context(env), n.body);
                return {tm::up(body, ty), tm::nat(ty)};
              } catch (TypeError& e) {
                Diagnostic d{"natural-intro",
                             "body of a natural introduction must be dull (" +
                                 e.diag().rule + ": " + e.diag().message + ")"};
                d.span = e.diag().span;
                throw TypeError(std::move(d));
              }
            },
            [&](const SDn& n) -> std::pair<Term, Term> {
              auto [scrut, ty] = infer_term(env, n.body);
              Term w = checker_.whnf(ty);
              const auto* nt = w.as<NatType>();
              if (!nt) {
                Diagnostic d{"natural-elim", "dn(...) requires a scrutinee of natural type"};
                d.actual = ty;
                throw TypeError(std::move(d));
              }
              return {tm::dn(scrut, nt->body), nt->body};
            },
            [&](const SApp& n) -> std::pair<Term, Term> {
              auto [fn, fty] = infer_term(env, n.fn);
              Term w = checker_.whnf(fty);
              const auto* p = w.as<Pi>();
              if (!p) {
                Diagnostic d{"not-a-function", "application head is not of Pi type"};
                d.actual = fty;
                throw TypeError(std::move(d));
              }
              Term arg;
              const auto* dom_nat = checker_.whnf(p->dom).as<NatType>();
              if (dom_nat) {
                // dull application: a dull argument of the underlying type is
                // accepted and wrapped with up(...)
                try {
                  arg = check_term(env, n.arg, p->dom);
                } catch (const TypeError&) {
                  arg = tm::up(check_term(zero_context(env), n.arg, dom_nat->body),
                               dom_nat->body);
                }
              } else {
                arg = check_term(env, n.arg, p->dom);
              }
              return {tm::app(fn, arg, p->dom, p->var, p->cod),
                      substitute(p->cod, arg, p->var)};
            },
            [&](const SPair& n) -> std::pair<Term, Term> {
              auto [first, fty] = infer_term(env, n.first);
              auto [second, sty] = infer_term(env, n.second);
              NameSet avoid = scope_avoid(env);
              avoid.merge(free_vars(sty));
              Name x = fresh_name("x", avoid);
              return {tm::pair(first, second, x, sty), tm::sigma(x, fty, sty)};
            },
            [&](const SFst& n) -> std::pair<Term, Term> {
              auto [p, ty] = infer_term(env, n.arg);
              Term w = checker_.whnf(ty);
              const auto* sg = w.as<Sigma>();
              if (!sg) {
                Diagnostic d{"not-a-pair", "fst requires an argument of Sig type"};
                d.actual = ty;
                throw TypeError(std::move(d));
              }
              return {tm::fst(p, sg->dom, sg->var, sg->cod), sg->dom};
            },
            [&](const SSnd& n) -> std::pair<Term, Term> {
              auto [p, ty] = infer_term(env, n.arg);
              Term w = checker_.whnf(ty);
              const auto* sg = w.as<Sigma>();
              if (!sg) {
                Diagnostic d{"not-a-pair", "snd requires an argument of Sig type"};
                d.actual = ty;
                throw TypeError(std::move(d));
              }
              Term proj = tm::fst(p, sg->dom, sg->var, sg->cod);
              return {tm::snd(p, sg->dom, sg->var, sg->cod),
                      substitute(sg->cod, proj, sg->var)};
            },
            [&](const SJ& n) -> std::pair<Term, Term> {
              auto [path, pty] = infer_term(env, n.path);
              Term w = checker_.whnf(pty);
              const auto* idt = w.as<IdType>();
              if (!idt) {
                Diagnostic d{"type-mismatch", "jelim requires a path of Id type"};
                d.actual = pty;
                throw TypeError(std::move(d));
              }
              NameSet avoid = scope_avoid(env);
              Name x = fresh_name(n.motive_var, avoid);
              avoid.insert(x);
              Name p = fresh_name(n.path_var, avoid);
              RawContext env2 = env;
              env2.push_back({x, false, idt->ann});
              env2.push_back({p, false, tm::id(idt->ann, idt->lhs, tm::var(x))});
              Term motive;
              {
                BinderPush px(n.motive_var, x);
                BinderPush pp(n.path_var, p);
                motive = check_is_type(env2, n.motive);
              }
              Term at_refl = substitute(substitute(motive, idt->lhs, x),
                                        tm::refl(idt->ann, idt->lhs), p);
              Term base = check_term(env, n.base, at_refl);
              Term result = tm::j(idt->ann, idt->lhs, idt->rhs, path, x, p, motive, base);
              return {result, substitute(substitute(motive, idt->rhs, x), path, p)};
            },
            [&](const SFun& n) -> std::pair<Term, Term> {
              const SBinder& b = n.binders.front();
              SPtr rest = n.body;
              if (n.binders.size() > 1) {
                SFun tail{std::vector<SBinder>(n.binders.begin() + 1, n.binders.end()),
                          n.body};
                rest = snode({std::move(tail), s->span});
              }
              if (!b.marked) {
                Term dom = check_is_type(env, b.type);
                Name x = fresh_name(b.name, scope_avoid(env));
                RawContext env2 = env;
                env2.push_back({x, false, dom});
                BinderPush push(b.name, x);
                auto [body, bty] = infer_term(env2, rest);
                return {tm::lam(x, dom, body, bty), tm::pi(x, dom, bty)};
              }
              RawContext zenv = zero_context(env);
              Term dom = check_is_type(zenv, b.type);
              Name x = fresh_name(b.name, scope_avoid(env));
              RawContext env2 = env;
              env2.push_back({x, true, dom});
              Term body, bty;
              {
                BinderPush push(b.name, x);
                std::tie(body, bty) = infer_term(env2, rest);
              }
              NameSet avoid = scope_avoid(env);
              avoid.merge(free_vars(body));
              avoid.merge(free_vars(bty));
              avoid.insert(x);
              Name y = fresh_name(b.name, avoid);
              Term repl = tm::dn(tm::marked(y), dom);
              Term cod = substitute(bty, repl, x);
              return {tm::lam(y, tm::nat(dom), substitute(body, repl, x), cod),
                      tm::pi(y, tm::nat(dom), cod)};
            },
            [&](const SLetFlat& n) -> std::pair<Term, Term> {
              auto [value, vty] = infer_term(env, n.value);
              Term wv = checker_.whnf(vty);
              const auto* nt = wv.as<NatType>();
              if (!nt) {
                Diagnostic d{"natural-elim",
                             "let up(...) requires a scrutinee of natural type"};
                d.actual = vty;
                throw TypeError(std::move(d));
              }
              Name u2 = fresh_name(n.name, scope_avoid(env));
              RawContext env2 = env;
              env2.push_back({u2, true, nt->body});
              Term body, bty;
              {
                BinderPush push(n.name, u2);
                std::tie(body, bty) = infer_term(env2, n.body);
              }
              Term repl = tm::dn(zero_term(value, domain_set(env)), nt->body);
              return {substitute(body, repl, u2), substitute(bty, repl, u2)};
            },
            [&](const SRefl&) -> std::pair<Term, Term> {
              throw TypeError({"cannot-infer", "refl needs an expected Id type"});
            },
            [&](const STt&) -> std::pair<Term, Term> { return {tm::tt(), tm::unit()}; },
            [&](const auto&) -> std::pair<Term, Term> {
              // remaining forms are types used as terms
              Term t = check_is_type(env, s);
              return {t, checker_.infer(env, t)};
            },
        },
        s->node);
  } catch (TypeError& e) {
    if (!e.diag().span) e.diag().span = s->span;
    throw;
  }
}

// ----------------------------------------------------------------------------
// Pretty printer
// ----------------------------------------------------------------------------

namespace {

// 0 = term, 1 = arrow operand, 2 = application, 3 = atom
constexpr int kTerm = 0;
constexpr int kArrow = 1;
constexpr int kApp = 2;
constexpr int kAtom = 3;

void write(std::ostringstream& os, const Term& t, int level) {
  std::visit(
      overloaded{
          [&](const Var& n) { os << n.name; },
          [&](const MarkedVar& n) { os << "~" << n.name; },
          [&](const NatType& n) {
            os << "%(";
            write(os, n.body, kTerm);
            os << ")";
          },
          [&](const NatIntro& n) {
            os << "up(";
            write(os, n.body, kTerm);
            os << ")";
          },
          [&](const NatElim& n) {
            os << "dn(";
            write(os, n.scrut, kTerm);
            os << ")";
          },
          [&](const Pi& n) {
            bool need = level > kArrow;
            if (need) os << "(";
            if (free_vars(n.cod).count(n.var)) {
              os << "Pi (" << n.var << " : ";
              write(os, n.dom, kTerm);
              os << ") , ";
              write(os, n.cod, kTerm);
            } else {
              write(os, n.dom, kApp);
              os << " -> ";
              write(os, n.cod, kArrow);
            }
            if (need) os << ")";
          },
          [&](const Lam& n) {
            bool need = level > kArrow;
            if (need) os << "(";
            os << "fun (" << n.var << " : ";
            write(os, n.dom, kTerm);
            os << ") => ";
            write(os, n.body, kTerm);
            if (need) os << ")";
          },
          [&](const App& n) {
            bool need = level > kApp;
            if (need) os << "(";
            write(os, n.fn, kApp);
            os << " ";
            write(os, n.arg, kAtom);
            if (need) os << ")";
          },
          [&](const Sigma& n) {
            bool need = level > kArrow;
            if (need) os << "(";
            os << "Sig (" << n.var << " : ";
            write(os, n.dom, kTerm);
            os << ") , ";
            write(os, n.cod, kTerm);
            if (need) os << ")";
          },
          [&](const MkPair& n) {
            os << "(";
            write(os, n.first, kTerm);
            os << " , ";
            write(os, n.second, kTerm);
            os << ")";
          },
          [&](const Fst& n) {
            bool need = level > kApp;
            if (need) os << "(";
            os << "fst ";
            write(os, n.pair, kAtom);
            if (need) os << ")";
          },
          [&](const Snd& n) {
            bool need = level > kApp;
            if (need) os << "(";
            os << "snd ";
            write(os, n.pair, kAtom);
            if (need) os << ")";
          },
          [&](const IdType& n) {
            bool need = level > kApp;
            if (need) os << "(";
            os << "Id ";
            write(os, n.ann, kAtom);
            os << " ";
            write(os, n.lhs, kAtom);
            os << " ";
            write(os, n.rhs, kAtom);
            if (need) os << ")";
          },
          [&](const Refl&) { os << "refl"; },
          [&](const JElim& n) {
            os << "jelim(" << n.motive_var << ", " << n.path_var << ", ";
            write(os, n.motive, kTerm);
            os << ", ";
            write(os, n.base, kTerm);
            os << ", ";
            write(os, n.path, kTerm);
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

std::string pretty(const Term& t) {
  std::ostringstream os;
  write(os, t, kTerm);
  return os.str();
}

std::string pretty(const RawContext& ctx) {
  std::ostringstream os;
  bool first = true;
  for (const auto& e : ctx) {
    if (!first) os << ", ";
    first = false;
    if (e.marked)
      os << "(~" << e.name << " :: " << pretty(e.type) << ")";
    else
      os << "(" << e.name << " : " << pretty(e.type) << ")";
  }
  return os.str();
}

}  // namespace natt
