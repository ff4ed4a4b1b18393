#include "logiclab/logic.hpp"

#include <algorithm>
#include <cctype>

namespace logiclab {

Signature::Signature(std::string name, std::vector<FuncSym> funcs, std::vector<RelSym> rels)
    : name_(std::move(name)), funcs_(std::move(funcs)), rels_(std::move(rels)) {
  std::set<std::string> seen;
  for (const auto& f : funcs_)
    if (!seen.insert(f.name).second) throw SemanticError("signature: duplicate symbol " + f.name);
  for (const auto& r : rels_)
    if (!seen.insert(r.name).second) throw SemanticError("signature: duplicate symbol " + r.name);
  eq_rel_ = rel_index("=");
  bound_rel_ = rel_index("<");
  if (bound_rel_ < 0) bound_rel_ = rel_index("in");
}

std::shared_ptr<const Signature> Signature::arith() {
  static const auto sig = std::make_shared<const Signature>(
      "ARITH",
      std::vector<FuncSym>{{"0", 0}, {"S", 1}, {"+", 2}, {"*", 2}},
      std::vector<RelSym>{{"<", 2}, {"=", 2}});
  return sig;
}

std::shared_ptr<const Signature> Signature::set() {
  static const auto sig = std::make_shared<const Signature>(
      "SET", std::vector<FuncSym>{}, std::vector<RelSym>{{"in", 2}, {"=", 2}});
  return sig;
}

std::shared_ptr<const Signature> Signature::extend(const std::string& name,
                                                   std::vector<FuncSym> more_funcs,
                                                   std::vector<RelSym> more_rels) const {
  auto funcs = funcs_;
  auto rels = rels_;
  for (auto& f : more_funcs) {
    if (func_index(f.name) >= 0) throw SemanticError("extend: duplicate function " + f.name);
    funcs.push_back(std::move(f));
  }
  for (auto& r : more_rels) {
    if (rel_index(r.name) >= 0) throw SemanticError("extend: duplicate relation " + r.name);
    rels.push_back(std::move(r));
  }
  return std::make_shared<const Signature>(name, std::move(funcs), std::move(rels));
}

int Signature::func_index(const std::string& n) const {
  for (size_t i = 0; i < funcs_.size(); ++i)
    if (funcs_[i].name == n) return static_cast<int>(i);
  return -1;
}

int Signature::rel_index(const std::string& n) const {
  for (size_t i = 0; i < rels_.size(); ++i)
    if (rels_[i].name == n) return static_cast<int>(i);
  return -1;
}

bool Signature::compatible(const Signature& other) const {
  const Signature& small = funcs_.size() + rels_.size() <= other.funcs_.size() + other.rels_.size()
                               ? *this
                               : other;
  const Signature& big = &small == this ? other : *this;
  for (size_t i = 0; i < small.funcs_.size(); ++i) {
    if (i >= big.funcs_.size() || big.funcs_[i].name != small.funcs_[i].name) return false;
  }
  for (size_t i = 0; i < small.rels_.size(); ++i) {
    if (i >= big.rels_.size() || big.rels_[i].name != small.rels_[i].name) return false;
  }
  return true;
}

// ---- builders ----

TermPtr mk_bvar(SigPtr sig, int index) {
  if (index < 0) throw SemanticError("mk_bvar: negative index");
  auto t = std::make_shared<Term>();
  t->tag = TermTag::BVar;
  t->sig = std::move(sig);
  t->bvar = index;
  return t;
}

TermPtr mk_fvar(SigPtr sig, const std::string& name) {
  if (name.empty()) throw SemanticError("mk_fvar: empty name");
  auto t = std::make_shared<Term>();
  t->tag = TermTag::FVar;
  t->sig = std::move(sig);
  t->fvar = name;
  return t;
}

TermPtr mk_func(SigPtr sig, int func_index, std::vector<TermPtr> args) {
  if (func_index < 0 || func_index >= static_cast<int>(sig->funcs().size()))
    throw SemanticError("mk_func: unknown symbol");
  if (sig->funcs()[func_index].arity != static_cast<int>(args.size()))
    throw SemanticError("mk_func: arity mismatch for " + sig->funcs()[func_index].name);
  auto t = std::make_shared<Term>();
  t->tag = TermTag::Func;
  t->sig = std::move(sig);
  t->func = func_index;
  t->args = std::move(args);
  return t;
}

TermPtr mk_func(SigPtr sig, const std::string& name, std::vector<TermPtr> args) {
  int idx = sig->func_index(name);
  if (idx < 0) throw SemanticError("mk_func: unknown symbol " + name);
  return mk_func(std::move(sig), idx, std::move(args));
}

static std::shared_ptr<Formula> make_node(FTag tag, SigPtr sig) {
  auto f = std::make_shared<Formula>();
  f->tag = tag;
  f->sig = std::move(sig);
  return f;
}

FormulaPtr mk_atom(SigPtr sig, int rel_index, std::vector<TermPtr> terms) {
  if (rel_index < 0 || rel_index >= static_cast<int>(sig->rels().size()))
    throw SemanticError("mk_atom: unknown relation");
  if (sig->rels()[rel_index].arity != static_cast<int>(terms.size()))
    throw SemanticError("mk_atom: arity mismatch for " + sig->rels()[rel_index].name);
  auto f = std::make_shared<Formula>();
  f->tag = FTag::Atom;
  f->sig = std::move(sig);
  f->rel = rel_index;
  f->terms = std::move(terms);
  return f;
}

FormulaPtr mk_atom(SigPtr sig, const std::string& rel, std::vector<TermPtr> terms) {
  int idx = sig->rel_index(rel);
  if (idx < 0) throw SemanticError("mk_atom: unknown relation " + rel);
  return mk_atom(std::move(sig), idx, std::move(terms));
}

FormulaPtr mk_neg(FormulaPtr a) {
  auto f = make_node(FTag::Neg, a->sig);
  f->subs = {std::move(a)};
  return f;
}

static FormulaPtr mk_bin(FTag tag, FormulaPtr a, FormulaPtr b) {
  auto f = make_node(tag, a->sig);
  f->subs = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr mk_and(FormulaPtr a, FormulaPtr b) { return mk_bin(FTag::And, std::move(a), std::move(b)); }
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b) { return mk_bin(FTag::Or, std::move(a), std::move(b)); }
FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b) {
  return mk_bin(FTag::Implies, std::move(a), std::move(b));
}
FormulaPtr mk_iff(FormulaPtr a, FormulaPtr b) {
  return mk_and(mk_implies(a, b), mk_implies(b, a));
}

FormulaPtr mk_forall_raw(FormulaPtr body, std::string hint) {
  auto f = make_node(FTag::Forall, body->sig);
  f->subs = {std::move(body)};
  f->binder_hint = std::move(hint);
  return f;
}

FormulaPtr mk_exists_raw(FormulaPtr body, std::string hint) {
  auto f = make_node(FTag::Exists, body->sig);
  f->subs = {std::move(body)};
  f->binder_hint = std::move(hint);
  return f;
}

FormulaPtr mk_bforall_raw(int rel, TermPtr bound, FormulaPtr body, std::string hint) {
  auto f = make_node(FTag::BForall, body->sig);
  f->rel = rel;
  f->terms = {std::move(bound)};
  f->subs = {std::move(body)};
  f->binder_hint = std::move(hint);
  return f;
}

FormulaPtr mk_bexists_raw(int rel, TermPtr bound, FormulaPtr body, std::string hint) {
  auto f = make_node(FTag::BExists, body->sig);
  f->rel = rel;
  f->terms = {std::move(bound)};
  f->subs = {std::move(body)};
  f->binder_hint = std::move(hint);
  return f;
}

FormulaPtr mk_forall(const std::string& var, FormulaPtr body) {
  return mk_forall_raw(close_over(body, var), var);
}

FormulaPtr mk_exists(const std::string& var, FormulaPtr body) {
  return mk_exists_raw(close_over(body, var), var);
}

FormulaPtr mk_bforall(const std::string& var, TermPtr bound, FormulaPtr body) {
  int rel = body->sig->bound_rel();
  if (rel < 0) throw SemanticError("mk_bforall: signature has no bounding relation");
  return mk_bforall_raw(rel, std::move(bound), close_over(body, var), var);
}

FormulaPtr mk_bexists(const std::string& var, TermPtr bound, FormulaPtr body) {
  int rel = body->sig->bound_rel();
  if (rel < 0) throw SemanticError("mk_bexists: signature has no bounding relation");
  return mk_bexists_raw(rel, std::move(bound), close_over(body, var), var);
}

FormulaPtr mk_box(FormulaPtr a) {
  auto f = make_node(FTag::Box, a->sig);
  f->subs = {std::move(a)};
  return f;
}

FormulaPtr mk_dia(FormulaPtr a) {
  auto f = make_node(FTag::Dia, a->sig);
  f->subs = {std::move(a)};
  return f;
}

// ---- comparison ----

int term_cmp(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return 0;
  if (a->tag != b->tag) return a->tag < b->tag ? -1 : 1;
  switch (a->tag) {
    case TermTag::BVar:
      return a->bvar == b->bvar ? 0 : (a->bvar < b->bvar ? -1 : 1);
    case TermTag::FVar:
      return a->fvar.compare(b->fvar) < 0 ? -1 : (a->fvar == b->fvar ? 0 : 1);
    case TermTag::Func: {
      if (a->func != b->func) return a->func < b->func ? -1 : 1;
      if (a->args.size() != b->args.size()) return a->args.size() < b->args.size() ? -1 : 1;
      for (size_t i = 0; i < a->args.size(); ++i) {
        int c = term_cmp(a->args[i], b->args[i]);
        if (c != 0) return c;
      }
      return 0;
    }
  }
  return 0;
}

int formula_cmp(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return 0;
  if (a->tag != b->tag) return a->tag < b->tag ? -1 : 1;
  if (a->rel != b->rel) return a->rel < b->rel ? -1 : 1;
  if (a->terms.size() != b->terms.size()) return a->terms.size() < b->terms.size() ? -1 : 1;
  for (size_t i = 0; i < a->terms.size(); ++i) {
    int c = term_cmp(a->terms[i], b->terms[i]);
    if (c != 0) return c;
  }
  if (a->subs.size() != b->subs.size()) return a->subs.size() < b->subs.size() ? -1 : 1;
  for (size_t i = 0; i < a->subs.size(); ++i) {
    int c = formula_cmp(a->subs[i], b->subs[i]);
    if (c != 0) return c;
  }
  return 0;
}

bool term_equal(const TermPtr& a, const TermPtr& b) { return term_cmp(a, b) == 0; }
bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) { return formula_cmp(a, b) == 0; }

// ---- traversals ----

static void free_vars_term(const TermPtr& t, std::set<std::string>& out) {
  if (t->tag == TermTag::FVar) out.insert(t->fvar);
  for (const auto& a : t->args) free_vars_term(a, out);
}

static void free_vars_formula(const FormulaPtr& f, std::set<std::string>& out) {
  for (const auto& t : f->terms) free_vars_term(t, out);
  for (const auto& s : f->subs) free_vars_formula(s, out);
}

std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> out;
  free_vars_term(t, out);
  return out;
}

std::set<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> out;
  free_vars_formula(f, out);
  return out;
}

bool is_closed(const FormulaPtr& f) { return free_vars(f).empty(); }

bool has_modal(const FormulaPtr& f) {
  if (f->tag == FTag::Box || f->tag == FTag::Dia) return true;
  for (const auto& s : f->subs)
    if (has_modal(s)) return true;
  return false;
}

bool is_modal(const FormulaPtr& f) { return has_modal(f); }

size_t node_count(const TermPtr& t) {
  size_t n = 1;
  for (const auto& a : t->args) n += node_count(a);
  return n;
}

size_t node_count(const FormulaPtr& f) {
  size_t n = 1;
  for (const auto& t : f->terms) n += node_count(t);
  for (const auto& s : f->subs) n += node_count(s);
  return n;
}

int quantifier_rank(const FormulaPtr& f) {
  int best = 0;
  for (const auto& s : f->subs) best = std::max(best, quantifier_rank(s));
  switch (f->tag) {
    case FTag::Forall:
    case FTag::Exists:
    case FTag::BForall:
    case FTag::BExists:
      return best + 1;
    default:
      return best;
  }
}

// ---- de Bruijn machinery ----

TermPtr shift_term(const TermPtr& t, int delta, int cutoff) {
  switch (t->tag) {
    case TermTag::BVar:
      if (t->bvar < cutoff) return t;
      if (t->bvar + delta < cutoff) throw SemanticError("shift_term: index underflow");
      return mk_bvar(t->sig, t->bvar + delta);
    case TermTag::FVar:
      return t;
    case TermTag::Func: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (const auto& a : t->args) {
        auto na = shift_term(a, delta, cutoff);
        changed = changed || na.get() != a.get();
        args.push_back(std::move(na));
      }
      if (!changed) return t;
      return mk_func(t->sig, t->func, std::move(args));
    }
  }
  return t;
}

static bool is_binder(FTag tag) {
  return tag == FTag::Forall || tag == FTag::Exists || tag == FTag::BForall ||
         tag == FTag::BExists;
}

static FormulaPtr map_terms(const FormulaPtr& f, int depth,
                            TermPtr (*termfn)(const TermPtr&, int, const void*),
                            const void* ctx) {
  // Bound terms of bounded quantifiers live outside the binder scope.
  std::vector<TermPtr> terms;
  terms.reserve(f->terms.size());
  bool changed = false;
  for (const auto& t : f->terms) {
    auto nt = termfn(t, depth, ctx);
    changed = changed || nt.get() != t.get();
    terms.push_back(std::move(nt));
  }
  int sub_depth = depth + (is_binder(f->tag) ? 1 : 0);
  std::vector<FormulaPtr> subs;
  subs.reserve(f->subs.size());
  for (const auto& s : f->subs) {
    auto ns = map_terms(s, sub_depth, termfn, ctx);
    changed = changed || ns.get() != s.get();
    subs.push_back(std::move(ns));
  }
  if (!changed) return f;
  auto g = std::make_shared<Formula>(*f);
  g->terms = std::move(terms);
  g->subs = std::move(subs);
  return g;
}

FormulaPtr shift_formula(const FormulaPtr& f, int delta, int cutoff) {
  struct Ctx {
    int delta;
    int cutoff;
  } ctx{delta, cutoff};
  return map_terms(
      f, 0,
      [](const TermPtr& t, int depth, const void* c) {
        auto* k = static_cast<const Ctx*>(c);
        return shift_term(t, k->delta, k->cutoff + depth);
      },
      &ctx);
}

static TermPtr open_term(const TermPtr& t, int depth, const TermPtr& repl) {
  switch (t->tag) {
    case TermTag::BVar:
      if (t->bvar == depth) return shift_term(repl, depth);
      if (t->bvar > depth) return mk_bvar(t->sig, t->bvar - 1);
      return t;
    case TermTag::FVar:
      return t;
    case TermTag::Func: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (const auto& a : t->args) {
        auto na = open_term(a, depth, repl);
        changed = changed || na.get() != a.get();
        args.push_back(std::move(na));
      }
      if (!changed) return t;
      return mk_func(t->sig, t->func, std::move(args));
    }
  }
  return t;
}

FormulaPtr open_body(const FormulaPtr& body, const TermPtr& t) {
  struct Ctx {
    const TermPtr* repl;
  } ctx{&t};
  return map_terms(
      body, 0,
      [](const TermPtr& tt, int depth, const void* c) {
        auto* k = static_cast<const Ctx*>(c);
        return open_term(tt, depth, *k->repl);
      },
      &ctx);
}

static TermPtr close_term(const TermPtr& t, int depth, const std::string& var) {
  switch (t->tag) {
    case TermTag::BVar:
      if (t->bvar >= depth) return mk_bvar(t->sig, t->bvar + 1);
      return t;
    case TermTag::FVar:
      if (t->fvar == var) return mk_bvar(t->sig, depth);
      return t;
    case TermTag::Func: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (const auto& a : t->args) {
        auto na = close_term(a, depth, var);
        changed = changed || na.get() != a.get();
        args.push_back(std::move(na));
      }
      if (!changed) return t;
      return mk_func(t->sig, t->func, std::move(args));
    }
  }
  return t;
}

FormulaPtr close_over(const FormulaPtr& f, const std::string& var) {
  struct Ctx {
    const std::string* var;
  } ctx{&var};
  return map_terms(
      f, 0,
      [](const TermPtr& tt, int depth, const void* c) {
        auto* k = static_cast<const Ctx*>(c);
        return close_term(tt, depth, *k->var);
      },
      &ctx);
}

TermPtr subst_fvar(const TermPtr& t, const std::string& var, const TermPtr& repl) {
  switch (t->tag) {
    case TermTag::BVar:
      return t;
    case TermTag::FVar:
      return t->fvar == var ? repl : t;
    case TermTag::Func: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (const auto& a : t->args) {
        auto na = subst_fvar(a, var, repl);
        changed = changed || na.get() != a.get();
        args.push_back(std::move(na));
      }
      if (!changed) return t;
      return mk_func(t->sig, t->func, std::move(args));
    }
  }
  return t;
}

FormulaPtr subst_fvar(const FormulaPtr& f, const std::string& var, const TermPtr& repl) {
  struct Ctx {
    const std::string* var;
    const TermPtr* repl;
  } ctx{&var, &repl};
  return map_terms(
      f, 0,
      [](const TermPtr& tt, int depth, const void* c) {
        auto* k = static_cast<const Ctx*>(c);
        return subst_fvar(tt, *k->var, shift_term(*k->repl, depth));
      },
      &ctx);
}

// ---- match_open ----

namespace {

struct MatchState {
  std::optional<TermPtr> candidate;
  bool ok = true;
};

bool term_has_bvar_below(const TermPtr& t, int depth) {
  if (t->tag == TermTag::BVar) return t->bvar < depth;
  for (const auto& a : t->args)
    if (term_has_bvar_below(a, depth)) return true;
  return false;
}

void match_term(const TermPtr& body, const TermPtr& inst, int depth, MatchState& st);

void match_formula(const FormulaPtr& body, const FormulaPtr& inst, int depth, MatchState& st) {
  if (!st.ok) return;
  if (body->tag != inst->tag || body->rel != inst->rel ||
      body->terms.size() != inst->terms.size() || body->subs.size() != inst->subs.size()) {
    st.ok = false;
    return;
  }
  for (size_t i = 0; i < body->terms.size(); ++i) match_term(body->terms[i], inst->terms[i], depth, st);
  int sub_depth = depth + (is_binder(body->tag) ? 1 : 0);
  for (size_t i = 0; i < body->subs.size(); ++i)
    match_formula(body->subs[i], inst->subs[i], sub_depth, st);
}

void match_term(const TermPtr& body, const TermPtr& inst, int depth, MatchState& st) {
  if (!st.ok) return;
  if (body->tag == TermTag::BVar && body->bvar == depth) {
    // This position held the opened binder; recover the instantiation term.
    if (term_has_bvar_below(inst, depth)) {
      st.ok = false;
      return;
    }
    TermPtr t = shift_term(inst, -depth);
    if (st.candidate) {
      if (!term_equal(*st.candidate, t)) st.ok = false;
    } else {
      st.candidate = t;
    }
    return;
  }
  if (body->tag != inst->tag) {
    st.ok = false;
    return;
  }
  switch (body->tag) {
    case TermTag::BVar: {
      int expect = body->bvar > depth ? body->bvar - 1 : body->bvar;
      if (inst->bvar != expect) st.ok = false;
      return;
    }
    case TermTag::FVar:
      if (body->fvar != inst->fvar) st.ok = false;
      return;
    case TermTag::Func:
      if (body->func != inst->func || body->args.size() != inst->args.size()) {
        st.ok = false;
        return;
      }
      for (size_t i = 0; i < body->args.size(); ++i)
        match_term(body->args[i], inst->args[i], depth, st);
      return;
  }
}

}  // namespace

std::optional<TermPtr> match_open(const FormulaPtr& body, const FormulaPtr& inst) {
  MatchState st;
  match_formula(body, inst, 0, st);
  if (!st.ok) return std::nullopt;
  if (st.candidate) return st.candidate;
  return mk_fvar(body->sig, "_any");  // vacuous binder, any witness fits
}

// ---- parser ----

namespace {

enum class Tok {
  End,
  LParen,
  RParen,
  Dot,
  Comma,
  Tilde,
  Amp,
  Bar,
  Arrow,
  Eq,
  Lt,
  Plus,
  Star,
  Zero,
  Ident,
};

struct Token {
  Tok kind;
  std::string text;
  size_t pos;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    size_t at = i;
    switch (c) {
      case '(': out.push_back({Tok::LParen, "(", at}); ++i; continue;
      case ')': out.push_back({Tok::RParen, ")", at}); ++i; continue;
      case '.': out.push_back({Tok::Dot, ".", at}); ++i; continue;
      case ',': out.push_back({Tok::Comma, ",", at}); ++i; continue;
      case '~': out.push_back({Tok::Tilde, "~", at}); ++i; continue;
      case '&': out.push_back({Tok::Amp, "&", at}); ++i; continue;
      case '|': out.push_back({Tok::Bar, "|", at}); ++i; continue;
      case '=': out.push_back({Tok::Eq, "=", at}); ++i; continue;
      case '<': out.push_back({Tok::Lt, "<", at}); ++i; continue;
      case '+': out.push_back({Tok::Plus, "+", at}); ++i; continue;
      case '*': out.push_back({Tok::Star, "*", at}); ++i; continue;
      case '0': out.push_back({Tok::Zero, "0", at}); ++i; continue;
      case '-':
        if (i + 1 < s.size() && s[i + 1] == '>') {
          out.push_back({Tok::Arrow, "->", at});
          i += 2;
          continue;
        }
        throw ParseError("stray '-'", at);
      default:
        break;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t j = i + 1;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), at});
      i = j;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", at);
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
 public:
  Parser(SigPtr sig, const std::string& text) : sig_(std::move(sig)), toks_(lex(text)) {}

  FormulaPtr formula() {
    auto f = parse_formula();
    expect(Tok::End, "trailing input");
    return f;
  }

  TermPtr term() {
    auto t = parse_term();
    expect(Tok::End, "trailing input");
    return t;
  }

 private:
  SigPtr sig_;
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<std::string> binders_;  // innermost last

  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }
  void expect(Tok k, const char* what) {
    if (peek().kind != k) throw ParseError(std::string("expected ") + what, peek().pos);
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, peek().pos); }

  static bool is_var_name(const std::string& n) {
    if (n.empty() || !std::islower(static_cast<unsigned char>(n[0]))) return false;
    for (char c : n)
      if (!(std::islower(static_cast<unsigned char>(c)) ||
            std::isdigit(static_cast<unsigned char>(c))))
        return false;
    return true;
  }

  TermPtr var_or_symbol(const std::string& name, size_t at) {
    int fi = sig_->func_index(name);
    if (fi >= 0) {
      if (sig_->funcs()[fi].arity == 0) return mk_func(sig_, fi, {});
      expect(Tok::LParen, "'(' after function symbol");
      std::vector<TermPtr> args;
      args.push_back(parse_term());
      while (peek().kind == Tok::Comma) {
        take();
        args.push_back(parse_term());
      }
      expect(Tok::RParen, "')'");
      if (static_cast<int>(args.size()) != sig_->funcs()[fi].arity)
        throw ParseError("arity mismatch for " + name, at);
      return mk_func(sig_, fi, std::move(args));
    }
    if (!is_var_name(name)) throw ParseError("unknown symbol " + name, at);
    for (size_t d = 0; d < binders_.size(); ++d) {
      if (binders_[binders_.size() - 1 - d] == name)
        return mk_bvar(sig_, static_cast<int>(d));
    }
    return mk_fvar(sig_, name);
  }

  TermPtr parse_term() {
    const Token t = peek();
    switch (t.kind) {
      case Tok::Zero: {
        take();
        int fi = sig_->func_index("0");
        if (fi < 0) throw ParseError("signature has no constant 0", t.pos);
        return mk_func(sig_, fi, {});
      }
      case Tok::LParen: {
        take();
        auto a = parse_term();
        Tok op = peek().kind;
        if (op != Tok::Plus && op != Tok::Star) fail("expected '+' or '*'");
        take();
        auto b = parse_term();
        expect(Tok::RParen, "')'");
        const char* name = op == Tok::Plus ? "+" : "*";
        int fi = sig_->func_index(name);
        if (fi < 0) throw ParseError(std::string("signature has no ") + name, t.pos);
        return mk_func(sig_, fi, {std::move(a), std::move(b)});
      }
      case Tok::Ident: {
        take();
        return var_or_symbol(t.text, t.pos);
      }
      default:
        fail("expected term");
    }
  }

  FormulaPtr parse_formula() {
    const Token t = peek();
    switch (t.kind) {
      case Tok::Tilde:
        take();
        return mk_neg(parse_formula());
      case Tok::Ident:
        if (t.text == "box") {
          take();
          return mk_box(parse_formula());
        }
        if (t.text == "dia") {
          take();
          return mk_dia(parse_formula());
        }
        if (t.text == "forall" || t.text == "exists") return parse_quantifier(t.text == "forall");
        return parse_atom();
      case Tok::LParen: {
        size_t save = pos_;
        try {
          take();
          auto a = parse_formula();
          Tok op = peek().kind;
          if (op == Tok::RParen) {  // plain grouping
            take();
            return a;
          }
          if (op != Tok::Amp && op != Tok::Bar && op != Tok::Arrow) fail("expected connective");
          take();
          auto b = parse_formula();
          expect(Tok::RParen, "')'");
          if (op == Tok::Amp) return mk_and(std::move(a), std::move(b));
          if (op == Tok::Bar) return mk_or(std::move(a), std::move(b));
          return mk_implies(std::move(a), std::move(b));
        } catch (const ParseError&) {
          pos_ = save;
          return parse_atom();
        }
      }
      default:
        return parse_atom();
    }
  }

  FormulaPtr parse_quantifier(bool universal) {
    take();  // forall / exists
    if (peek().kind != Tok::Ident) fail("expected bound variable");
    Token v = take();
    if (!is_var_name(v.text) || sig_->func_index(v.text) >= 0 || sig_->rel_index(v.text) >= 0)
      throw ParseError("bad bound variable " + v.text, v.pos);
    TermPtr bound;
    int bound_rel = -1;
    if (peek().kind == Tok::Lt) {
      take();
      bound_rel = sig_->rel_index("<");
      if (bound_rel < 0) fail("signature has no '<'");
      bound = parse_term();
    } else if (peek().kind == Tok::Ident && peek().text == "in") {
      take();
      bound_rel = sig_->rel_index("in");
      if (bound_rel < 0) fail("signature has no 'in'");
      bound = parse_term();
    }
    expect(Tok::Dot, "'.'");
    binders_.push_back(v.text);
    auto body = parse_formula();
    binders_.pop_back();
    if (bound) {
      return universal ? mk_bforall_raw(bound_rel, std::move(bound), std::move(body), v.text)
                       : mk_bexists_raw(bound_rel, std::move(bound), std::move(body), v.text);
    }
    return universal ? mk_forall_raw(std::move(body), v.text)
                     : mk_exists_raw(std::move(body), v.text);
  }

  FormulaPtr parse_atom() {
    // Named relation applied to arguments, or a nullary relation, or t REL t.
    if (peek().kind == Tok::Ident) {
      const Token t = peek();
      int ri = sig_->rel_index(t.text);
      if (ri >= 0 && t.text != "in") {
        take();
        if (sig_->rels()[ri].arity == 0) return mk_atom(sig_, ri, {});
        expect(Tok::LParen, "'(' after relation symbol");
        std::vector<TermPtr> args;
        args.push_back(parse_term());
        while (peek().kind == Tok::Comma) {
          take();
          args.push_back(parse_term());
        }
        expect(Tok::RParen, "')'");
        if (static_cast<int>(args.size()) != sig_->rels()[ri].arity)
          throw ParseError("arity mismatch for " + t.text, t.pos);
        return mk_atom(sig_, ri, std::move(args));
      }
    }
    auto a = parse_term();
    Tok op = peek().kind;
    const char* rel = nullptr;
    if (op == Tok::Eq) rel = "=";
    else if (op == Tok::Lt) rel = "<";
    else if (op == Tok::Ident && peek().text == "in") rel = "in";
    if (!rel) fail("expected relation");
    if (sig_->rel_index(rel) < 0) fail(std::string("signature has no '") + rel + "'");
    take();
    auto b = parse_term();
    return mk_atom(sig_, rel, {std::move(a), std::move(b)});
  }
};

}  // namespace

FormulaPtr parse_formula(SigPtr sig, const std::string& text) {
  return Parser(std::move(sig), text).formula();
}

TermPtr parse_term(SigPtr sig, const std::string& text) {
  return Parser(std::move(sig), text).term();
}

// ---- renderer ----

namespace {

void render_term_into(const TermPtr& t, const std::vector<std::string>& binders,
                      std::string& out) {
  switch (t->tag) {
    case TermTag::BVar: {
      int idx = t->bvar;
      if (idx < static_cast<int>(binders.size()))
        out += binders[binders.size() - 1 - idx];
      else
        out += "b" + std::to_string(idx);  // dangling index, debug form
      return;
    }
    case TermTag::FVar:
      out += t->fvar;
      return;
    case TermTag::Func: {
      const auto& sym = t->sig->funcs()[t->func];
      if (sym.name == "+" || sym.name == "*") {
        out += "(";
        render_term_into(t->args[0], binders, out);
        out += sym.name;
        render_term_into(t->args[1], binders, out);
        out += ")";
        return;
      }
      out += sym.name;
      if (!t->args.empty()) {
        out += "(";
        for (size_t i = 0; i < t->args.size(); ++i) {
          if (i) out += ",";
          render_term_into(t->args[i], binders, out);
        }
        out += ")";
      }
      return;
    }
  }
}

void collect_names(const TermPtr& t, std::set<std::string>& out) {
  if (t->tag == TermTag::FVar) out.insert(t->fvar);
  for (const auto& a : t->args) collect_names(a, out);
}

void collect_names(const FormulaPtr& f, std::set<std::string>& out) {
  for (const auto& t : f->terms) collect_names(t, out);
  for (const auto& s : f->subs) collect_names(s, out);
}

std::string pick_binder_name(const std::string& hint, const FormulaPtr& scope,
                             const std::vector<std::string>& binders) {
  std::set<std::string> taken(binders.begin(), binders.end());
  collect_names(scope, taken);
  if (!hint.empty() && !taken.count(hint)) return hint;
  static const char* pool[] = {"x", "y", "z", "u", "v", "w", "s", "t"};
  for (const char* p : pool)
    if (!taken.count(p)) return p;
  for (int i = 1;; ++i) {
    std::string n = "x" + std::to_string(i);
    if (!taken.count(n)) return n;
  }
}

void render_formula_into(const FormulaPtr& f, std::vector<std::string>& binders,
                         std::string& out) {
  switch (f->tag) {
    case FTag::Atom: {
      const auto& sym = f->sig->rels()[f->rel];
      if (sym.name == "=" || sym.name == "<" || sym.name == "in") {
        render_term_into(f->terms[0], binders, out);
        out += sym.name == "=" ? " = " : (sym.name == "<" ? " < " : " in ");
        render_term_into(f->terms[1], binders, out);
        return;
      }
      out += sym.name;
      if (!f->terms.empty()) {
        out += "(";
        for (size_t i = 0; i < f->terms.size(); ++i) {
          if (i) out += ",";
          render_term_into(f->terms[i], binders, out);
        }
        out += ")";
      }
      return;
    }
    case FTag::Neg:
      out += "~(";
      render_formula_into(f->subs[0], binders, out);
      out += ")";
      return;
    case FTag::And:
    case FTag::Or:
    case FTag::Implies: {
      out += "(";
      render_formula_into(f->subs[0], binders, out);
      out += f->tag == FTag::And ? " & " : (f->tag == FTag::Or ? " | " : " -> ");
      render_formula_into(f->subs[1], binders, out);
      out += ")";
      return;
    }
    case FTag::Forall:
    case FTag::Exists: {
      std::string name = pick_binder_name(f->binder_hint, f->subs[0], binders);
      out += f->tag == FTag::Forall ? "forall " : "exists ";
      out += name;
      out += ". ";
      binders.push_back(name);
      render_formula_into(f->subs[0], binders, out);
      binders.pop_back();
      return;
    }
    case FTag::BForall:
    case FTag::BExists: {
      std::string name = pick_binder_name(f->binder_hint, f->subs[0], binders);
      out += f->tag == FTag::BForall ? "forall " : "exists ";
      out += name;
      const auto& sym = f->sig->rels()[f->rel];
      out += sym.name == "<" ? " < " : " in ";
      render_term_into(f->terms[0], binders, out);
      out += ". ";
      binders.push_back(name);
      render_formula_into(f->subs[0], binders, out);
      binders.pop_back();
      return;
    }
    case FTag::Box:
    case FTag::Dia:
      out += f->tag == FTag::Box ? "box " : "dia ";
      render_formula_into(f->subs[0], binders, out);
      return;
  }
}

}  // namespace

std::string render(const TermPtr& t) {
  std::string out;
  std::vector<std::string> binders;
  render_term_into(t, binders, out);
  return out;
}

std::string render(const FormulaPtr& f) {
  std::string out;
  std::vector<std::string> binders;
  render_formula_into(f, binders, out);
  return out;
}

}  // namespace logiclab
