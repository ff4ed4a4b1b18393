#include "logiclab/godel.hpp"

namespace logiclab {

namespace {

// Node tags for the token stream. Immediates: BVar index, FVar name code, Func/Atom
// symbol index, bounded quantifiers carry the bounding relation.
enum : unsigned {
  kTermBVar = 0,
  kTermFVar = 1,
  kTermFunc = 2,
  kAtom = 3,
  kNeg = 4,
  kAnd = 5,
  kOr = 6,
  kImplies = 7,
  kForall = 8,
  kExists = 9,
  kBForall = 10,
  kBExists = 11,
  kBox = 12,
  kDia = 13,
};

Nat tok(unsigned tag, const Nat& imm) { return pair(tag, imm); }

}  // namespace

Nat string_code(const std::string& s) {
  std::vector<Nat> toks;
  toks.reserve(s.size());
  for (unsigned char c : s) toks.push_back(c);
  return tokens_to_stream(toks);
}

std::string string_from_code(const Nat& code) {
  std::string out;
  for (const Nat& t : stream_to_tokens(code)) {
    auto v = to_u64(t);
    if (v > 255) throw CodingError("string code: bad byte");
    out.push_back(static_cast<char>(v));
  }
  return out;
}

void term_tokens(const TermPtr& t, std::vector<Nat>& out) {
  switch (t->tag) {
    case TermTag::BVar:
      out.push_back(tok(kTermBVar, t->bvar));
      return;
    case TermTag::FVar:
      out.push_back(tok(kTermFVar, string_code(t->fvar)));
      return;
    case TermTag::Func:
      out.push_back(tok(kTermFunc, t->func));
      for (const auto& a : t->args) term_tokens(a, out);
      return;
  }
}

void formula_tokens(const FormulaPtr& f, std::vector<Nat>& out) {
  switch (f->tag) {
    case FTag::Atom:
      out.push_back(tok(kAtom, f->rel));
      for (const auto& t : f->terms) term_tokens(t, out);
      return;
    case FTag::Neg:
      out.push_back(tok(kNeg, 0));
      break;
    case FTag::And:
      out.push_back(tok(kAnd, 0));
      break;
    case FTag::Or:
      out.push_back(tok(kOr, 0));
      break;
    case FTag::Implies:
      out.push_back(tok(kImplies, 0));
      break;
    case FTag::Forall:
      out.push_back(tok(kForall, 0));
      break;
    case FTag::Exists:
      out.push_back(tok(kExists, 0));
      break;
    case FTag::BForall:
      out.push_back(tok(kBForall, f->rel));
      term_tokens(f->terms[0], out);
      break;
    case FTag::BExists:
      out.push_back(tok(kBExists, f->rel));
      term_tokens(f->terms[0], out);
      break;
    case FTag::Box:
      out.push_back(tok(kBox, 0));
      break;
    case FTag::Dia:
      out.push_back(tok(kDia, 0));
      break;
  }
  for (const auto& s : f->subs) formula_tokens(s, out);
}

namespace {

std::pair<unsigned, Nat> take_tok(const std::vector<Nat>& toks, size_t& at) {
  if (at >= toks.size()) throw CodingError("decode: truncated stream");
  auto [tag, imm] = unpair(toks[at++]);
  return {static_cast<unsigned>(to_u64(tag)), imm};
}

}  // namespace

TermPtr term_from_tokens(SigPtr sig, const std::vector<Nat>& toks, size_t& at) {
  auto [tag, imm] = take_tok(toks, at);
  switch (tag) {
    case kTermBVar:
      return mk_bvar(sig, static_cast<int>(to_u64(imm)));
    case kTermFVar:
      return mk_fvar(sig, string_from_code(imm));
    case kTermFunc: {
      int fi = static_cast<int>(to_u64(imm));
      if (fi < 0 || fi >= static_cast<int>(sig->funcs().size()))
        throw CodingError("decode: bad function index");
      int arity = sig->funcs()[fi].arity;
      std::vector<TermPtr> args;
      for (int i = 0; i < arity; ++i) args.push_back(term_from_tokens(sig, toks, at));
      return mk_func(sig, fi, std::move(args));
    }
    default:
      throw CodingError("decode: bad term tag");
  }
}

FormulaPtr formula_from_tokens(SigPtr sig, const std::vector<Nat>& toks, size_t& at) {
  auto [tag, imm] = take_tok(toks, at);
  auto rel_checked = [&](const Nat& v) {
    int r = static_cast<int>(to_u64(v));
    if (r < 0 || r >= static_cast<int>(sig->rels().size()))
      throw CodingError("decode: bad relation index");
    return r;
  };
  switch (tag) {
    case kAtom: {
      int r = rel_checked(imm);
      int arity = sig->rels()[r].arity;
      std::vector<TermPtr> terms;
      for (int i = 0; i < arity; ++i) terms.push_back(term_from_tokens(sig, toks, at));
      return mk_atom(sig, r, std::move(terms));
    }
    case kNeg:
      return mk_neg(formula_from_tokens(sig, toks, at));
    case kAnd: {
      auto a = formula_from_tokens(sig, toks, at);
      return mk_and(std::move(a), formula_from_tokens(sig, toks, at));
    }
    case kOr: {
      auto a = formula_from_tokens(sig, toks, at);
      return mk_or(std::move(a), formula_from_tokens(sig, toks, at));
    }
    case kImplies: {
      auto a = formula_from_tokens(sig, toks, at);
      return mk_implies(std::move(a), formula_from_tokens(sig, toks, at));
    }
    case kForall:
      return mk_forall_raw(formula_from_tokens(sig, toks, at));
    case kExists:
      return mk_exists_raw(formula_from_tokens(sig, toks, at));
    case kBForall: {
      int r = rel_checked(imm);
      auto bound = term_from_tokens(sig, toks, at);
      return mk_bforall_raw(r, std::move(bound), formula_from_tokens(sig, toks, at));
    }
    case kBExists: {
      int r = rel_checked(imm);
      auto bound = term_from_tokens(sig, toks, at);
      return mk_bexists_raw(r, std::move(bound), formula_from_tokens(sig, toks, at));
    }
    case kBox:
      return mk_box(formula_from_tokens(sig, toks, at));
    case kDia:
      return mk_dia(formula_from_tokens(sig, toks, at));
    default:
      throw CodingError("decode: bad formula tag");
  }
}

GodelCode godel_encode(const TermPtr& t) {
  std::vector<Nat> toks{static_cast<unsigned long>(CodeKind::Term)};
  term_tokens(t, toks);
  return {tokens_to_stream(toks), CodeKind::Term};
}

GodelCode godel_encode(const FormulaPtr& f) {
  std::vector<Nat> toks{static_cast<unsigned long>(CodeKind::Formula)};
  formula_tokens(f, toks);
  return {tokens_to_stream(toks), CodeKind::Formula};
}

TermPtr godel_decode_term(SigPtr sig, const Nat& value) {
  auto toks = stream_to_tokens(value);
  size_t at = 0;
  if (toks.empty() || toks[0] != static_cast<unsigned long>(CodeKind::Term))
    throw CodingError("decode: not a term code");
  at = 1;
  auto t = term_from_tokens(std::move(sig), toks, at);
  if (at != toks.size()) throw CodingError("decode: trailing tokens");
  return t;
}

FormulaPtr godel_decode_formula(SigPtr sig, const Nat& value) {
  auto toks = stream_to_tokens(value);
  size_t at = 0;
  if (toks.empty() || toks[0] != static_cast<unsigned long>(CodeKind::Formula))
    throw CodingError("decode: not a formula code");
  at = 1;
  auto f = formula_from_tokens(std::move(sig), toks, at);
  if (at != toks.size()) throw CodingError("decode: trailing tokens");
  return f;
}

}  // namespace logiclab
