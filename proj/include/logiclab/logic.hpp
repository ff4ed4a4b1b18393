#pragma once

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace logiclab {

struct SemanticError : std::runtime_error {
  explicit SemanticError(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
  size_t pos;
  ParseError(const std::string& what, size_t at) : std::runtime_error(what), pos(at) {}
};

struct FuncSym {
  std::string name;
  int arity = 0;
};

struct RelSym {
  std::string name;
  int arity = 0;
};

// Symbol table. A formula node keeps a pointer to the signature it was built against;
// extensions produce a fresh signature that copies the base symbols, so indices of base
// symbols are stable under extension.
class Signature {
 public:
  Signature(std::string name, std::vector<FuncSym> funcs, std::vector<RelSym> rels);

  static std::shared_ptr<const Signature> arith();  // 0, S/1, +/2, */2; </2, =/2
  static std::shared_ptr<const Signature> set();    // in/2, =/2

  std::shared_ptr<const Signature> extend(const std::string& name,
                                          std::vector<FuncSym> more_funcs,
                                          std::vector<RelSym> more_rels) const;

  const std::string& name() const { return name_; }
  const std::vector<FuncSym>& funcs() const { return funcs_; }
  const std::vector<RelSym>& rels() const { return rels_; }
  int func_index(const std::string& n) const;  // -1 if absent
  int rel_index(const std::string& n) const;
  int eq_rel() const { return eq_rel_; }
  // Bounding relation for bounded quantifiers: "<" when present, else "in".
  int bound_rel() const { return bound_rel_; }
  bool compatible(const Signature& other) const;

 private:
  std::string name_;
  std::vector<FuncSym> funcs_;
  std::vector<RelSym> rels_;
  int eq_rel_ = -1;
  int bound_rel_ = -1;
};

using SigPtr = std::shared_ptr<const Signature>;

struct Term;
using TermPtr = std::shared_ptr<const Term>;

enum class TermTag { BVar, FVar, Func };

struct Term {
  TermTag tag;
  SigPtr sig;
  int bvar = -1;          // de Bruijn index, innermost binder = 0
  std::string fvar;       // free variable name
  int func = -1;          // index into sig->funcs()
  std::vector<TermPtr> args;
};

TermPtr mk_bvar(SigPtr sig, int index);
TermPtr mk_fvar(SigPtr sig, const std::string& name);
TermPtr mk_func(SigPtr sig, const std::string& name, std::vector<TermPtr> args);
TermPtr mk_func(SigPtr sig, int func_index, std::vector<TermPtr> args);

enum class FTag {
  Atom,
  Neg,
  And,
  Or,
  Implies,
  Forall,
  Exists,
  BForall,  // bounded universal: binder ranges over {a : a R bound}
  BExists,
  Box,
  Dia,
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FTag tag;
  SigPtr sig;
  int rel = -1;                    // Atom relation; for BForall/BExists the bounding relation
  std::vector<TermPtr> terms;      // Atom arguments; bound term for bounded quantifiers
  std::vector<FormulaPtr> subs;
  std::string binder_hint;         // display name for the binder, cosmetic only
};

FormulaPtr mk_atom(SigPtr sig, const std::string& rel, std::vector<TermPtr> terms);
FormulaPtr mk_atom(SigPtr sig, int rel_index, std::vector<TermPtr> terms);
FormulaPtr mk_neg(FormulaPtr f);
FormulaPtr mk_and(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b);
// Conjunction of the two implications; the node set has no biconditional.
FormulaPtr mk_iff(FormulaPtr a, FormulaPtr b);
// body has the binder already abstracted (de Bruijn 0 = this binder)
FormulaPtr mk_forall_raw(FormulaPtr body, std::string hint = "");
FormulaPtr mk_exists_raw(FormulaPtr body, std::string hint = "");
FormulaPtr mk_bforall_raw(int rel, TermPtr bound, FormulaPtr body, std::string hint = "");
FormulaPtr mk_bexists_raw(int rel, TermPtr bound, FormulaPtr body, std::string hint = "");
// Abstract the free variable `var` and quantify over it.
FormulaPtr mk_forall(const std::string& var, FormulaPtr body);
FormulaPtr mk_exists(const std::string& var, FormulaPtr body);
FormulaPtr mk_bforall(const std::string& var, TermPtr bound, FormulaPtr body);
FormulaPtr mk_bexists(const std::string& var, TermPtr bound, FormulaPtr body);
FormulaPtr mk_box(FormulaPtr f);
FormulaPtr mk_dia(FormulaPtr f);

bool term_equal(const TermPtr& a, const TermPtr& b);
bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);
// Total order for deterministic containers and enumeration; 0 iff equal.
int term_cmp(const TermPtr& a, const TermPtr& b);
int formula_cmp(const FormulaPtr& a, const FormulaPtr& b);

struct FormulaLess {
  bool operator()(const FormulaPtr& a, const FormulaPtr& b) const {
    return formula_cmp(a, b) < 0;
  }
};

std::set<std::string> free_vars(const TermPtr& t);
std::set<std::string> free_vars(const FormulaPtr& f);
bool is_closed(const FormulaPtr& f);
bool is_modal(const FormulaPtr& f);
bool has_modal(const FormulaPtr& f);
size_t node_count(const TermPtr& t);
size_t node_count(const FormulaPtr& f);
int quantifier_rank(const FormulaPtr& f);

// Shift all de Bruijn indices >= cutoff by delta.
TermPtr shift_term(const TermPtr& t, int delta, int cutoff = 0);
FormulaPtr shift_formula(const FormulaPtr& f, int delta, int cutoff = 0);
// Instantiate the outermost binder of a quantifier body with a term.
FormulaPtr open_body(const FormulaPtr& body, const TermPtr& t);
// Abstract free variable `var` into de Bruijn index 0 (for building binders).
FormulaPtr close_over(const FormulaPtr& f, const std::string& var);
// Replace free variable occurrences by a term (capture-free thanks to de Bruijn).
TermPtr subst_fvar(const TermPtr& t, const std::string& var, const TermPtr& repl);
FormulaPtr subst_fvar(const FormulaPtr& f, const std::string& var, const TermPtr& repl);

// Find a term t with open_body(body, t) equal to inst. Returns nullopt when none fits;
// when the binder is vacuous any term fits and a canonical placeholder is returned.
std::optional<TermPtr> match_open(const FormulaPtr& body, const FormulaPtr& inst);

// Grammar (fully parenthesized binary operators):
//   variable   [a-z][a-z0-9]*   (declared symbol names shadow variables)
//   term       0 | S(t) | (t+t) | (t*t) | const | fn(t,...)
//   atom       t=t | t<t | t in t | Rel(t,...) | prop
//   formula    atom | ~f | (f & f) | (f | f) | (f -> f)
//            | forall x. f | exists x. f | forall x < t. f | forall x in t. f
//            | exists x < t. f | exists x in t. f | box f | dia f
FormulaPtr parse_formula(SigPtr sig, const std::string& text);
TermPtr parse_term(SigPtr sig, const std::string& text);
std::string render(const TermPtr& t);
std::string render(const FormulaPtr& f);

}  // namespace logiclab
