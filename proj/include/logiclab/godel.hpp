#pragma once

#include "logiclab/logic.hpp"
#include "logiclab/nat.hpp"

namespace logiclab {

// Coding v1. pair() is the Cantor pairing; composite objects are preorder token
// streams (tag plus small immediate per node, Cantor-paired) packed with the
// self-delimiting stream coding from nat.hpp. A leading kind token separates the
// object kinds, so codes are injective across kinds as well as within.
enum class CodeKind { Term = 1, Formula = 2, Proof = 3, Program = 4 };

struct GodelCode {
  Nat value;
  CodeKind kind;

  bool operator==(const GodelCode& o) const { return kind == o.kind && value == o.value; }
};

GodelCode godel_encode(const TermPtr& t);
GodelCode godel_encode(const FormulaPtr& f);
TermPtr godel_decode_term(SigPtr sig, const Nat& value);
FormulaPtr godel_decode_formula(SigPtr sig, const Nat& value);

// Token-level helpers shared by the proof and machine coders.
void term_tokens(const TermPtr& t, std::vector<Nat>& out);
void formula_tokens(const FormulaPtr& f, std::vector<Nat>& out);
TermPtr term_from_tokens(SigPtr sig, const std::vector<Nat>& toks, size_t& at);
FormulaPtr formula_from_tokens(SigPtr sig, const std::vector<Nat>& toks, size_t& at);
Nat string_code(const std::string& s);
std::string string_from_code(const Nat& code);

}  // namespace logiclab
