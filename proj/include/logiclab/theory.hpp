#pragma once

#include <functional>
#include <string>
#include <vector>

#include "logiclab/logic.hpp"

namespace logiclab {

// An axiomatized theory presented as a deterministic, total enumeration of
// sentences. Fragment k means the first k enumerated axioms.
class Theory {
 public:
  using Enumerator = std::function<FormulaPtr(size_t)>;

  Theory(std::string name, SigPtr sig, Enumerator axioms)
      : name_(std::move(name)), sig_(std::move(sig)), enum_(std::move(axioms)) {}

  const std::string& name() const { return name_; }
  const SigPtr& sig() const { return sig_; }
  FormulaPtr axiom(size_t i) const { return enum_(i); }

 private:
  std::string name_;
  SigPtr sig_;
  Enumerator enum_;
};

std::vector<FormulaPtr> axioms_of(const Theory& T, size_t k);

// Frozen enumeration pa.v1: nine base axioms in the even slots below 18,
// induction instances everywhere else, ordered by the code of the induction
// formula. Identical to data/pa_axioms.json.
const Theory& pa_theory();

// Extensionality plus an emptyset axiom over the set signature; indices past
// the list repeat the padding tautology.
const Theory& set_base_theory();

// Finite axiom list promoted to a total enumeration: indices past the end give
// the fixed padding tautology "forall x. x = x".
Theory finite_theory(std::string name, SigPtr sig, std::vector<FormulaPtr> axioms);

// The padding sentence used by finite theories.
FormulaPtr padding_tautology(SigPtr sig);

// Formulas over the arithmetic signature with free variables among {x}, in
// increasing Godel-code order. Deterministic; extends its generation radius
// until n formulas are known. Memoized process-wide.
std::vector<FormulaPtr> induction_formula_prefix(size_t n);

// ((phi[x:=0] & forall x. (phi -> phi[x:=S(x)])) -> forall x. phi)
FormulaPtr induction_instance(const FormulaPtr& phi);

// Number of base axioms in pa.v1 (the even slots below 2 * this value).
inline constexpr size_t kPaBaseCount = 9;

}  // namespace logiclab
