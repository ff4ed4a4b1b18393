#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "logiclab/godel.hpp"
#include "logiclab/logic.hpp"
#include "logiclab/theory.hpp"

namespace logiclab {

// Natural deduction over flat step lists. Rule parameters (witness terms,
// discharged assumptions, eigenvariables) are recovered from the formulas by
// matching, so steps carry only the rule, the referenced steps, and for axiom
// citations the axiom index.
enum class Rule {
  Axiom,        // arg = axiom index, no refs
  Assume,       // opens itself as an assumption
  ImplIntro,    // refs: {body}; discharges the antecedent
  ImplElim,     // refs: {implication, antecedent}
  AndIntro,     // refs: {left, right}
  AndElim1,     // refs: {conjunction}
  AndElim2,
  OrIntro1,     // refs: {left disjunct}
  OrIntro2,     // refs: {right disjunct}
  OrElim,       // refs: {disjunction, from-left, from-right}
  NegIntro,     // refs: {pro, contra}; concludes ~A discharging A
  NegElim,      // refs: {a, not-a}; concludes anything
  Raa,          // refs: {pro, contra}; concludes A discharging ~A
  ForallIntro,  // refs: {instance at an eigenvariable}
  ForallElim,   // refs: {universal}
  ExistsIntro,  // refs: {instance at a witness}
  ExistsElim,   // refs: {existential, body-with-assumption}
  EqRefl,       // no refs, formula t = t
  EqSym,        // refs: {a = b}
  EqSubst,      // refs: {a = b, phi}; conclusion replaces occurrences of a by b
};

const char* rule_name(Rule r);
Rule rule_from_name(const std::string& name);

struct Step {
  Rule rule;
  std::vector<size_t> refs;
  size_t arg = 0;  // axiom index for Rule::Axiom
  FormulaPtr formula;
};

struct Proof {
  FormulaPtr conclusion;
  std::vector<size_t> premises_used;  // sorted, deduplicated axiom indices
  std::vector<Step> steps;
};

enum class RejectReason { None, BadRule, OutOfFragment, ConclusionMismatch };

struct CheckResult {
  bool ok = false;
  RejectReason reason = RejectReason::None;
  size_t step = 0;  // offending step for BadRule / OutOfFragment
  std::string detail;
};

// Validates every step locally, tracks open assumptions, enforces eigenvariable
// side conditions, and requires: premise indices < k, premises_used exact,
// final step equal to the conclusion, and no assumption left open.
CheckResult check_proof(const Proof& p, const Theory& T, size_t k);

// Sum over steps of (1 + node count of the step formula).
size_t proof_size(const Proof& p);

nlohmann::json proof_to_json(const Proof& p);
Proof proof_from_json(SigPtr sig, const nlohmann::json& j);

GodelCode godel_encode(const Proof& p);
Proof godel_decode_proof(SigPtr sig, const Nat& value);

// Convenience builders used by proof producers.
Step mk_axiom_step(const Theory& T, size_t index);
Step mk_step(Rule r, std::vector<size_t> refs, FormulaPtr formula);

}  // namespace logiclab
