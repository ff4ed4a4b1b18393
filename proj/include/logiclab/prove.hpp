#pragma once

#include <optional>
#include <vector>

#include "logiclab/proof.hpp"
#include "logiclab/theory.hpp"

namespace logiclab {

// Size-ordered enumeration of valid proofs, emitted in Godel-code order.
// The generation universe is frozen: axiom citations, equality reasoning over
// the closed-term pool (axiom subterms and small numerals), conjunction
// introduction/elimination, implication elimination, and universal
// instantiation. Every emitted proof passes check_proof at (T, k).
std::vector<Proof> enumerate_proofs(const Theory& T, size_t k, size_t size_budget);

// Bounded provability query. A result means a checkable proof; not-found means
// the search universe holds no proof within the size budget, never that the
// goal is refutable. Proofs of goal g cost at least 1 + node_count(g), so
// budgets below that threshold return immediately.
std::optional<Proof> is_provable_within(const Theory& T, size_t k, const FormulaPtr& goal,
                                        size_t size_budget);

}  // namespace logiclab
