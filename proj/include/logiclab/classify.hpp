#pragma once

#include <string>

#include "logiclab/logic.hpp"

namespace logiclab {

enum class CKind { Delta0, Sigma, Pi };

struct ComplexityClass {
  CKind kind = CKind::Delta0;
  int level = 0;  // 0 exactly when kind == Delta0

  bool operator==(const ComplexityClass&) const = default;
  std::string str() const;
};

ComplexityClass sigma_class(int level);
ComplexityClass pi_class(int level);

// Pull every unbounded quantifier into a front prefix. Bounded quantifiers stay in the
// matrix with their bodies prenexed in place (lifting across a bounded quantifier is not
// an equivalence). Interleavings are merged with the fewest alternations, preferring an
// existential lead on ties. Rejects modal formulas.
FormulaPtr prenex(const FormulaPtr& f);

// Minimal syntactic class of prenex(f): Delta0 when only bounded quantifiers remain;
// otherwise Sigma/Pi by the alternation count of unbounded blocks, counting bounded
// quantifiers as transparent.
ComplexityClass classify(const FormulaPtr& f);

}  // namespace logiclab
