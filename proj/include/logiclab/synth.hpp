#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "logiclab/classify.hpp"
#include "logiclab/logic.hpp"
#include "logiclab/selfref.hpp"
#include "logiclab/theory.hpp"

namespace logiclab {

// Symbolic stage formulas for the segment-enumeration processes. A stage
// formula psi(n, a) says: the process described by this very formula places
// value a at stage n. Three variants share one skeleton: an existential hunt
// for a rank cut and a fragment index, a depth-m reflection shell over the
// candidate segment, a no-covering-extension clause, and a lexical-minimality
// block over the stage's candidate pool. Variant A fires for the capped
// reason (the segment admits no strong covering extension), variant B places
// the order rank of the obstruction tree (a designated symbolic atom; the
// rank itself is never computed), and variant C merges the two: the capped
// disjunct, and the ranked disjunct guarded so that once a capped stage has
// happened only capped stages follow.
enum class ProcessVariant { A, B, C };

struct ProcessFormulaSpec {
  // Reflection shell depth; the result classifies exactly one level above it.
  // Depth 0 is rejected: the plain universal sequence builder already covers
  // the one-quantifier case.
  uint64_t m = 1;
  Theory theory = set_base_theory();
  // Descriptions of the four symbolic roles the formula's slots play; they
  // travel into reports. All four keys must be present.
  std::map<std::string, std::string> roles = default_roles();

  static std::map<std::string, std::string> default_roles();
};

struct ProcessSynthesis {
  ProcessVariant which = ProcessVariant::A;
  uint64_t shell_depth = 0;
  FormulaPtr formula;    // open; free variables exactly {n, a}
  FormulaPtr rank_slot;  // the symbolic rank atom (variants B and C), else null
  ComplexityClass complexity;
  FixedPointCertificate certificate;  // ties the formula to its own code
  std::map<std::string, std::string> roles;

  nlohmann::json to_json() const;
};

// Builds the requested variant over the theory's signature extended with the
// role relations, certifies it against its own code through the diagonal
// construction, and classifies it. The classification is recomputed from the
// emitted formula, never assumed; a drift from the intended level throws.
ProcessSynthesis synthesize_process_formula(const ProcessFormulaSpec& spec,
                                            ProcessVariant which);

}  // namespace logiclab
