#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "logiclab/machine.hpp"
#include "logiclab/theory.hpp"

namespace logiclab {

// Statement family the proof channel claims theorems from: a formula over the
// theory's signature extended by one fresh binary relation, free in exactly
// n (the stage) and x (the value). Every claimed proof instantiates both with
// numerals, asserting that stage n never places x; acceptance places x at
// stage n and so defeats the very statement that licensed it.
struct StageTemplate {
  std::string relation = "Succ";
  std::string text = "~(Succ(n, x))";
};

// One scripted answer of the proof channel: at poll number at_step it claims
// a proof, inside fragment fragment_k of the ambient theory, that stage
// `stage` never places `value`. Scripts stand in for proof sources no desk
// run can exhibit; the machine still judges every entry by its own rule.
struct OracleInjection {
  uint64_t at_step = 0;
  uint64_t stage = 0;
  uint64_t fragment_k = 0;
  uint64_t value = 0;
};

struct ProofOracleScript {
  std::vector<OracleInjection> injections;  // at_step strictly increasing

  static ProofOracleScript from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// One judged hand-off of the proof channel.
struct StageEvent {
  uint64_t at_step = 0;
  uint64_t stage = 0;
  uint64_t fragment_k = 0;
  uint64_t value = 0;
  bool accepted = false;
  std::string reason;     // empty exactly when accepted
  std::string statement;  // instantiated template the claimed proof asserted
  bool statement_falsified_by_trace = false;

  bool operator==(const StageEvent&) const = default;
};

struct UARunState {
  std::vector<uint64_t> sequence;           // values in placement order
  std::vector<uint64_t> fragment_indices;   // strictly decreasing
  uint64_t stage = 0;                       // completed stages
  Nat steps_consumed;
  std::vector<StageEvent> stage_log;
  std::vector<std::pair<Nat, Nat>> oracle_log;  // query/answer per call

  nlohmann::json to_json() const;  // keys: sequence, k_list, stage_log, steps
};

// Stage machine enumerating a sequence under a proof channel. The program is
// assembled by the same seed construction that serves the recursion front
// end's self-emitting family, extended with a run-time stage driver, so its
// code carries its own description (see self_description_check). Proof search
// is fully delegated to the channel: the machine depends only on the query
// designation, while the theory and template bind when a run interprets the
// channel. Both arguments are validated here.
MachineProgram build_universal_program(const Theory& T,
                                       const StageTemplate& tmpl = {});

// Same stage discipline with every proof-channel query designated for the
// m-th jump channel instead of the plain one.
MachineProgram build_oracle_universal_program(const Theory& T, uint64_t m,
                                              const StageTemplate& tmpl = {});

// Runs the program against a scripted proof channel. The machine judges the
// hand-offs; the host mirrors the rule and the two verdicts must agree, as
// must the final registers and the assembled state whenever the budget ran
// out between hand-offs. Throws SemanticError on any disagreement.
UARunState run_universal(const MachineProgram& p, const ProofOracleScript& script,
                         const Nat& budget, const Theory& T,
                         const StageTemplate& tmpl = {});

// Sound proof channel: polls are answered, proofs never arrive.
UARunState run_universal(const MachineProgram& p, const Nat& budget,
                         const Theory& T, const StageTemplate& tmpl = {});

// Drives the program again from a recorded oracle log alone, asserting every
// query and answer against the record; the rebuilt state is byte for byte the
// original's.
UARunState replay_universal(const MachineProgram& p,
                            const std::vector<std::pair<Nat, Nat>>& log,
                            const Nat& budget, const Theory& T,
                            const StageTemplate& tmpl = {});

// Admissibility discipline replayed on the host alone, no machine involved.
// A fully delivered script yields exactly a run's stage log.
std::vector<StageEvent> replay_script(const ProofOracleScript& script,
                                      const Theory& T,
                                      const StageTemplate& tmpl = {});

// The built program contains its own description: rerouting the entry jump to
// the dormant rebuild block makes it print the unmodified program's code.
// Verdicts are cached per program; expensive on first call.
bool self_description_check(const MachineProgram& p);

}  // namespace logiclab
