#pragma once

#include <memory>
#include <optional>

#include <json.hpp>

#include "logiclab/machine.hpp"
#include "logiclab/proof.hpp"
#include "logiclab/theory.hpp"

namespace logiclab {

// Self-reproducing program: run on empty input it halts with its own code in
// register 0. Built once and cached; the build inflates a seed writer until
// the layout it describes is the layout it sits in.
const MachineProgram& quine_program();

// Program that halts with `code` in register 0 when started on empty
// registers. code must be >= 1 (every stream value is).
MachineProgram emitter_for(const Nat& code);

// Machine computing code |-> code of emitter_for(code), input and output in
// register 0. The machine route and the host route (godel_encode of
// emitter_for) must agree bit for bit; tests hold them against each other.
const MachineProgram& code_emitter_transform();

// Recursion-theorem front end. transform maps program codes to program codes
// (register 0 in, register 0 out). Returns e whose fresh-start behavior
// matches the program coded by transform(code of e). The construction
// recognizes three transform shapes by probing: identity on codes, constant
// code, and emit-the-input; anything else is rejected rather than guessed at.
MachineProgram kleene_fixed_point(const MachineProgram& transform);

struct FixedPointCertificate {
  FormulaPtr psi;                  // the diagonal sentence
  FormulaPtr phi;                  // template, exactly one free variable
  FormulaPtr biconditional;        // psi <-> phi at the constant naming psi
  Proof proof;                     // checks in `theory` with fragment 1
  std::shared_ptr<Theory> theory;  // base plus the substitution apparatus
  Nat psi_code;                    // code of psi over the extended signature
  Nat theta_code;                  // code of the diagonalized template
  nlohmann::json to_json() const;
};

// Diagonal sentence psi together with a machine-checked proof of
// psi <-> phi(c) where the fresh constant c names psi's code. The extended
// theory adds a unary substitution function, constants for the two codes
// involved, and the one defining equation the proof needs; the equation's
// arithmetic content is recomputed through the codec and must match.
FixedPointCertificate godel_carnap_fixed_point(const FormulaPtr& phi,
                                               const Theory& base);

struct TarskiReport {
  FormulaPtr candidate;                   // proposed truth predicate
  FixedPointCertificate liar;             // psi <-> not candidate(c)
  FormulaPtr failing_biconditional;       // candidate(c) <-> psi
  bool refuted = false;
  std::optional<Proof> inconsistency;     // contradiction from the schema
  std::shared_ptr<Theory> schema_theory;  // theory the refutation cites
  nlohmann::json to_json() const;
};

// Builds the liar fixed point against the candidate truth predicate and
// derives a contradiction from the single disquotation instance the schema
// would have to supply for it.
TarskiReport tarski_obstruction_demo(const FormulaPtr& candidate,
                                     const Theory& base);

}  // namespace logiclab
