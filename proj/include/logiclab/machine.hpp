#pragma once

#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "logiclab/godel.hpp"
#include "logiclab/nat.hpp"

namespace logiclab {

// Counter machine: three instructions plus a synchronous oracle query.
// Registers hold unbounded naturals and default to zero. decjz jumps when the
// register is zero and otherwise decrements and falls through. Falling off the
// end of the program halts, as does an explicit halt.
enum class MOp { Inc, DecJz, Halt, Oracle };

struct Instr {
  MOp op;
  size_t reg = 0;
  size_t target = 0;  // decjz only; target == code size means halt-by-exit
};

struct MachineProgram {
  std::vector<Instr> code;

  bool operator==(const MachineProgram& o) const;
};

// Throws SemanticError when a jump target lies outside [0, code size].
void validate_program(const MachineProgram& p);

// Total per query; machines treat a missing oracle as a configuration error.
using MachineOracle = std::function<Nat(const Nat&)>;

struct RunResult {
  bool halted = false;
  Nat output;               // register 0 at halt; zero when out of budget
  Nat steps;                // unit steps consumed (halt itself is free)
  std::vector<Nat> regs;    // final register file, trailing zeros trimmed
};

struct RunOptions {
  // The interpreter recognizes three canonical loop idioms (transfer, divide by
  // two, multiply-accumulate) and applies their effect in bulk with exact step
  // accounting. Off = pure small-step; both modes agree state-for-state.
  bool accelerate = true;
};

// Deterministic. Inputs load into registers 0..n-1. inc/decjz/oracle cost one
// step each; step counts routinely exceed machine words, hence the Nat budget.
RunResult run(const MachineProgram& p, const std::vector<Nat>& input,
              const MachineOracle& oracle, const Nat& step_budget,
              const RunOptions& opts = {});

// b appended to a with b's jump targets relocated past a.
MachineProgram concat(const MachineProgram& a, const MachineProgram& b);

// Registers a composed program may use for input; smn shifts this window.
inline constexpr size_t kSmnWindow = 8;
// Scratch registers the smn prologue owns; composed programs must not touch them.
inline constexpr size_t kSmnTmp = 61;
inline constexpr size_t kSmnZero = 62;

// Freezes leading arguments: run(smn(p, a), b) behaves as run(p, a ++ b) for
// programs that read input only from the register window and leave the scratch
// registers alone. Budgets differ by the prologue cost.
MachineProgram smn(const MachineProgram& p, const std::vector<Nat>& frozen);

nlohmann::json program_to_json(const MachineProgram& p);
MachineProgram program_from_json(const nlohmann::json& j);

// Per-instruction token flattening, without the leading kind and count tokens.
std::vector<Nat> instruction_tokens(const MachineProgram& p);

GodelCode godel_encode(const MachineProgram& p);
MachineProgram godel_decode_program(const Nat& value);

// Two-pass assembler: forward labels, unconditional jumps through a pinned
// zero register, and the canonical loop idioms the interpreter accelerates.
class Asm {
 public:
  using Label = size_t;

  explicit Asm(size_t zero_reg) : zero_(zero_reg) {}

  Label label();
  void bind(Label l);
  size_t pos() const { return code_.size(); }
  size_t zero_reg() const { return zero_; }

  void inc(size_t r);
  void decjz(size_t r, Label l);
  void halt();
  void oracle(size_t r);
  void jmp(Label l);  // decjz on the zero register

  // src drains into each listed destination (listed twice = twice per unit).
  void move(size_t src, std::initializer_list<size_t> dsts);
  void move(size_t src, const std::vector<size_t>& dsts);
  void copy(size_t src, size_t dst, size_t tmp);  // src preserved, tmp must be 0
  void clear(size_t r);                           // empty transfer loop
  void add_const(size_t r, size_t v);             // v unit increments
  void dbl(size_t r, size_t tmp);                 // r *= 2, tmp must be 0
  void load_const(size_t r, const Nat& v, size_t tmp);  // r must be 0 on entry
  // acc += f * src; f drains to 0, src preserved, t must be 0. Canonical shape.
  void mul_acc(size_t acc, size_t src, size_t f, size_t t);
  // q += r / 2, r drains to 0, control continues at even/odd by parity of r.
  void div2(size_t r, size_t q, Label even, Label odd);

  // Resolves labels. Throws SemanticError on an unbound label.
  MachineProgram finish();

 private:
  size_t zero_;
  std::vector<Instr> code_;
  std::vector<long> bound_;                         // label -> position or -1
  std::vector<std::pair<size_t, Label>> fixups_;    // instruction, label
};

}  // namespace logiclab
