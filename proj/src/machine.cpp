#include "logiclab/machine.hpp"

#include <algorithm>

#include "logiclab/logic.hpp"

namespace logiclab {

namespace {

size_t nbits(const Nat& x) {
  if (x == 0) return 0;
  return mpz_sizeinbase(x.get_mpz_t(), 2);
}

// a * b, routed through a shift when a factor is a power of two; the bulk
// moves below hit that case constantly and a full multiply would be quadratic.
Nat mul_shift(const Nat& a, const Nat& b) {
  Nat r;
  if (mpz_popcount(a.get_mpz_t()) == 1)
    mpz_mul_2exp(r.get_mpz_t(), b.get_mpz_t(), mpz_sizeinbase(a.get_mpz_t(), 2) - 1);
  else if (mpz_popcount(b.get_mpz_t()) == 1)
    mpz_mul_2exp(r.get_mpz_t(), a.get_mpz_t(), mpz_sizeinbase(b.get_mpz_t(), 2) - 1);
  else
    r = a * b;
  return r;
}

}  // namespace

bool MachineProgram::operator==(const MachineProgram& o) const {
  if (code.size() != o.code.size()) return false;
  for (size_t i = 0; i < code.size(); ++i) {
    const Instr& a = code[i];
    const Instr& b = o.code[i];
    if (a.op != b.op) return false;
    if (a.op != MOp::Halt && a.reg != b.reg) return false;
    if (a.op == MOp::DecJz && a.target != b.target) return false;
  }
  return true;
}

void validate_program(const MachineProgram& p) {
  for (size_t i = 0; i < p.code.size(); ++i) {
    const Instr& in = p.code[i];
    if (in.op == MOp::DecJz && in.target > p.code.size())
      throw SemanticError("machine: jump target out of range at instruction " +
                          std::to_string(i));
  }
}

RunResult run(const MachineProgram& p, const std::vector<Nat>& input,
              const MachineOracle& oracle, const Nat& step_budget,
              const RunOptions& opts) {
  validate_program(p);
  if (step_budget < 0) throw SemanticError("machine: negative step budget");

  size_t max_reg = 0;
  for (const Instr& in : p.code)
    if (in.op != MOp::Halt) max_reg = std::max(max_reg, in.reg);
  std::vector<Nat> regs(std::max(input.size(), max_reg + 1));
  for (size_t i = 0; i < input.size(); ++i) {
    if (input[i] < 0) throw SemanticError("machine: negative input");
    regs[i] = input[i];
  }

  const size_t n = p.code.size();
  size_t pc = 0;
  Nat avail = step_budget;

  auto finish = [&](bool halted) {
    RunResult r;
    r.halted = halted;
    r.steps = step_budget - avail;
    if (halted && !regs.empty()) r.output = regs[0];
    while (!regs.empty() && regs.back() == 0) regs.pop_back();
    r.regs = std::move(regs);
    return r;
  };

  // Transfer loop: DecJz(r, X); Inc a_1 .. Inc a_k; DecJz(z, here) with z zero.
  // Each pass costs k+2 steps; full drain adds one exit step.
  auto try_transfer = [&]() -> bool {
    const Instr& head = p.code[pc];
    const size_t r = head.reg;
    size_t j = pc + 1;
    while (j < n && p.code[j].op == MOp::Inc) ++j;
    if (j >= n) return false;
    const Instr& back = p.code[j];
    if (back.op != MOp::DecJz || back.target != pc) return false;
    const size_t z = back.reg;
    if (z == r || regs[z] != 0) return false;
    for (size_t i = pc + 1; i < j; ++i)
      if (p.code[i].reg == r || p.code[i].reg == z) return false;
    if (regs[r] == 0) return false;
    const size_t k = j - pc - 1;
    const Nat per = k + 2;
    Nat it;
    if (nbits(avail) >= nbits(regs[r]) + nbits(per) + 2) it = regs[r];
    else { it = avail / per; if (it > regs[r]) it = regs[r]; }
    if (it == 0) return false;
    for (size_t i = pc + 1; i < j; ++i) regs[p.code[i].reg] += it;
    avail -= it * per;
    regs[r] -= it;
    if (regs[r] == 0 && avail > 0) { avail -= 1; pc = head.target; }
    return true;
  };

  // Halving loop: DecJz(r, EV); DecJz(r, OD); Inc q; DecJz(z, here).
  // Four steps move one pair from r to q; the tail pair is left to the
  // small-step path so the exit parity comes out exactly.
  auto try_halve = [&]() -> bool {
    if (pc + 3 >= n) return false;
    const Instr& i0 = p.code[pc];
    const Instr& i1 = p.code[pc + 1];
    const Instr& i2 = p.code[pc + 2];
    const Instr& i3 = p.code[pc + 3];
    if (i1.op != MOp::DecJz || i1.reg != i0.reg) return false;
    if (i2.op != MOp::Inc) return false;
    if (i3.op != MOp::DecJz || i3.target != pc) return false;
    const size_t r = i0.reg, q = i2.reg, z = i3.reg;
    if (q == r || z == r || q == z) return false;
    if (regs[z] != 0 || regs[r] < 2) return false;
    const Nat pairs = regs[r] / 2;
    Nat it;
    if (nbits(avail) >= nbits(pairs) + 5) it = pairs;
    else { it = avail / 4; if (it > pairs) it = pairs; }
    if (it == 0) return false;
    regs[q] += it;
    regs[r] -= 2 * it;
    avail -= 4 * it;
    return true;
  };

  // Multiply block as Asm::mul_acc lays it out. One outer pass with src value
  // s costs 7s+4 steps; a full drain of f adds one exit step.
  auto try_multiply = [&]() -> bool {
    if (pc + 9 > n) return false;
    const Instr* c = &p.code[pc];
    if (c[0].target != pc + 9) return false;
    if (c[1].op != MOp::DecJz || c[1].target != pc + 5) return false;
    if (c[2].op != MOp::Inc || c[3].op != MOp::Inc) return false;
    if (c[4].op != MOp::DecJz || c[4].target != pc + 1) return false;
    if (c[5].op != MOp::DecJz || c[5].target != pc + 8) return false;
    if (c[6].op != MOp::Inc) return false;
    if (c[7].op != MOp::DecJz || c[7].target != pc + 5) return false;
    if (c[8].op != MOp::DecJz || c[8].target != pc) return false;
    const size_t f = c[0].reg, s = c[1].reg, t = c[2].reg, acc = c[3].reg,
                 z = c[4].reg;
    if (c[5].reg != t || c[6].reg != s || c[7].reg != z || c[8].reg != z)
      return false;
    const size_t roles[5] = {f, s, t, acc, z};
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j)
        if (roles[i] == roles[j]) return false;
    if (regs[z] != 0 || regs[t] != 0 || regs[f] == 0) return false;
    const Nat per = 7 * regs[s] + 4;
    Nat it;
    if (nbits(avail) >= nbits(regs[f]) + nbits(per) + 2) it = regs[f];
    else { it = avail / per; if (it > regs[f]) it = regs[f]; }
    if (it == 0) return false;
    regs[acc] += mul_shift(it, regs[s]);
    avail -= mul_shift(it, per);
    regs[f] -= it;
    if (regs[f] == 0 && avail > 0) { avail -= 1; pc += 9; }
    return true;
  };

  while (true) {
    if (pc >= n) return finish(true);
    const Instr& in = p.code[pc];
    if (in.op == MOp::Halt) return finish(true);
    if (opts.accelerate && in.op == MOp::DecJz) {
      // self-jump on an empty register: state never changes again, so the
      // whole remaining budget burns here
      if (regs[in.reg] == 0 && in.target == pc) { avail = 0; return finish(false); }
      if (try_multiply() || try_halve() || try_transfer()) continue;
    }
    if (avail == 0) return finish(false);
    avail -= 1;
    switch (in.op) {
      case MOp::Inc:
        regs[in.reg] += 1;
        ++pc;
        break;
      case MOp::DecJz:
        if (regs[in.reg] == 0) {
          pc = in.target;
        } else {
          regs[in.reg] -= 1;
          ++pc;
        }
        break;
      case MOp::Oracle:
        if (!oracle)
          throw SemanticError("machine: oracle query without an oracle");
        regs[in.reg] = oracle(regs[in.reg]);
        ++pc;
        break;
      case MOp::Halt:
        break;  // unreachable
    }
  }
}

MachineProgram concat(const MachineProgram& a, const MachineProgram& b) {
  MachineProgram out = a;
  const size_t off = a.code.size();
  for (Instr in : b.code) {
    if (in.op == MOp::DecJz) in.target += off;
    out.code.push_back(in);
  }
  return out;
}

MachineProgram smn(const MachineProgram& p, const std::vector<Nat>& frozen) {
  validate_program(p);
  if (frozen.empty()) return p;
  const size_t m = frozen.size();
  for (const Nat& v : frozen)
    if (v < 0) throw SemanticError("smn: negative argument");
  Asm a(kSmnZero);
  for (size_t i = kSmnWindow; i-- > 0;) a.move(i, {i + m});
  for (size_t j = 0; j < m; ++j) a.load_const(j, frozen[j], kSmnTmp);
  return concat(a.finish(), p);
}

nlohmann::json program_to_json(const MachineProgram& p) {
  nlohmann::json instrs = nlohmann::json::array();
  for (const Instr& in : p.code) {
    nlohmann::json j;
    switch (in.op) {
      case MOp::Inc:
        j = {{"op", "inc"}, {"reg", in.reg}};
        break;
      case MOp::DecJz:
        j = {{"op", "decjz"}, {"reg", in.reg}, {"target", in.target}};
        break;
      case MOp::Halt:
        j = {{"op", "halt"}};
        break;
      case MOp::Oracle:
        j = {{"op", "oracle"}, {"reg", in.reg}};
        break;
    }
    instrs.push_back(std::move(j));
  }
  return {{"instructions", std::move(instrs)}};
}

MachineProgram program_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("instructions") ||
      !j["instructions"].is_array())
    throw CodingError("program json: expected an instruction list");
  MachineProgram p;
  for (const auto& e : j["instructions"]) {
    if (!e.is_object() || !e.contains("op"))
      throw CodingError("program json: instruction without op");
    const std::string op = e["op"].get<std::string>();
    Instr in;
    if (op == "inc") {
      in = {MOp::Inc, e.at("reg").get<size_t>(), 0};
    } else if (op == "decjz") {
      in = {MOp::DecJz, e.at("reg").get<size_t>(), e.at("target").get<size_t>()};
    } else if (op == "halt") {
      in = {MOp::Halt, 0, 0};
    } else if (op == "oracle") {
      in = {MOp::Oracle, e.at("reg").get<size_t>(), 0};
    } else {
      throw CodingError("program json: unknown op " + op);
    }
    p.code.push_back(in);
  }
  validate_program(p);
  return p;
}

std::vector<Nat> instruction_tokens(const MachineProgram& p) {
  std::vector<Nat> toks;
  for (const Instr& in : p.code) {
    switch (in.op) {
      case MOp::Inc:
        toks.push_back(0);
        toks.push_back(in.reg);
        break;
      case MOp::DecJz:
        toks.push_back(1);
        toks.push_back(in.reg);
        toks.push_back(in.target);
        break;
      case MOp::Halt:
        toks.push_back(2);
        break;
      case MOp::Oracle:
        toks.push_back(3);
        toks.push_back(in.reg);
        break;
    }
  }
  return toks;
}

GodelCode godel_encode(const MachineProgram& p) {
  std::vector<Nat> toks{static_cast<unsigned long>(CodeKind::Program)};
  toks.push_back(p.code.size());
  for (Nat& t : instruction_tokens(p)) toks.push_back(std::move(t));
  return {tokens_to_stream(toks), CodeKind::Program};
}

MachineProgram godel_decode_program(const Nat& value) {
  const std::vector<Nat> toks = stream_to_tokens(value);
  if (toks.size() < 2 || toks[0] != static_cast<unsigned long>(CodeKind::Program))
    throw CodingError("program code: bad kind tag");
  const size_t count = static_cast<size_t>(to_u64(toks[1]));
  MachineProgram p;
  size_t i = 2;
  for (size_t k = 0; k < count; ++k) {
    if (i >= toks.size()) throw CodingError("program code: truncated");
    const auto op = to_u64(toks[i++]);
    Instr in;
    switch (op) {
      case 0:
        if (i >= toks.size()) throw CodingError("program code: truncated");
        in = {MOp::Inc, static_cast<size_t>(to_u64(toks[i++])), 0};
        break;
      case 1:
        if (i + 1 >= toks.size()) throw CodingError("program code: truncated");
        in.op = MOp::DecJz;
        in.reg = static_cast<size_t>(to_u64(toks[i++]));
        in.target = static_cast<size_t>(to_u64(toks[i++]));
        break;
      case 2:
        in = {MOp::Halt, 0, 0};
        break;
      case 3:
        if (i >= toks.size()) throw CodingError("program code: truncated");
        in = {MOp::Oracle, static_cast<size_t>(to_u64(toks[i++])), 0};
        break;
      default:
        throw CodingError("program code: unknown opcode");
    }
    if (in.op == MOp::DecJz && in.target > count)
      throw CodingError("program code: jump target out of range");
    p.code.push_back(in);
  }
  if (i != toks.size()) throw CodingError("program code: trailing tokens");
  return p;
}

Asm::Label Asm::label() {
  bound_.push_back(-1);
  return bound_.size() - 1;
}

void Asm::bind(Label l) {
  if (bound_.at(l) != -1) throw SemanticError("asm: label bound twice");
  bound_[l] = static_cast<long>(code_.size());
}

void Asm::inc(size_t r) { code_.push_back({MOp::Inc, r, 0}); }

void Asm::decjz(size_t r, Label l) {
  fixups_.push_back({code_.size(), l});
  code_.push_back({MOp::DecJz, r, 0});
}

void Asm::halt() { code_.push_back({MOp::Halt, 0, 0}); }

void Asm::oracle(size_t r) { code_.push_back({MOp::Oracle, r, 0}); }

void Asm::jmp(Label l) { decjz(zero_, l); }

void Asm::move(size_t src, std::initializer_list<size_t> dsts) {
  move(src, std::vector<size_t>(dsts));
}

void Asm::move(size_t src, const std::vector<size_t>& dsts) {
  for (size_t d : dsts)
    if (d == src || d == zero_) throw SemanticError("asm: bad move destination");
  Label top = label(), end = label();
  bind(top);
  decjz(src, end);
  for (size_t d : dsts) inc(d);
  jmp(top);
  bind(end);
}

void Asm::copy(size_t src, size_t dst, size_t tmp) {
  move(src, {dst, tmp});
  move(tmp, {src});
}

void Asm::clear(size_t r) { move(r, {}); }

void Asm::add_const(size_t r, size_t v) {
  for (size_t i = 0; i < v; ++i) inc(r);
}

void Asm::dbl(size_t r, size_t tmp) {
  move(r, {tmp, tmp});
  move(tmp, {r});
}

void Asm::load_const(size_t r, const Nat& v, size_t tmp) {
  if (v < 0) throw SemanticError("asm: negative constant");
  if (v == 0) return;
  const size_t bits = mpz_sizeinbase(v.get_mpz_t(), 2);
  for (size_t i = bits; i-- > 0;) {
    if (i + 1 < bits) dbl(r, tmp);
    if (mpz_tstbit(v.get_mpz_t(), i)) inc(r);
  }
}

void Asm::mul_acc(size_t acc, size_t src, size_t f, size_t t) {
  const size_t roles[5] = {f, src, t, acc, zero_};
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j)
      if (roles[i] == roles[j]) throw SemanticError("asm: mul_acc register clash");
  Label lout = label(), li = label(), lm = label(), lm2 = label(), lend = label();
  bind(lout);
  decjz(f, lend);
  bind(li);
  decjz(src, lm);
  inc(t);
  inc(acc);
  jmp(li);
  bind(lm);
  decjz(t, lm2);
  inc(src);
  jmp(lm);
  bind(lm2);
  jmp(lout);
  bind(lend);
}

void Asm::div2(size_t r, size_t q, Label even, Label odd) {
  Label top = label();
  bind(top);
  decjz(r, even);
  decjz(r, odd);
  inc(q);
  jmp(top);
}

MachineProgram Asm::finish() {
  for (const auto& [at, l] : fixups_) {
    if (bound_.at(l) < 0) throw SemanticError("asm: unbound label");
    code_[at].target = static_cast<size_t>(bound_[l]);
  }
  MachineProgram p{code_};
  validate_program(p);
  return p;
}

}  // namespace logiclab
