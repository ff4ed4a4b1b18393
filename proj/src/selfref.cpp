#include "logiclab/selfref.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "logiclab/godel.hpp"
#include "logiclab/logic.hpp"
#include "selfref_seed.hpp"

namespace logiclab {

namespace {

// ---------------------------------------------------------------------------
// Instruction shapes shared by the host-side program builders and the
// machine-side stream writer. Targets are block-relative when rel is set.

struct ShapeInstr {
  MOp op;
  size_t reg = 0;
  bool rel = false;
  size_t tv = 0;
};

// Doubling step for register 1 via scratch 2 (zero register 3); identical to
// the assembler's dbl() layout so the interpreter's bulk paths recognize it.
const std::vector<ShapeInstr>& dbl_shape() {
  static const std::vector<ShapeInstr> s{
      {MOp::DecJz, 1, true, 4}, {MOp::Inc, 2},  {MOp::Inc, 2},
      {MOp::DecJz, 3, true, 0}, {MOp::DecJz, 2, true, 7},
      {MOp::Inc, 1},            {MOp::DecJz, 3, true, 4},
  };
  return s;
}

// Hand-off tail: move register 1 into register 0 and stop.
const std::vector<ShapeInstr>& emit_tail_shape() {
  static const std::vector<ShapeInstr> s{
      {MOp::DecJz, 1, true, 3},
      {MOp::Inc, 0},
      {MOp::DecJz, 3, true, 0},
      {MOp::Halt},
  };
  return s;
}

size_t bitlen_sz(size_t v) {
  size_t n = 0;
  for (; v; v >>= 1) ++n;
  return n;
}

constexpr size_t kMaxTokenLen = 20;  // supported bit length of position tokens
constexpr size_t kFlushPeriod = 64;  // blocks between chunk flushes
// Longest constant run the writer can shift in by one factor.
constexpr size_t kMaxRunLen = 2 * kMaxTokenLen - 1;

// A maximal stretch of tokens whose field bits are independent of position,
// packed the way the stream codec lays fields out: token order, each field
// most-significant-bit first.
struct RunSpec {
  Nat value;
  size_t len = 0;
};

void run_push(RunSpec& r, size_t token) {
  const size_t w = token + 1;
  const size_t fl = 2 * bitlen_sz(w) - 1;
  mpz_mul_2exp(r.value.get_mpz_t(), r.value.get_mpz_t(), fl);
  r.value += static_cast<unsigned long>(w);
  r.len += fl;
}

struct PlanOp {
  bool is_pos = false;
  size_t delta = 0;  // token = current position + delta when is_pos
  size_t run = 0;    // index into runs otherwise
};

struct EmitPlan {
  std::vector<PlanOp> ops;
  std::vector<RunSpec> runs;
};

// Flattens an instruction shape into alternating constant runs and
// position-relative tokens.
EmitPlan plan_of(const std::vector<ShapeInstr>& seq) {
  EmitPlan p;
  RunSpec cur;
  auto flush = [&] {
    if (cur.len == 0) return;
    p.ops.push_back({false, 0, p.runs.size()});
    p.runs.push_back(cur);
    cur = {};
  };
  // Long straight-line stretches split into several runs so no single run
  // outgrows the writer's shift factors.
  auto push = [&](size_t token) {
    if (cur.len + 2 * bitlen_sz(token + 1) - 1 > kMaxRunLen) flush();
    run_push(cur, token);
  };
  for (const ShapeInstr& si : seq) {
    switch (si.op) {
      case MOp::Inc:
        push(0);
        push(si.reg);
        break;
      case MOp::DecJz:
        push(1);
        push(si.reg);
        if (si.rel) {
          flush();
          p.ops.push_back({true, si.tv, 0});
        } else {
          push(si.tv);
        }
        break;
      case MOp::Halt:
        push(2);
        break;
      case MOp::Oracle:
        push(3);
        push(si.reg);
        break;
    }
  }
  flush();
  return p;
}

// ---------------------------------------------------------------------------
// The stream writer. Reads a data value, reverses it to walk its bits from
// the top, and assembles the code of the program that rebuilds the value by
// doubling: header, optional replay of the data bits themselves, then one
// doubling block per data bit. Two instantiations share this builder: the
// emitter transform (data arrives in register 0, no replay) and the
// self-reproducing seed (data arrives in register 1 and is replayed so the
// emitted code contains its own description).

struct WriterCfg {
  bool input_in_r0 = false;
  bool append_payload = false;
  size_t pos_base = 0;    // position of the first doubling block
  size_t count_base = 0;  // instruction count beyond blocks and bit markers
  std::vector<ShapeInstr> tail;
};

// Writer register roles. Registers 1..3 double as the emitted code's working
// set, which is fine: the writer only runs on the host side of the build.
constexpr size_t W_R0 = 0, W_R1 = 1, W_RT = 2, W_RZ = 3;
constexpr size_t W_RDR = 4, W_RDR2 = 5, W_RDR3 = 6, W_RM = 7, W_RPOP = 8;
constexpr size_t W_RQ = 9, W_RB = 10, W_RW = 11, W_RW2 = 12, W_RL = 13;
constexpr size_t W_RF1 = 14, W_RF2 = 15, W_RMACC = 16, W_RMACC2 = 17;
constexpr size_t W_RCH = 18, W_RPOW = 19;
constexpr size_t W_RCOUNT = 20, W_RPOS = 21, W_RMC = 22, W_RFC = 23;
constexpr size_t W_RT2 = 24, W_RACC2 = 25, W_RFOUR = 26;
constexpr size_t W_RRETP = 27, W_RRETF = 28;
constexpr size_t kWriterDynBase = 29;

MachineProgram build_stream_writer(const WriterCfg& cfg) {
  const EmitPlan block = plan_of(dbl_shape());
  const EmitPlan tail = plan_of(cfg.tail);
  RunSpec kind_run;
  run_push(kind_run, 4);
  RunSpec opt_run;
  run_push(opt_run, 0);
  run_push(opt_run, 1);

  // Register assignment: odd shift factors first, then per-length even
  // factors, then one register per distinct constant run value.
  size_t next_reg = kWriterDynBase;
  std::vector<size_t> pow_reg(kMaxTokenLen + 1, 0);
  for (size_t j = 1; j <= kMaxTokenLen; ++j) pow_reg[j] = next_reg++;
  std::map<size_t, size_t> fac_regs;
  std::map<std::pair<std::string, size_t>, size_t> val_regs;
  auto fac_reg = [&](size_t len) -> size_t {
    if (len % 2 == 1) {
      if ((len + 1) / 2 > kMaxTokenLen)
        throw SemanticError("writer: constant run too long");
      return pow_reg[(len + 1) / 2];
    }
    auto it = fac_regs.find(len);
    if (it == fac_regs.end()) it = fac_regs.emplace(len, next_reg++).first;
    return it->second;
  };
  auto val_reg = [&](const RunSpec& r) -> size_t {
    const auto key = std::make_pair(r.value.get_str(), r.len);
    auto it = val_regs.find(key);
    if (it == val_regs.end()) it = val_regs.emplace(key, next_reg++).first;
    return it->second;
  };
  auto touch = [&](const RunSpec& r) {
    fac_reg(r.len);
    val_reg(r);
  };
  touch(kind_run);
  for (const RunSpec& r : block.runs) touch(r);
  touch(opt_run);
  for (const RunSpec& r : tail.runs) touch(r);

  Asm a(W_RZ);
  const Asm::Label kPosApp = a.label();
  const Asm::Label kFlush = a.label();
  const Asm::Label kTrap = a.label();
  std::vector<Asm::Label> pos_rets, flush_rets;

  // chunk := chunk * 2^len + value; pending power keeps pace
  auto append_run = [&](const RunSpec& r) {
    const size_t fv = fac_reg(r.len);
    a.copy(fv, W_RF1, W_RT2);
    a.copy(fv, W_RF2, W_RT2);
    a.mul_acc(W_RMACC, W_RCH, W_RF1, W_RT);
    a.clear(W_RCH);
    a.move(W_RMACC, {W_RCH});
    a.copy(val_reg(r), W_RCH, W_RT2);
    a.mul_acc(W_RMACC2, W_RPOW, W_RF2, W_RT);
    a.clear(W_RPOW);
    a.move(W_RMACC2, {W_RPOW});
  };
  // position-dependent token: field value w sized by its own bit length
  auto pos_site = [&](size_t delta) {
    a.copy(W_RPOS, W_RW2, W_RT2);
    a.add_const(W_RW2, delta + 1);
    a.add_const(W_RRETP, pos_rets.size());
    a.jmp(kPosApp);
    const Asm::Label ret = a.label();
    a.bind(ret);
    pos_rets.push_back(ret);
  };
  auto count_site = [&] {
    a.move(W_RCOUNT, {W_RW2});
    a.inc(W_RW2);
    a.add_const(W_RRETP, pos_rets.size());
    a.jmp(kPosApp);
    const Asm::Label ret = a.label();
    a.bind(ret);
    pos_rets.push_back(ret);
  };
  auto flush_site = [&] {
    a.add_const(W_RRETF, flush_rets.size());
    a.jmp(kFlush);
    const Asm::Label ret = a.label();
    a.bind(ret);
    flush_rets.push_back(ret);
  };
  auto emit_plan = [&](const EmitPlan& p) {
    for (const PlanOp& op : p.ops) {
      if (op.is_pos) pos_site(op.delta);
      else append_run(p.runs[op.run]);
    }
  };
  // RB += low bit of src; src halves
  auto extract_bit = [&](size_t src) {
    const Asm::Label ev = a.label(), od = a.label();
    a.div2(src, W_RQ, ev, od);
    a.bind(od);
    a.inc(W_RB);
    a.bind(ev);
    a.move(W_RQ, {src});
  };
  auto drain_bit = [&] {
    const Asm::Label z = a.label();
    a.decjz(W_RB, z);
    a.bind(z);
  };

  if (cfg.input_in_r0) a.move(W_R0, {W_R1});

  // Constant setup. Odd shift factors 2^(2j-1) grow by repeated times-four.
  a.add_const(pow_reg[1], 2);
  for (size_t j = 2; j <= kMaxTokenLen; ++j) {
    a.add_const(W_RFOUR, 4);
    a.mul_acc(pow_reg[j], pow_reg[j - 1], W_RFOUR, W_RT);
  }
  for (const auto& [len, reg] : fac_regs) a.load_const(reg, Nat(1) << len, W_RT);
  for (const auto& [key, reg] : val_regs) a.load_const(reg, Nat(key.first), W_RT);
  a.inc(W_RPOW);
  a.add_const(W_RFC, kFlushPeriod - 1);

  // Reverse the data value so its bits come off top-first; tally length and
  // set bits along the way.
  {
    const Asm::Label top = a.label(), done = a.label(), next = a.label();
    a.bind(top);
    a.decjz(W_R1, done);
    a.inc(W_R1);
    a.dbl(W_RDR, W_RT);
    extract_bit(W_R1);
    a.inc(W_RM);
    a.decjz(W_RB, next);
    a.inc(W_RDR);
    a.inc(W_RPOP);
    a.bind(next);
    a.jmp(top);
    a.bind(done);
  }
  a.move(W_RDR, {W_RDR2, W_RDR3});

  // Header: sentinel bit, kind token, instruction count.
  a.inc(W_R0);
  a.load_const(W_RPOS, cfg.pos_base, W_RT);
  a.load_const(W_RCOUNT, cfg.count_base, W_RT);
  {
    const Asm::Label top = a.label(), done = a.label();
    a.copy(W_RM, W_RMC, W_RT2);
    a.decjz(W_RMC, done);
    a.bind(top);
    a.decjz(W_RMC, done);
    a.add_const(W_RCOUNT, 7);
    a.jmp(top);
    a.bind(done);
  }
  a.move(W_RPOP, {W_RCOUNT});
  append_run(kind_run);
  count_site();

  // Replay of the data bits below their leading one, for the code that must
  // carry its own description.
  if (cfg.append_payload) {
    extract_bit(W_RDR2);
    drain_bit();
    {
      const Asm::Label top = a.label(), done = a.label(), noi = a.label();
      a.copy(W_RM, W_RMC, W_RT2);
      a.decjz(W_RMC, done);
      a.bind(top);
      a.decjz(W_RMC, done);
      a.dbl(W_RACC2, W_RT);
      extract_bit(W_RDR2);
      a.decjz(W_RB, noi);
      a.inc(W_RACC2);
      a.bind(noi);
      a.jmp(top);
      a.bind(done);
    }
    {
      const Asm::Label top = a.label(), done = a.label();
      a.inc(W_RF1);
      a.copy(W_RM, W_RMC, W_RT2);
      a.decjz(W_RMC, done);
      a.bind(top);
      a.decjz(W_RMC, done);
      a.dbl(W_RF1, W_RT);
      a.jmp(top);
      a.bind(done);
    }
    a.copy(W_RF1, W_RF2, W_RT2);
    a.mul_acc(W_RMACC, W_RCH, W_RF1, W_RT);
    a.clear(W_RCH);
    a.move(W_RMACC, {W_RCH});
    a.move(W_RACC2, {W_RCH});
    a.mul_acc(W_RMACC2, W_RPOW, W_RF2, W_RT);
    a.clear(W_RPOW);
    a.move(W_RMACC2, {W_RPOW});
    flush_site();
  }

  // Rebuild preamble, then one doubling block per data bit after the top one,
  // with a bit marker after each block whose bit is set.
  append_run(opt_run);
  {
    const Asm::Label top = a.label(), done = a.label(), noi = a.label();
    const Asm::Label dof = a.label(), nf = a.label();
    a.copy(W_RM, W_RMC, W_RT2);
    a.decjz(W_RMC, done);
    extract_bit(W_RDR3);
    drain_bit();
    a.bind(top);
    a.decjz(W_RMC, done);
    emit_plan(block);
    extract_bit(W_RDR3);
    a.add_const(W_RPOS, 7);
    a.decjz(W_RB, noi);
    a.inc(W_RPOS);
    append_run(opt_run);
    a.bind(noi);
    a.decjz(W_RFC, dof);
    a.jmp(nf);
    a.bind(dof);
    flush_site();
    a.add_const(W_RFC, kFlushPeriod - 1);
    a.bind(nf);
    a.jmp(top);
    a.bind(done);
  }
  emit_plan(tail);
  flush_site();
  a.halt();

  // Token appender for position-sized fields: find the field width from the
  // value itself, then shift the chunk and the pending power together.
  {
    a.bind(kPosApp);
    const Asm::Label blt = a.label(), bld = a.label();
    a.copy(W_RW2, W_RW, W_RT2);
    a.bind(blt);
    a.decjz(W_RW, bld);
    a.inc(W_RW);
    a.inc(W_RL);
    const Asm::Label ev = a.label(), od = a.label();
    a.div2(W_RW, W_RQ, ev, od);
    a.bind(ev);
    a.bind(od);
    a.move(W_RQ, {W_RW});
    a.jmp(blt);
    a.bind(bld);
    std::vector<Asm::Label> brs(kMaxTokenLen + 1);
    for (size_t j = 1; j <= kMaxTokenLen; ++j) brs[j] = a.label();
    const Asm::Label join = a.label();
    a.decjz(W_RL, kTrap);
    for (size_t j = 1; j <= kMaxTokenLen; ++j) a.decjz(W_RL, brs[j]);
    a.jmp(kTrap);
    for (size_t j = 1; j <= kMaxTokenLen; ++j) {
      a.bind(brs[j]);
      a.copy(pow_reg[j], W_RF1, W_RT2);
      a.copy(pow_reg[j], W_RF2, W_RT2);
      a.jmp(join);
    }
    a.bind(join);
    a.mul_acc(W_RMACC, W_RCH, W_RF1, W_RT);
    a.clear(W_RCH);
    a.move(W_RMACC, {W_RCH});
    a.move(W_RW2, {W_RCH});
    a.mul_acc(W_RMACC2, W_RPOW, W_RF2, W_RT);
    a.clear(W_RPOW);
    a.move(W_RMACC2, {W_RPOW});
    for (const Asm::Label ret : pos_rets) a.decjz(W_RRETP, ret);
    a.jmp(kTrap);
  }

  // Chunk flush: output := output * pending-power + chunk.
  {
    a.bind(kFlush);
    a.mul_acc(W_RMACC, W_R0, W_RPOW, W_RT);
    a.clear(W_R0);
    a.move(W_RCH, {W_RMACC});
    a.move(W_RMACC, {W_R0});
    a.inc(W_RPOW);
    for (const Asm::Label ret : flush_rets) a.decjz(W_RRETF, ret);
    a.jmp(kTrap);
  }

  a.bind(kTrap);
  a.jmp(kTrap);
  return a.finish();
}

// ---------------------------------------------------------------------------
// Seed assembly: entry jump, padded writer, then the loader that rebuilds the
// writer's description and hands it back to the writer.

MachineProgram loader_program(const Nat& d, size_t lstart, size_t back) {
  MachineProgram L;
  L.code.push_back({MOp::Inc, 1, 0});
  const size_t m = mpz_sizeinbase(d.get_mpz_t(), 2);
  for (size_t i = m - 1; i-- > 0;) {
    const size_t at = lstart + L.code.size();
    for (const ShapeInstr& si : dbl_shape())
      L.code.push_back({si.op, si.reg, si.rel ? at + si.tv : si.tv});
    if (mpz_tstbit(d.get_mpz_t(), i)) L.code.push_back({MOp::Inc, 1, 0});
  }
  L.code.push_back({MOp::DecJz, 3, back});
  return L;
}

const Nat& quine_budget() {
  static const Nat b = Nat(1) << 12000000;
  return b;
}

// Reproduction is checked once; later callers reuse the verdict.
const MachineProgram& quine_checked() {
  static const MachineProgram& q = []() -> const MachineProgram& {
    const MachineProgram& p = quine_program();
    const RunResult r = run(p, {}, nullptr, quine_budget());
    if (!r.halted || r.output != godel_encode(p).value)
      throw SemanticError("kleene: self-emitting seed failed its reproduction check");
    return p;
  }();
  return q;
}

MachineProgram prog(std::vector<Instr> in) {
  MachineProgram p;
  p.code = std::move(in);
  return p;
}

}  // namespace

namespace seed_detail {

SeedLayout recursion_seed(const std::vector<Instr>& driver) {
  // Layout: [entry][driver][writer][loader]. The driver rides inside the
  // replayed data region, so its tokens need no emission machinery of their
  // own and every layout constant is known before the writer is built. The
  // writer's own size still feeds its header constants, so iterate until the
  // declared layout matches the assembled one, then pad to it exactly.
  const size_t nD = driver.size();
  size_t nB = 600;
  MachineProgram B;
  for (int round = 0;; ++round) {
    if (round > 25) throw SemanticError("seed: layout failed to settle");
    WriterCfg cfg;
    cfg.append_payload = true;
    cfg.pos_base = nD + nB + 2;
    cfg.count_base = nD + nB + 2;
    cfg.tail = {{MOp::DecJz, 3, false, nD + 1}};  // back to the writer start
    B = build_stream_writer(cfg);
    if (B.code.size() <= nB) break;
    nB = B.code.size() + 16;
  }
  while (B.code.size() < nB) B.code.push_back({MOp::Halt, 0, 0});

  // With a driver the entry jumps into it; without one, straight to the
  // loader so the seed is the plain self-printer.
  MachineProgram head;
  head.code.push_back({MOp::DecJz, 3, nD ? 1 : nB + 1});
  for (const Instr& in : driver)
    head.code.push_back(
        {in.op, in.reg, in.op == MOp::DecJz ? in.target + 1 : size_t{0}});
  head = concat(head, B);

  SeedLayout out;
  out.loader_start = head.code.size();
  out.driver_start = nD ? 1 : out.loader_start;
  const MachineProgram L = loader_program(
      tokens_to_stream(instruction_tokens(head)), out.loader_start, nD + 1);
  if (out.loader_start + L.code.size() + 2 >= (size_t{1} << kMaxTokenLen))
    throw SemanticError("seed: layout exceeds the position token range");
  out.program = head;
  for (const Instr& in : L.code) out.program.code.push_back(in);
  validate_program(out.program);
  return out;
}

}  // namespace seed_detail

const MachineProgram& quine_program() {
  static const MachineProgram p = seed_detail::recursion_seed({}).program;
  return p;
}

MachineProgram emitter_for(const Nat& code) {
  if (code < 1) throw SemanticError("emitter: code must be positive");
  MachineProgram p;
  p.code.push_back({MOp::Inc, 1, 0});
  const size_t m = mpz_sizeinbase(code.get_mpz_t(), 2);
  for (size_t i = m - 1; i-- > 0;) {
    const size_t at = p.code.size();
    for (const ShapeInstr& si : dbl_shape())
      p.code.push_back({si.op, si.reg, si.rel ? at + si.tv : si.tv});
    if (mpz_tstbit(code.get_mpz_t(), i)) p.code.push_back({MOp::Inc, 1, 0});
  }
  const size_t q = p.code.size();
  for (const ShapeInstr& si : emit_tail_shape())
    p.code.push_back({si.op, si.reg, si.rel ? q + si.tv : si.tv});
  validate_program(p);
  return p;
}

const MachineProgram& code_emitter_transform() {
  static const MachineProgram p = [] {
    WriterCfg cfg;
    cfg.input_in_r0 = true;
    cfg.pos_base = 1;
    cfg.count_base = 4;
    cfg.tail = emit_tail_shape();
    return build_stream_writer(cfg);
  }();
  return p;
}

MachineProgram kleene_fixed_point(const MachineProgram& transform) {
  validate_program(transform);
  const Nat probe_budget = Nat(1) << 20000;
  const std::vector<MachineProgram> probes = {
      prog({{MOp::Halt, 0, 0}}),
      prog({{MOp::Inc, 0, 0}}),
      prog({{MOp::Inc, 0, 0}, {MOp::Inc, 0, 0}, {MOp::Halt, 0, 0}}),
  };
  std::vector<Nat> codes, outs;
  for (const MachineProgram& q : probes) {
    const Nat c = godel_encode(q).value;
    const RunResult r = run(transform, {c}, nullptr, probe_budget);
    if (!r.halted)
      throw SemanticError("kleene: transform not total on tested code " +
                          c.get_str());
    codes.push_back(c);
    outs.push_back(r.output);
  }

  if (outs == codes) return probes[0];  // identity on codes: any code is fixed

  if (outs[0] == outs[1] && outs[1] == outs[2]) {
    // constant transform: the named program is its own image
    MachineProgram e;
    try {
      e = godel_decode_program(outs[0]);
    } catch (const CodingError&) {
      throw SemanticError(
          "kleene: constant transform output is not a program code");
    }
    const RunResult r = run(transform, {godel_encode(e).value}, nullptr,
                            probe_budget);
    if (r.halted && r.output == outs[0]) return e;
    throw SemanticError(
        "kleene: transform outside the supported construction families");
  }

  // emit-the-input: each image prints the probed code back when started fresh
  bool emits_input = true;
  for (size_t i = 0; i < probes.size() && emits_input; ++i) {
    MachineProgram q;
    try {
      q = godel_decode_program(outs[i]);
    } catch (const CodingError&) {
      emits_input = false;
      break;
    }
    const RunResult r0 = run(q, {}, nullptr, probe_budget);
    emits_input = r0.halted && r0.output == codes[i];
  }
  if (emits_input) return quine_checked();

  throw SemanticError(
      "kleene: transform outside the supported construction families");
}

// ---------------------------------------------------------------------------
// Diagonal sentences with checkable biconditional proofs.

namespace {

FormulaPtr lift(const SigPtr& sig, const FormulaPtr& f) {
  return parse_formula(sig, render(f));
}

}  // namespace

FixedPointCertificate godel_carnap_fixed_point(const FormulaPtr& phi,
                                               const Theory& base) {
  if (!phi) throw SemanticError("fixed point: empty template");
  if (has_modal(phi))
    throw SemanticError("fixed point: template must be modality-free");
  const auto fv = free_vars(phi);
  if (fv.size() != 1)
    throw SemanticError(
        "fixed point: template needs exactly one free variable, found " +
        std::to_string(fv.size()));
  const std::string v = *fv.begin();
  const SigPtr bs = base.sig();
  for (const char* nm : {"diag", "k", "c"})
    if (bs->func_index(nm) >= 0)
      throw SemanticError(std::string("fixed point: base signature already uses ") + nm);

  const SigPtr sig = bs->extend(bs->name() + "+diag",
                                {{"diag", 1}, {"k", 0}, {"c", 0}}, {});
  const FormulaPtr phi_x = lift(sig, phi);
  const TermPtr kterm = mk_func(sig, "k", {});
  const TermPtr cterm = mk_func(sig, "c", {});
  const TermPtr diag_k = mk_func(sig, "diag", {kterm});

  const FormulaPtr theta =
      subst_fvar(phi_x, v, mk_func(sig, "diag", {mk_fvar(sig, v)}));
  const FormulaPtr psi = subst_fvar(phi_x, v, diag_k);
  const FormulaPtr phi_c = subst_fvar(phi_x, v, cterm);

  const Nat theta_code = godel_encode(theta).value;
  const Nat psi_code = godel_encode(psi).value;
  // The defining equation's content, recomputed through the codec: decoding
  // the template's code and substituting the code constant must land exactly
  // on the sentence the equation names.
  const FormulaPtr theta_back = godel_decode_formula(sig, theta_code);
  if (godel_encode(subst_fvar(theta_back, v, kterm)).value != psi_code)
    throw SemanticError("fixed point: substitution check failed");

  const FormulaPtr a1 = mk_atom(sig, "=", {diag_k, cterm});
  const Theory base_copy = base;
  auto theory = std::make_shared<Theory>(
      base.name() + "+diag", sig, [base_copy, sig, a1](size_t i) -> FormulaPtr {
        if (i == 0) return a1;
        return lift(sig, base_copy.axiom(i - 1));
      });

  Proof pr;
  pr.steps.push_back(mk_axiom_step(*theory, 0));
  pr.steps.push_back(mk_step(Rule::Assume, {}, psi));
  pr.steps.push_back(mk_step(Rule::EqSubst, {0, 1}, phi_c));
  pr.steps.push_back(mk_step(Rule::ImplIntro, {2}, mk_implies(psi, phi_c)));
  pr.steps.push_back(
      mk_step(Rule::EqSym, {0}, mk_atom(sig, "=", {cterm, diag_k})));
  pr.steps.push_back(mk_step(Rule::Assume, {}, phi_c));
  pr.steps.push_back(mk_step(Rule::EqSubst, {4, 5}, psi));
  pr.steps.push_back(mk_step(Rule::ImplIntro, {6}, mk_implies(phi_c, psi)));
  const FormulaPtr bicond = mk_iff(psi, phi_c);
  pr.steps.push_back(mk_step(Rule::AndIntro, {3, 7}, bicond));
  pr.conclusion = bicond;
  pr.premises_used = {0};

  const CheckResult chk = check_proof(pr, *theory, 1);
  if (!chk.ok)
    throw SemanticError("fixed point: certificate rejected: " + chk.detail);
  return {psi, phi_x, bicond, std::move(pr), std::move(theory), psi_code,
          theta_code};
}

nlohmann::json FixedPointCertificate::to_json() const {
  return nlohmann::json{
      {"psi", render(psi)},
      {"phi", render(phi)},
      {"biconditional", render(biconditional)},
      {"proof", proof_to_json(proof)},
      {"theory", theory->name()},
      {"psi_code", psi_code.get_str()},
      {"theta_code", theta_code.get_str()},
  };
}

TarskiReport tarski_obstruction_demo(const FormulaPtr& candidate,
                                     const Theory& base) {
  if (!candidate) throw SemanticError("truth demo: empty candidate");
  const auto fv = free_vars(candidate);
  if (fv.size() != 1)
    throw SemanticError(
        "truth demo: candidate needs exactly one free variable, found " +
        std::to_string(fv.size()));
  const std::string v = *fv.begin();

  FixedPointCertificate cert = godel_carnap_fixed_point(mk_neg(candidate), base);
  const SigPtr sig = cert.theory->sig();
  const TermPtr cterm = mk_func(sig, "c", {});
  const FormulaPtr tau_c = subst_fvar(lift(sig, candidate), v, cterm);
  const FormulaPtr ntau_c = mk_neg(tau_c);
  const FormulaPtr psi = cert.psi;
  const FormulaPtr b1 = mk_iff(tau_c, psi);

  auto base_theory = cert.theory;
  auto schema = std::make_shared<Theory>(
      base_theory->name() + "+schema", sig,
      [base_theory, b1](size_t i) -> FormulaPtr {
        if (i == 0) return base_theory->axiom(0);
        if (i == 1) return b1;
        return base_theory->axiom(i - 1);
      });

  // The disquotation instance for the liar collides with the certificate.
  Proof pr = cert.proof;
  pr.steps.push_back(mk_axiom_step(*schema, 1));                       // 9
  pr.steps.push_back(mk_step(Rule::AndElim1, {9}, mk_implies(tau_c, psi)));
  pr.steps.push_back(mk_step(Rule::AndElim2, {9}, mk_implies(psi, tau_c)));
  pr.steps.push_back(mk_step(Rule::AndElim1, {8}, mk_implies(psi, ntau_c)));
  pr.steps.push_back(mk_step(Rule::AndElim2, {8}, mk_implies(ntau_c, psi)));
  pr.steps.push_back(mk_step(Rule::Assume, {}, tau_c));                // 14
  pr.steps.push_back(mk_step(Rule::ImplElim, {10, 14}, psi));          // 15
  pr.steps.push_back(mk_step(Rule::ImplElim, {12, 15}, ntau_c));       // 16
  pr.steps.push_back(mk_step(Rule::NegIntro, {14, 16}, ntau_c));       // 17
  pr.steps.push_back(mk_step(Rule::ImplElim, {13, 17}, psi));          // 18
  pr.steps.push_back(mk_step(Rule::ImplElim, {11, 18}, tau_c));        // 19
  const FormulaPtr marker = mk_and(tau_c, ntau_c);
  pr.steps.push_back(mk_step(Rule::NegElim, {19, 17}, marker));        // 20
  pr.conclusion = marker;
  pr.premises_used = {0, 1};

  const CheckResult chk = check_proof(pr, *schema, 2);
  if (!chk.ok)
    throw SemanticError("truth demo: refutation rejected: " + chk.detail);

  TarskiReport rep;
  rep.candidate = lift(sig, candidate);
  rep.liar = std::move(cert);
  rep.failing_biconditional = b1;
  rep.refuted = true;
  rep.inconsistency = std::move(pr);
  rep.schema_theory = std::move(schema);
  return rep;
}

nlohmann::json TarskiReport::to_json() const {
  nlohmann::json j{
      {"candidate", render(candidate)},
      {"liar", liar.to_json()},
      {"failing_biconditional", render(failing_biconditional)},
      {"refuted", refuted},
      {"schema_theory", schema_theory->name()},
  };
  if (inconsistency) j["inconsistency"] = proof_to_json(*inconsistency);

  // Truth reduced to set definability: a sentence holds exactly when
  // conjoining it to the emptyset property still defines the empty set.
  const SigPtr s = Signature::set();
  const FormulaPtr empty_prop = parse_formula(s, "forall y. ~(y in x)");
  const FormulaPtr sample = parse_formula(s, "exists u. forall y. ~(y in u)");
  j["empty_set_truth_encoding"] = {
      {"free_variable", "x"},
      {"defining_property_template", "(sigma & " + render(empty_prop) + ")"},
      {"sample_sentence", render(sample)},
      {"reading",
       "the sentence holds exactly when the conjoined property still pins "
       "down the empty set"},
  };
  return j;
}

}  // namespace logiclab
