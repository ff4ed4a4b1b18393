#include "logiclab/useq.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "logiclab/godel.hpp"
#include "logiclab/logic.hpp"
#include "selfref_seed.hpp"

namespace logiclab {

namespace {

// Engineering bound on script fields; keeps hand-off loops and rendered
// numerals within sane budgets.
constexpr uint64_t kMaxScriptField = 100000;

// Driver registers. The dormant writer block never runs in the same pass, so
// low indices are free; they also keep the embedded driver tokens short.
constexpr size_t D_N = 0;       // completed stages, the run's output register
constexpr size_t D_Q = 1;       // query/answer register of the proof channel
constexpr size_t D_S = 2;       // claimed stage
constexpr size_t D_K = 3;       // claimed fragment index
constexpr size_t D_V = 4;       // claimed value
constexpr size_t D_KPREV = 5;   // fragment floor from the last success
constexpr size_t D_HAVE = 6;    // 1 once any stage has succeeded
constexpr size_t D_T1 = 7;
constexpr size_t D_T2 = 8;
constexpr size_t D_T3 = 9;
constexpr size_t D_TAG = 10;    // channel designation
constexpr size_t D_ACC = 11;    // pairing accumulator
constexpr size_t D_Z = 12;      // pinned zero
constexpr size_t D_LASTV = 13;  // value of the last success
// Shadow stage count. The poll loop drains and restores D_N while pairing,
// so a budget can die with D_N mid-copy; the shadow is written only during
// commits and is what the host checks against.
constexpr size_t D_NS = 14;

// The run-time stage loop. Polls the channel with the pairing of the
// designation and the current stage; a positive answer hands over a claimed
// stage, fragment index and value, which the machine itself judges: the
// fragment must be nonempty, the stage the one the sequence waits on, and the
// fragment index strictly below the floor. Commits happen before the verdict
// query, so a run cut off between hand-offs always shows fully committed
// registers.
std::vector<Instr> stage_driver(uint64_t tag) {
  Asm a(D_Z);
  const Asm::Label poll = a.label();
  const Asm::Label accept = a.label();
  const Asm::Label reject = a.label();
  if (tag) a.load_const(D_TAG, Nat(tag), D_T1);
  a.bind(poll);
  a.copy(D_N, D_T1, D_T3);
  a.copy(D_TAG, D_T2, D_T3);
  a.move(D_T2, {D_T1});
  a.copy(D_T1, D_T2, D_T3);
  a.inc(D_T2);
  a.mul_acc(D_ACC, D_T2, D_T1, D_T3);
  a.clear(D_T2);
  {
    const Asm::Label ev = a.label(), od = a.label();
    a.div2(D_ACC, D_Q, ev, od);  // exact: a product of neighbors is even
    a.bind(ev);
    a.bind(od);
  }
  a.copy(D_N, D_T1, D_T3);
  a.move(D_T1, {D_Q});
  a.oracle(D_Q);
  a.decjz(D_Q, poll);  // zero: nothing proved this poll
  // a claimed proof: pull its stage, fragment index and value
  a.oracle(D_Q);
  a.move(D_Q, {D_S});
  a.oracle(D_Q);
  a.move(D_Q, {D_K});
  a.oracle(D_Q);
  a.move(D_Q, {D_V});
  // the empty fragment proves nothing worth a stage
  a.decjz(D_K, reject);
  a.inc(D_K);
  // the claimed stage must be the one the sequence is waiting on
  {
    const Asm::Label cmp = a.label(), s_done = a.label(), fits = a.label();
    a.copy(D_N, D_T1, D_T3);
    a.bind(cmp);
    a.decjz(D_S, s_done);
    a.decjz(D_T1, reject);  // claim runs ahead of the sequence
    a.jmp(cmp);
    a.bind(s_done);
    a.decjz(D_T1, fits);
    a.clear(D_T1);
    a.jmp(reject);  // claim lags behind
    a.bind(fits);
  }
  // fragment indices must drop strictly across successes
  a.decjz(D_HAVE, accept);  // nothing succeeded yet: no floor to beat
  a.inc(D_HAVE);
  {
    const Asm::Label cmp = a.label(), below = a.label();
    a.copy(D_K, D_T1, D_T3);
    a.copy(D_KPREV, D_T2, D_T3);
    a.bind(cmp);
    a.decjz(D_T2, reject);  // floor ran out first: not strictly below
    a.decjz(D_T1, below);
    a.jmp(cmp);
    a.bind(below);
    a.clear(D_T2);
  }
  a.bind(accept);
  a.clear(D_KPREV);
  a.move(D_K, {D_KPREV});
  a.clear(D_HAVE);
  a.inc(D_HAVE);
  a.clear(D_LASTV);
  a.move(D_V, {D_LASTV});
  a.inc(D_N);
  a.inc(D_NS);
  a.clear(D_S);
  a.clear(D_T1);
  a.inc(D_Q);
  a.oracle(D_Q);  // verdict: accepted
  a.jmp(poll);
  a.bind(reject);
  a.oracle(D_Q);  // verdict: ignored
  a.clear(D_S);
  a.clear(D_K);
  a.clear(D_V);
  a.clear(D_T1);
  a.clear(D_T2);
  a.jmp(poll);
  return a.finish().code;
}

std::map<uint64_t, seed_detail::SeedLayout>& seed_cache() {
  static std::map<uint64_t, seed_detail::SeedLayout> cache;
  return cache;
}

const seed_detail::SeedLayout& seed_for_tag(uint64_t tag) {
  auto& cache = seed_cache();
  auto it = cache.find(tag);
  if (it == cache.end())
    it = cache.emplace(tag, seed_detail::recursion_seed(stage_driver(tag))).first;
  return it->second;
}

// Parsed template plus the signature its instances render against.
struct StatementRenderer {
  SigPtr sig;
  FormulaPtr open_template;

  TermPtr numeral(uint64_t v) const {
    TermPtr t = mk_func(sig, "0", {});
    for (uint64_t i = 0; i < v; ++i) t = mk_func(sig, "S", {t});
    return t;
  }
  std::string materialize(uint64_t stage, uint64_t value) const {
    return render(subst_fvar(subst_fvar(open_template, "n", numeral(stage)), "x",
                             numeral(value)));
  }
};

StatementRenderer make_renderer(const Theory& T, const StageTemplate& tmpl) {
  const SigPtr base = T.sig();
  if (base->func_index("0") < 0 || base->func_index("S") < 0)
    throw SemanticError("universal: theory signature lacks zero and successor");
  SigPtr sig;
  try {
    sig = base->extend(base->name() + "+" + tmpl.relation, {},
                       {{tmpl.relation, 2}});
  } catch (const SemanticError&) {
    throw SemanticError(
        "universal: template relation clashes with the signature");
  }
  FormulaPtr f;
  try {
    f = parse_formula(sig, tmpl.text);
  } catch (const ParseError&) {
    throw SemanticError("universal: template does not parse");
  }
  if (has_modal(f))
    throw SemanticError("universal: template must be modality-free");
  if (free_vars(f) != std::set<std::string>{"n", "x"})
    throw SemanticError(
        "universal: template needs exactly the free variables n and x");
  return {sig, f};
}

void validate_script(const ProofOracleScript& s) {
  bool first = true;
  uint64_t prev = 0;
  for (const OracleInjection& inj : s.injections) {
    if (!first && inj.at_step <= prev)
      throw SemanticError("universal: script poll indices must increase strictly");
    first = false;
    prev = inj.at_step;
    for (uint64_t v : {inj.at_step, inj.stage, inj.fragment_k, inj.value})
      if (v > kMaxScriptField)
        throw SemanticError("universal: script field exceeds the supported range");
  }
}

// Host-side counters mirroring the machine's judgment registers.
struct HostState {
  uint64_t n = 0;
  uint64_t kprev = 0;
  uint64_t lastv = 0;
  bool have = false;
};

std::string admissibility_reason(const HostState& st, const OracleInjection& inj) {
  if (inj.fragment_k == 0) return "fragment index 0 names the empty fragment";
  if (inj.stage != st.n)
    return "stage " + std::to_string(inj.stage) + " claimed while stage " +
           std::to_string(st.n) + " is next";
  if (st.have && inj.fragment_k >= st.kprev)
    return "fragment index " + std::to_string(inj.fragment_k) +
           " is not below the floor " + std::to_string(st.kprev);
  return "";
}

enum class Phase { Poll, SendStage, SendK, SendV, Verdict };

UARunState run_core(const MachineProgram& p, const ProofOracleScript& script,
                    const Nat& budget, const Theory& T, const StageTemplate& tmpl,
                    const std::vector<std::pair<Nat, Nat>>* expected) {
  validate_script(script);
  const StatementRenderer renderer = make_renderer(T, tmpl);

  UARunState out;
  HostState st;
  Phase phase = Phase::Poll;
  uint64_t poll_index = 0;
  size_t cursor = 0;
  std::optional<Nat> tag;
  std::optional<OracleInjection> pending;

  MachineOracle oracle = [&](const Nat& q) -> Nat {
    Nat answer;
    switch (phase) {
      case Phase::Poll: {
        const auto [t, n] = unpair(q);
        if (!tag) tag = t;
        if (t != *tag || n != Nat(st.n))
          throw SemanticError("universal: poll query out of protocol");
        if (cursor < script.injections.size() &&
            script.injections[cursor].at_step == poll_index) {
          pending = script.injections[cursor++];
          phase = Phase::SendStage;
          answer = 1;
        } else {
          answer = 0;
        }
        ++poll_index;
        break;
      }
      case Phase::SendStage:
        if (q != 0)
          throw SemanticError("universal: hand-off query out of protocol");
        answer = Nat(pending->stage);
        phase = Phase::SendK;
        break;
      case Phase::SendK:
        if (q != 0)
          throw SemanticError("universal: hand-off query out of protocol");
        answer = Nat(pending->fragment_k);
        phase = Phase::SendV;
        break;
      case Phase::SendV:
        if (q != 0)
          throw SemanticError("universal: hand-off query out of protocol");
        answer = Nat(pending->value);
        phase = Phase::Verdict;
        break;
      case Phase::Verdict: {
        if (q != 0 && q != 1)
          throw SemanticError("universal: verdict out of protocol");
        const bool machine_accepts = q == 1;
        const std::string reason = admissibility_reason(st, *pending);
        if (machine_accepts != reason.empty())
          throw SemanticError(
              "universal: machine verdict disagrees with the host rule");
        StageEvent ev;
        ev.at_step = pending->at_step;
        ev.stage = pending->stage;
        ev.fragment_k = pending->fragment_k;
        ev.value = pending->value;
        ev.accepted = machine_accepts;
        ev.reason = reason;
        ev.statement = renderer.materialize(pending->stage, pending->value);
        out.stage_log.push_back(std::move(ev));
        if (machine_accepts) {
          out.sequence.push_back(pending->value);
          out.fragment_indices.push_back(pending->fragment_k);
          st.n += 1;
          st.kprev = pending->fragment_k;
          st.lastv = pending->value;
          st.have = true;
        }
        pending.reset();
        phase = Phase::Poll;
        answer = 0;
        break;
      }
    }
    if (expected) {
      if (out.oracle_log.size() >= expected->size())
        throw SemanticError("universal: replay log exhausted");
      const auto& exp = (*expected)[out.oracle_log.size()];
      if (exp.first != q || exp.second != answer)
        throw SemanticError("universal: replay diverged from the log");
    }
    out.oracle_log.emplace_back(q, answer);
    return answer;
  };

  const RunResult r = run(p, {}, oracle, budget);
  out.steps_consumed = r.steps;
  out.stage = out.sequence.size();

  // Outside a hand-off the machine has committed exactly the history the
  // host assembled; compare the judgment registers against it.
  if (phase == Phase::Poll && !pending) {
    auto reg = [&](size_t i) -> Nat {
      return i < r.regs.size() ? r.regs[i] : Nat(0);
    };
    if (reg(D_NS) != Nat(st.n) || reg(D_KPREV) != Nat(st.kprev) ||
        reg(D_LASTV) != Nat(st.lastv))
      throw SemanticError(
          "universal: final registers disagree with the assembled state");
  }

  for (size_t i = 1; i < out.fragment_indices.size(); ++i)
    if (out.fragment_indices[i] >= out.fragment_indices[i - 1])
      throw SemanticError("universal: fragment indices failed to decrease");

  // every success is a counterexample to the statement its proof asserted
  for (StageEvent& ev : out.stage_log)
    if (ev.accepted)
      ev.statement_falsified_by_trace = ev.stage < out.sequence.size() &&
                                        out.sequence[ev.stage] == ev.value;
  return out;
}

// Rebuilds the injections a recorded log witnessed: a positive poll answer
// starts a stage/fragment/value hand-off, then a verdict call. A log cut off
// inside a hand-off yields zeros for the answers it never recorded; a replay
// of the same budget never asks for them.
std::vector<OracleInjection> injections_of_log(
    const std::vector<std::pair<Nat, Nat>>& log) {
  auto field = [](const Nat& v) -> uint64_t {
    if (v > Nat(kMaxScriptField))
      throw SemanticError("universal: replay log value out of range");
    return v.get_ui();
  };
  std::vector<OracleInjection> inj;
  uint64_t poll = 0;
  size_t i = 0;
  while (i < log.size()) {
    if (log[i].second == 0) {
      ++poll;
      ++i;
      continue;
    }
    OracleInjection x;
    x.at_step = poll;
    ++poll;
    if (i + 1 < log.size()) x.stage = field(log[i + 1].second);
    if (i + 2 < log.size()) x.fragment_k = field(log[i + 2].second);
    if (i + 3 < log.size()) x.value = field(log[i + 3].second);
    inj.push_back(x);
    i += 5;  // poll, stage, fragment, value, verdict
  }
  return inj;
}

}  // namespace

nlohmann::json ProofOracleScript::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const OracleInjection& x : injections)
    arr.push_back({{"at_step", x.at_step},
                   {"stage", x.stage},
                   {"fragment_k", x.fragment_k},
                   {"value", x.value}});
  return nlohmann::json{{"injections", arr}};
}

ProofOracleScript ProofOracleScript::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("injections") ||
      !j.at("injections").is_array())
    throw SemanticError("universal: script must hold an injections array");
  ProofOracleScript s;
  for (const auto& e : j.at("injections")) {
    OracleInjection x;
    try {
      x.at_step = e.at("at_step").get<uint64_t>();
      x.stage = e.at("stage").get<uint64_t>();
      x.fragment_k = e.at("fragment_k").get<uint64_t>();
      x.value = e.at("value").get<uint64_t>();
    } catch (const nlohmann::json::exception&) {
      throw SemanticError("universal: script entry malformed");
    }
    s.injections.push_back(x);
  }
  validate_script(s);
  return s;
}

nlohmann::json UARunState::to_json() const {
  nlohmann::json events = nlohmann::json::array();
  for (const StageEvent& ev : stage_log)
    events.push_back(
        {{"at_step", ev.at_step},
         {"stage", ev.stage},
         {"fragment_k", ev.fragment_k},
         {"value", ev.value},
         {"accepted", ev.accepted},
         {"reason", ev.reason},
         {"statement", ev.statement},
         {"statement_falsified_by_trace", ev.statement_falsified_by_trace}});
  return nlohmann::json{{"sequence", sequence},
                        {"k_list", fragment_indices},
                        {"stage_log", events},
                        {"steps", steps_consumed.get_str()}};
}

MachineProgram build_universal_program(const Theory& T,
                                       const StageTemplate& tmpl) {
  make_renderer(T, tmpl);  // validates the theory signature and the template
  return seed_for_tag(0).program;
}

MachineProgram build_oracle_universal_program(const Theory& T, uint64_t m,
                                              const StageTemplate& tmpl) {
  make_renderer(T, tmpl);
  if (m > 1000)
    throw SemanticError("universal: jump designation out of range");
  return seed_for_tag(m + 1).program;
}

UARunState run_universal(const MachineProgram& p, const ProofOracleScript& script,
                         const Nat& budget, const Theory& T,
                         const StageTemplate& tmpl) {
  return run_core(p, script, budget, T, tmpl, nullptr);
}

UARunState run_universal(const MachineProgram& p, const Nat& budget,
                         const Theory& T, const StageTemplate& tmpl) {
  return run_core(p, {}, budget, T, tmpl, nullptr);
}

UARunState replay_universal(const MachineProgram& p,
                            const std::vector<std::pair<Nat, Nat>>& log,
                            const Nat& budget, const Theory& T,
                            const StageTemplate& tmpl) {
  ProofOracleScript script;
  script.injections = injections_of_log(log);
  return run_core(p, script, budget, T, tmpl, &log);
}

std::vector<StageEvent> replay_script(const ProofOracleScript& script,
                                      const Theory& T,
                                      const StageTemplate& tmpl) {
  validate_script(script);
  const StatementRenderer renderer = make_renderer(T, tmpl);
  std::vector<StageEvent> events;
  std::vector<uint64_t> seq;
  HostState st;
  for (const OracleInjection& inj : script.injections) {
    StageEvent ev;
    ev.at_step = inj.at_step;
    ev.stage = inj.stage;
    ev.fragment_k = inj.fragment_k;
    ev.value = inj.value;
    ev.reason = admissibility_reason(st, inj);
    ev.accepted = ev.reason.empty();
    ev.statement = renderer.materialize(inj.stage, inj.value);
    if (ev.accepted) {
      seq.push_back(inj.value);
      st.n += 1;
      st.kprev = inj.fragment_k;
      st.lastv = inj.value;
      st.have = true;
    }
    events.push_back(std::move(ev));
  }
  for (StageEvent& ev : events)
    if (ev.accepted)
      ev.statement_falsified_by_trace =
          ev.stage < seq.size() && seq[ev.stage] == ev.value;
  return events;
}

bool self_description_check(const MachineProgram& p) {
  static std::map<uint64_t, bool> verdicts;
  for (const auto& [tag, lay] : seed_cache()) {
    if (!(lay.program == p)) continue;
    auto it = verdicts.find(tag);
    if (it != verdicts.end()) return it->second;
    MachineProgram redirected = lay.program;
    redirected.code[0].target = lay.loader_start;
    const Nat own = godel_encode(p).value;
    const size_t bits = mpz_sizeinbase(own.get_mpz_t(), 2);
    const RunResult r = run(redirected, {}, nullptr, Nat(1) << (bits + 4096));
    const bool ok = r.halted && r.output == own;
    verdicts.emplace(tag, ok);
    return ok;
  }
  throw SemanticError("universal: not a program this builder produced");
}

}  // namespace logiclab
