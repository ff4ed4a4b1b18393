#include <doctest.h>

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "logiclab/classify.hpp"
#include "logiclab/godel.hpp"
#include "logiclab/logic.hpp"
#include "logiclab/selfref.hpp"
#include "logiclab/structure.hpp"

using namespace logiclab;

namespace {

MachineProgram instrs(std::vector<Instr> v) { return MachineProgram{std::move(v)}; }

const Nat& small_budget() {
  static const Nat b = Nat(1) << 20000;
  return b;
}

const Nat& quine_budget() {
  static const Nat b = Nat(1) << 12000000;
  return b;
}

double run_seconds(const std::function<void()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

TEST_CASE("emitter programs print their argument") {
  for (unsigned long c : {1UL, 2UL, 5UL, 17UL, 1195UL, 2387UL, 999983UL}) {
    const Nat code = c;
    const MachineProgram p = emitter_for(code);
    const RunResult r = run(p, {}, nullptr, small_budget());
    REQUIRE(r.halted);
    CHECK(r.output == code);
  }
  CHECK_THROWS_AS(emitter_for(0), SemanticError);
}

TEST_CASE("emitter transform agrees with the host coder") {
  const MachineProgram& tf = code_emitter_transform();
  const MachineProgram adder = instrs({{MOp::DecJz, 1, 3}, {MOp::Inc, 0, 0}, {MOp::DecJz, 2, 0}});
  std::vector<Nat> codes = {1, 2, 5, 774, 1195, 2387, godel_encode(adder).value};
  for (const Nat& c : codes) {
    const Nat host = godel_encode(emitter_for(c)).value;
    const RunResult r = run(tf, {c}, nullptr, small_budget());
    REQUIRE(r.halted);
    CHECK(r.output == host);
  }
}

TEST_CASE("emitter transform is deterministic") {
  const MachineProgram& tf = code_emitter_transform();
  const RunResult a = run(tf, {Nat(2387)}, nullptr, small_budget());
  const RunResult b = run(tf, {Nat(2387)}, nullptr, small_budget());
  REQUIRE(a.halted);
  REQUIRE(b.halted);
  CHECK(a.output == b.output);
  CHECK(a.steps == b.steps);
  CHECK(a.regs == b.regs);
}

TEST_CASE("quine reproduces its own code") {
  const MachineProgram& q = quine_program();
  CHECK(q.code.size() > 1000);
  const Nat own = godel_encode(q).value;
  const RunResult r = run(q, {}, nullptr, quine_budget());
  REQUIRE(r.halted);
  CHECK(r.output == own);
  CHECK(godel_decode_program(r.output) == q);
}

TEST_CASE("kleene fixed point: identity on codes") {
  const MachineProgram ident = instrs({{MOp::Halt, 0, 0}});
  const MachineProgram e = kleene_fixed_point(ident);
  const Nat ec = godel_encode(e).value;
  const RunResult r = run(ident, {ec}, nullptr, small_budget());
  REQUIRE(r.halted);
  CHECK(r.output == ec);
}

TEST_CASE("kleene fixed point: constant transform") {
  const MachineProgram target =
      instrs({{MOp::Inc, 0, 0}, {MOp::Inc, 0, 0}, {MOp::Halt, 0, 0}});
  const Nat tc = godel_encode(target).value;
  Asm a(3);
  a.clear(0);
  a.load_const(0, tc, 2);
  a.halt();
  const MachineProgram constant = a.finish();
  const MachineProgram e = kleene_fixed_point(constant);
  CHECK(e == target);
  for (unsigned long x = 0; x <= 20; ++x) {
    const RunResult re = run(e, {Nat(x)}, nullptr, small_budget());
    const RunResult rt = run(target, {Nat(x)}, nullptr, small_budget());
    REQUIRE(re.halted);
    REQUIRE(rt.halted);
    CHECK(re.output == rt.output);
  }
}

TEST_CASE("kleene fixed point: self-emitting transform yields the quine") {
  const MachineProgram e = kleene_fixed_point(code_emitter_transform());
  CHECK(e == quine_program());
}

TEST_CASE("kleene fixed point: rejections") {
  // adds one to the code: no supported family fits
  CHECK_THROWS_AS(kleene_fixed_point(instrs({{MOp::Inc, 0, 0}})), SemanticError);
  // drains register 0, then spins on register 1
  try {
    kleene_fixed_point(instrs({{MOp::DecJz, 0, 0}, {MOp::DecJz, 1, 1}}));
    FAIL("expected a rejection");
  } catch (const SemanticError& e) {
    CHECK(std::string(e.what()).find("not total") != std::string::npos);
  }
}

TEST_CASE("diagonal certificate: degenerate template") {
  const Theory pa = pa_theory();
  const auto cert = godel_carnap_fixed_point(parse_formula(pa.sig(), "x = x"), pa);
  CHECK(render(cert.psi) == "diag(k) = diag(k)");
  CHECK(cert.proof.premises_used == std::vector<size_t>{0});
  CHECK(cert.psi_code == godel_encode(cert.psi).value);
  const CheckResult chk = check_proof(cert.proof, *cert.theory, 1);
  CHECK(chk.ok);
  // the added equation sits in front; the base enumeration is carried over
  CHECK(render(cert.theory->axiom(0)) == "diag(k) = c");
  CHECK(render(cert.theory->axiom(1)) == render(pa.axiom(0)));
}

TEST_CASE("diagonal certificate: liar sentence") {
  const SigPtr sig_tr = Signature::arith()->extend("arith+tr", {}, {{"Tr", 1}});
  const Theory base = finite_theory("tr_base", sig_tr, {});
  const auto cert = godel_carnap_fixed_point(parse_formula(sig_tr, "~Tr(x)"), base);
  CHECK(render(cert.psi) == "~(Tr(diag(k)))");
  CHECK(render(cert.biconditional) ==
        "((~(Tr(diag(k))) -> ~(Tr(c))) & (~(Tr(c)) -> ~(Tr(diag(k)))))");
  const CheckResult chk = check_proof(cert.proof, *cert.theory, 1);
  CHECK(chk.ok);
}

TEST_CASE("diagonal certificate: proof survives serialization") {
  const SigPtr sig_tr = Signature::arith()->extend("arith+tr", {}, {{"Tr", 1}});
  const Theory base = finite_theory("tr_base", sig_tr, {});
  const auto cert = godel_carnap_fixed_point(parse_formula(sig_tr, "~Tr(x)"), base);
  const nlohmann::json j = cert.to_json();
  REQUIRE(j.contains("proof"));
  const Proof back = proof_from_json(cert.theory->sig(), j["proof"]);
  const CheckResult chk = check_proof(back, *cert.theory, 1);
  CHECK(chk.ok);
  CHECK(j.at("psi").get<std::string>() == render(cert.psi));
  CHECK(j.at("psi_code").get<std::string>() == cert.psi_code.get_str());
}

TEST_CASE("diagonal certificate: input validation") {
  const Theory pa = pa_theory();
  const SigPtr arith = pa.sig();
  CHECK_THROWS_AS(godel_carnap_fixed_point(parse_formula(arith, "x = y"), pa),
                  SemanticError);
  CHECK_THROWS_AS(godel_carnap_fixed_point(parse_formula(arith, "0 = 0"), pa),
                  SemanticError);
  CHECK_THROWS_AS(
      godel_carnap_fixed_point(parse_formula(arith, "box (x = x)"), pa),
      SemanticError);
  const SigPtr clash = arith->extend("arith+diagclash", {{"diag", 1}}, {});
  const Theory clash_base = finite_theory("clash", clash, {});
  CHECK_THROWS_AS(
      godel_carnap_fixed_point(parse_formula(clash, "x = x"), clash_base),
      SemanticError);
}

TEST_CASE("diagonal certificates: ten templates, bounded overhead") {
  const Theory pa = pa_theory();
  const SigPtr arith = pa.sig();
  const SigPtr sig_tr = arith->extend("arith+tr", {}, {{"Tr", 1}});
  const SigPtr sig_pr = arith->extend("arith+prf", {}, {{"Prf", 2}});
  const Theory tr_base = finite_theory("tr_base", sig_tr, {});
  const Theory pr_base = finite_theory("prf_base", sig_pr, {});

  struct Case {
    const Theory* base;
    const SigPtr* sig;
    const char* text;
  };
  const std::vector<Case> cases = {
      {&pa, &arith, "x = x"},
      {&pa, &arith, "exists y. x = (y + y)"},
      {&pa, &arith, "forall y < x. y = y"},
      {&pa, &arith, "(x = 0 | exists y. x = S(y))"},
      {&pa, &arith, "forall z. exists y. (x + z) = y"},
      {&tr_base, &sig_tr, "~Tr(x)"},
      {&tr_base, &sig_tr, "(Tr(x) & ~(x = 0))"},
      {&pr_base, &sig_pr, "~(exists p. Prf(p, x))"},
      {&pr_base, &sig_pr, "exists p. Prf(p, x)"},
      {&pr_base, &sig_pr, "forall p. ~Prf(p, x)"},
  };
  for (const Case& c : cases) {
    CAPTURE(c.text);
    FixedPointCertificate cert = godel_carnap_fixed_point(
        parse_formula(*c.sig, c.text), *c.base);
    const double secs = run_seconds([&] {
      const CheckResult chk = check_proof(cert.proof, *cert.theory, 1);
      CHECK(chk.ok);
    });
    CHECK(secs < 10.0);
    const ComplexityClass cp = classify(cert.phi);
    const ComplexityClass cf = classify(cert.psi);
    CHECK(cf.kind == cp.kind);
    CHECK(cf.level == cp.level);
  }
}

TEST_CASE("truth predicate refutation over arithmetic") {
  const SigPtr sig_tr = Signature::arith()->extend("arith+tr", {}, {{"Tr", 1}});
  const Theory base = finite_theory("tr_base", sig_tr, {});
  const TarskiReport rep =
      tarski_obstruction_demo(parse_formula(sig_tr, "Tr(x)"), base);
  CHECK(rep.refuted);
  REQUIRE(rep.inconsistency.has_value());
  CHECK(rep.inconsistency->steps.size() == 21);
  CHECK(rep.inconsistency->premises_used == std::vector<size_t>{0, 1});
  const CheckResult chk = check_proof(*rep.inconsistency, *rep.schema_theory, 2);
  CHECK(chk.ok);
  // conclusion is a literal clash
  CHECK(render(rep.inconsistency->conclusion) == "(Tr(c) & ~(Tr(c)))");
  CHECK(render(rep.failing_biconditional) ==
        "((Tr(c) -> ~(Tr(diag(k)))) & (~(Tr(diag(k))) -> Tr(c)))");
}

TEST_CASE("truth predicate refutation over sets") {
  const SigPtr sig_st = Signature::set()->extend("set+tr", {}, {{"True", 1}});
  const Theory base = finite_theory("set_tr_base", sig_st, {});
  const TarskiReport rep =
      tarski_obstruction_demo(parse_formula(sig_st, "True(x)"), base);
  CHECK(rep.refuted);
  const CheckResult chk = check_proof(*rep.inconsistency, *rep.schema_theory, 2);
  CHECK(chk.ok);
}

TEST_CASE("truth predicate refutation: vacuous candidate still collides") {
  const Theory pa = pa_theory();
  const TarskiReport rep =
      tarski_obstruction_demo(parse_formula(pa.sig(), "x = x"), pa);
  CHECK(rep.refuted);
  const CheckResult chk = check_proof(*rep.inconsistency, *rep.schema_theory, 2);
  CHECK(chk.ok);
}

TEST_CASE("truth report json carries the emptyset encoding") {
  const SigPtr sig_tr = Signature::arith()->extend("arith+tr", {}, {{"Tr", 1}});
  const Theory base = finite_theory("tr_base", sig_tr, {});
  const TarskiReport rep =
      tarski_obstruction_demo(parse_formula(sig_tr, "Tr(x)"), base);
  const nlohmann::json j = rep.to_json();
  REQUIRE(j.contains("empty_set_truth_encoding"));
  const auto& enc = j["empty_set_truth_encoding"];
  CHECK(enc.at("free_variable").get<std::string>() == "x");
  CHECK(enc.at("defining_property_template").get<std::string>().find("sigma") !=
        std::string::npos);
  CHECK(j.contains("liar"));
  CHECK(j.contains("inconsistency"));
}

TEST_CASE("emptyset encoding evaluates correctly on a small universe") {
  // universe: 0 = {}, 1 = {0}, 2 = {1}, 3 = {0, 1}
  const SigPtr s = Signature::set();
  FiniteStructure M(s, 4);
  M.add_tuple("in", {0, 1});
  M.add_tuple("in", {1, 2});
  M.add_tuple("in", {0, 3});
  M.add_tuple("in", {1, 3});

  const FormulaPtr empty_prop = parse_formula(s, "forall y. ~(y in x)");
  const FormulaPtr sigma_true = parse_formula(s, "exists u. forall y. ~(y in u)");
  const FormulaPtr sigma_false = parse_formula(s, "forall u. (u in u)");
  CHECK(evaluate(sigma_true, M));
  CHECK_FALSE(evaluate(sigma_false, M));

  auto satisfiers = [&](const FormulaPtr& prop) {
    std::vector<Elem> out;
    for (Elem e = 0; e < M.size(); ++e)
      if (evaluate(prop, M, {{"x", e}})) out.push_back(e);
    return out;
  };
  // conjoining a true sentence keeps exactly the empty set; a false one
  // leaves nothing
  CHECK(satisfiers(mk_and(sigma_true, empty_prop)) == std::vector<Elem>{0});
  CHECK(satisfiers(mk_and(sigma_false, empty_prop)).empty());
  CHECK(satisfiers(empty_prop) == std::vector<Elem>{0});
}
