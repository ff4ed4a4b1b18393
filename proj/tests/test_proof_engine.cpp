#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "logiclab/godel.hpp"
#include "logiclab/logic.hpp"
#include "logiclab/proof.hpp"
#include "logiclab/prove.hpp"
#include "logiclab/structure.hpp"
#include "logiclab/theory.hpp"

using namespace logiclab;

namespace {

// Hereditarily finite sets with the Ackermann edge relation, cut at a power-of-two
// universe: a in b iff bit a of b is set.
FiniteStructure make_v(size_t size) {
  FiniteStructure m(Signature::set(), size);
  for (Elem b = 0; b < size; ++b)
    for (Elem a = 0; a < 64 && (Elem{1} << a) <= b; ++a)
      if ((b >> a) & 1) m.add_tuple("in", {a, b});
  return m;
}

FormulaPtr arith_parse(const std::string& s) {
  return parse_formula(Signature::arith(), s);
}

std::vector<Nat> codes_of(const std::vector<Proof>& ps) {
  std::vector<Nat> out;
  for (const auto& p : ps) out.push_back(godel_encode(p).value);
  return out;
}

bool is_subsequence(const std::vector<Nat>& small, const std::vector<Nat>& big) {
  size_t j = 0;
  for (const auto& c : small) {
    while (j < big.size() && big[j] != c) ++j;
    if (j == big.size()) return false;
    ++j;
  }
  return true;
}

}  // namespace

TEST_CASE("pa enumeration: base axioms sit in the even slots below 18") {
  const Theory& pa = pa_theory();
  CHECK(pa.name() == "PA");
  CHECK(axioms_of(pa, 0).empty());

  CHECK(render(pa.axiom(0)) == "forall x. ~(S(x) = 0)");
  CHECK(render(pa.axiom(2)) == "forall x. forall y. (S(x) = S(y) -> x = y)");
  CHECK(render(pa.axiom(4)) == "forall x. (x+0) = x");
  CHECK(render(pa.axiom(6)) == "forall x. forall y. (x+S(y)) = S((x+y))");
  CHECK(render(pa.axiom(8)) == "forall x. (x*0) = 0");
  CHECK(render(pa.axiom(16)) == "forall x. forall y. (x < y | (x = y | y < x))");

  auto first3 = axioms_of(pa, 3);
  REQUIRE(first3.size() == 3);
  CHECK(formula_equal(first3[0], pa.axiom(0)));
  CHECK(formula_equal(first3[1], pa.axiom(1)));
  CHECK(formula_equal(first3[2], pa.axiom(2)));

  // prefix law
  auto a7 = axioms_of(pa, 7);
  auto a12 = axioms_of(pa, 12);
  for (size_t i = 0; i < a7.size(); ++i) CHECK(formula_equal(a7[i], a12[i]));

  for (auto& f : a12) CHECK(is_closed(f));
}

TEST_CASE("pa enumeration: induction slots follow the code order of their formulas") {
  const Theory& pa = pa_theory();
  auto prefix = induction_formula_prefix(16);
  REQUIRE(prefix.size() == 16);

  // the smallest arithmetic formula in code order
  CHECK(render(prefix[0]) == "0 < 0");
  CHECK(render(pa.axiom(1)) == "((0 < 0 & forall x. (0 < 0 -> 0 < 0)) -> forall x. 0 < 0)");

  for (size_t i = 0; i + 1 < prefix.size(); ++i)
    CHECK(godel_encode(prefix[i]).value < godel_encode(prefix[i + 1]).value);
  for (const auto& f : prefix) {
    auto zero = parse_term(Signature::arith(), "0");
    CHECK(is_closed(subst_fvar(f, "x", zero)));  // free variables among {x}
  }

  for (size_t j = 0; j < kPaBaseCount; ++j)
    CHECK(formula_equal(pa.axiom(2 * j + 1), induction_instance(prefix[j])));
  for (size_t i = 0; i < 7; ++i)
    CHECK(formula_equal(pa.axiom(18 + i), induction_instance(prefix[kPaBaseCount + i])));
}

TEST_CASE("pa axiom data file matches the embedded enumeration") {
  std::ifstream in(std::string(LOGICLAB_DATA_DIR) + "/pa_axioms.json");
  REQUIRE(in.good());
  auto j = nlohmann::json::parse(in);
  CHECK(j.at("version") == "pa.v1");
  CHECK(j.at("signature") == "ARITH");
  auto base = j.at("base");
  REQUIRE(base.size() == kPaBaseCount);
  const Theory& pa = pa_theory();
  for (size_t i = 0; i < base.size(); ++i)
    CHECK(formula_equal(arith_parse(base[i].get<std::string>()), pa.axiom(2 * i)));
  CHECK(j.at("scheme").at("name") == "induction");
}

TEST_CASE("finite theories are total through the padding tautology") {
  auto sig = Signature::set();
  auto ext = set_base_theory().axiom(0);
  auto empt = set_base_theory().axiom(1);
  CHECK(render(empt) == "exists x. forall y. ~(y in x)");
  CHECK(formula_equal(set_base_theory().axiom(5), padding_tautology(sig)));

  Theory two = finite_theory("TWO", sig, {ext, empt});
  CHECK(formula_equal(two.axiom(1), empt));
  CHECK(formula_equal(two.axiom(2), padding_tautology(sig)));
  CHECK(formula_equal(two.axiom(9), padding_tautology(sig)));
  CHECK(render(padding_tautology(sig)) == "forall x. x = x");
}

TEST_CASE("proof checker accepts small derivations") {
  const Theory& pa = pa_theory();
  auto arith = Signature::arith();
  int eq = arith->rel_index("=");

  SUBCASE("reflexivity generalized") {
    auto v = mk_fvar(arith, "v0");
    Proof p;
    p.steps.push_back(mk_step(Rule::EqRefl, {}, mk_atom(arith, eq, {v, v})));
    p.steps.push_back(mk_step(Rule::ForallIntro, {0}, arith_parse("forall x. x = x")));
    p.conclusion = p.steps.back().formula;
    auto r = check_proof(p, pa, 0);
    CHECK(r.ok);
    CHECK(r.reason == RejectReason::None);
    CHECK(proof_size(p) == 9);
  }

  SUBCASE("assumption discharged by implication") {
    Proof p;
    p.steps.push_back(mk_step(Rule::Assume, {}, arith_parse("0 = 0")));
    p.steps.push_back(mk_step(Rule::ImplIntro, {0}, arith_parse("(0 = 0 -> 0 = 0)")));
    p.conclusion = p.steps.back().formula;
    CHECK(check_proof(p, pa, 0).ok);
  }

  SUBCASE("existential witness recovered from the instance") {
    Proof p;
    p.steps.push_back(mk_step(Rule::EqRefl, {}, arith_parse("0 = 0")));
    p.steps.push_back(mk_step(Rule::ExistsIntro, {0}, arith_parse("exists x. x = 0")));
    p.conclusion = p.steps.back().formula;
    CHECK(check_proof(p, pa, 0).ok);
  }

  SUBCASE("equality replacement below a function symbol") {
    Proof p;
    p.steps.push_back(mk_axiom_step(pa, 4));  // forall x. (x+0) = x
    p.steps.push_back(mk_step(Rule::ForallElim, {0}, arith_parse("(0+0) = 0")));
    p.steps.push_back(mk_step(Rule::EqRefl, {}, arith_parse("S((0+0)) = S((0+0))")));
    p.steps.push_back(mk_step(Rule::EqSubst, {1, 2}, arith_parse("S((0+0)) = S(0)")));
    p.conclusion = p.steps.back().formula;
    p.premises_used = {4};
    auto r = check_proof(p, pa, 5);
    CHECK(r.ok);
    CHECK_FALSE(check_proof(p, pa, 4).ok);  // axiom 4 out of the k=4 fragment
  }
}

TEST_CASE("proof checker rejects with the declared reasons") {
  const Theory& pa = pa_theory();
  auto arith = Signature::arith();
  int eq = arith->rel_index("=");

  SUBCASE("reference out of range") {
    Proof p;
    auto v = mk_fvar(arith, "v0");
    p.steps.push_back(mk_step(Rule::EqRefl, {}, mk_atom(arith, eq, {v, v})));
    p.steps.push_back(mk_step(Rule::ForallIntro, {5}, arith_parse("forall x. x = x")));
    p.conclusion = p.steps.back().formula;
    auto r = check_proof(p, pa, 0);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == RejectReason::BadRule);
    CHECK(r.step == 1);
  }

  SUBCASE("rule shape mismatch") {
    Proof p;
    p.steps.push_back(mk_step(Rule::AndIntro, {}, arith_parse("0 = 0")));
    p.conclusion = p.steps.back().formula;
    auto r = check_proof(p, pa, 0);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == RejectReason::BadRule);
    CHECK(r.step == 0);
  }

  SUBCASE("eigenvariable occurs in the conclusion") {
    auto v = mk_fvar(arith, "v0");
    Proof p;
    p.steps.push_back(mk_step(Rule::EqRefl, {}, mk_atom(arith, eq, {v, v})));
    p.steps.push_back(mk_step(Rule::ForallIntro, {0},
                              mk_forall("x", parse_formula(arith, "x = v0"))));
    p.conclusion = p.steps.back().formula;
    auto r = check_proof(p, pa, 0);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == RejectReason::BadRule);
    CHECK(r.step == 1);
  }

  SUBCASE("axiom outside the fragment") {
    Proof p;
    p.steps.push_back(mk_axiom_step(pa, 7));
    p.conclusion = p.steps.back().formula;
    p.premises_used = {7};
    CHECK(check_proof(p, pa, 8).ok);
    auto r = check_proof(p, pa, 5);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == RejectReason::OutOfFragment);
    CHECK(r.step == 0);
  }

  SUBCASE("conclusion bookkeeping") {
    Proof p;
    p.steps.push_back(mk_axiom_step(pa, 0));
    p.conclusion = arith_parse("0 = 0");
    p.premises_used = {0};
    auto r = check_proof(p, pa, 1);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == RejectReason::ConclusionMismatch);

    p.conclusion = p.steps.back().formula;
    p.premises_used = {};
    auto r2 = check_proof(p, pa, 1);
    CHECK_FALSE(r2.ok);
    CHECK(r2.reason == RejectReason::ConclusionMismatch);

    Proof open;
    open.steps.push_back(mk_step(Rule::Assume, {}, arith_parse("0 = 0")));
    open.conclusion = open.steps.back().formula;
    auto r3 = check_proof(open, pa, 0);
    CHECK_FALSE(r3.ok);
    CHECK(r3.reason == RejectReason::ConclusionMismatch);

    CHECK_FALSE(check_proof(Proof{}, pa, 0).ok);
  }
}

TEST_CASE("proof serialization round trips") {
  const Theory& pa = pa_theory();
  auto arith = Signature::arith();

  Proof p;
  p.steps.push_back(mk_axiom_step(pa, 4));
  p.steps.push_back(mk_step(Rule::ForallElim, {0}, arith_parse("(0+0) = 0")));
  p.steps.push_back(mk_step(Rule::EqRefl, {}, arith_parse("S((0+0)) = S((0+0))")));
  p.steps.push_back(mk_step(Rule::EqSubst, {1, 2}, arith_parse("S((0+0)) = S(0)")));
  p.conclusion = p.steps.back().formula;
  p.premises_used = {4};
  REQUIRE(check_proof(p, pa, 5).ok);

  auto j = proof_to_json(p);
  auto q = proof_from_json(arith, j);
  CHECK(godel_encode(q).value == godel_encode(p).value);
  CHECK(check_proof(q, pa, 5).ok);

  auto code = godel_encode(p).value;
  auto r = godel_decode_proof(arith, code);
  CHECK(godel_encode(r).value == code);
  CHECK(check_proof(r, pa, 5).ok);

  CHECK_THROWS_AS(godel_decode_proof(arith, godel_encode(arith_parse("0 = 0")).value),
                  CodingError);
  CHECK_THROWS_AS(godel_decode_proof(arith, Nat(0)), CodingError);
}

TEST_CASE("proof enumeration: exact stream at a tiny budget") {
  const Theory& pa = pa_theory();
  CHECK_THROWS_AS(enumerate_proofs(pa, 2, 0), SemanticError);
  CHECK(enumerate_proofs(pa, 2, 1).empty());

  // k = 0 leaves only equalities over the numeral pool; budget 7 admits exactly
  // the two single-step reflexivity proofs.
  auto ps = enumerate_proofs(pa, 0, 7);
  REQUIRE(ps.size() == 2);
  CHECK(render(ps[0].conclusion) == "0 = 0");
  CHECK(render(ps[1].conclusion) == "S(0) = S(0)");
  CHECK(proof_size(ps[0]) == 4);
  CHECK(proof_size(ps[1]) == 6);
}

TEST_CASE("proof enumeration: deterministic, validated, monotone") {
  const Theory& pa = pa_theory();

  auto a = enumerate_proofs(pa, 2, 12);
  auto b = enumerate_proofs(pa, 2, 12);
  auto ca = codes_of(a);
  auto cb = codes_of(b);
  REQUIRE(!ca.empty());
  CHECK(ca == cb);
  for (size_t i = 0; i + 1 < ca.size(); ++i) CHECK(ca[i] < ca[i + 1]);

  for (const auto& p : a) {
    CHECK(check_proof(p, pa, 2).ok);
    CHECK(check_proof(p, pa, 6).ok);  // larger fragments keep every proof
  }

  auto small = enumerate_proofs(pa, 2, 8);
  CHECK(is_subsequence(codes_of(small), ca));

  auto s7 = enumerate_proofs(pa, 0, 7);
  auto s9 = enumerate_proofs(pa, 0, 9);
  CHECK(is_subsequence(codes_of(s7), codes_of(s9)));
}

TEST_CASE("proof enumeration: conclusions hold in finite set models") {
  const Theory& t = set_base_theory();
  auto ps = enumerate_proofs(t, 2, 26);
  REQUIRE(ps.size() >= 4);

  auto small = enumerate_proofs(t, 2, 7);
  REQUIRE(small.size() == 1);
  CHECK(formula_equal(small[0].conclusion, t.axiom(1)));

  auto v3 = make_v(4);
  auto v4 = make_v(16);
  bool saw_conj = false;
  for (const auto& p : ps) {
    CHECK(check_proof(p, t, 2).ok);
    CHECK(is_closed(p.conclusion));
    CHECK(evaluate(p.conclusion, v3));
    CHECK(evaluate(p.conclusion, v4));
    if (formula_equal(p.conclusion, mk_and(t.axiom(1), t.axiom(1)))) saw_conj = true;
  }
  CHECK(saw_conj);
}

TEST_CASE("bounded provability search is honest about its budget") {
  const Theory& pa = pa_theory();

  auto goal = pa.axiom(0);  // forall x. ~(S(x) = 0), 6 nodes
  CHECK_FALSE(is_provable_within(pa, 1, goal, 6).has_value());
  auto hit = is_provable_within(pa, 1, goal, 7);
  REQUIRE(hit.has_value());
  CHECK(check_proof(*hit, pa, 1).ok);
  CHECK(formula_equal(hit->conclusion, goal));
  CHECK(is_provable_within(pa, 5, goal, 7).has_value());  // fragment monotone
  CHECK_FALSE(is_provable_within(pa, 0, goal, 20).has_value());

  auto refl = arith_parse("S(0) = S(0)");
  auto r = is_provable_within(pa, 0, refl, 7);
  REQUIRE(r.has_value());
  CHECK(proof_size(*r) == 6);

  auto all = arith_parse("forall x. x = x");
  CHECK_FALSE(is_provable_within(pa, 0, all, 8).has_value());
  auto g = is_provable_within(pa, 0, all, 9);
  REQUIRE(g.has_value());
  CHECK(check_proof(*g, pa, 0).ok);
  CHECK(proof_size(*g) == 9);

  CHECK_FALSE(is_provable_within(pa, 9, arith_parse("0 = S(0)"), 10).has_value());

  CHECK_THROWS_AS(is_provable_within(pa, 0, parse_formula(Signature::arith(), "x = 0"), 9),
                  SemanticError);
}
