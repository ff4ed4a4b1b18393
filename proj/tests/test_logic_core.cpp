#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "logiclab/classify.hpp"
#include "logiclab/godel.hpp"
#include "logiclab/logic.hpp"
#include "logiclab/nat.hpp"
#include "logiclab/structure.hpp"

using namespace logiclab;

namespace {

// Hereditarily finite sets with the Ackermann edge relation: a in b iff bit a of b.
// Universe size 4 gives {0, {0}, {{0}}, {0,{0}}}.
FiniteStructure make_v3() {
  FiniteStructure m(Signature::set(), 4);
  m.add_tuple("in", {0, 1});
  m.add_tuple("in", {1, 2});
  m.add_tuple("in", {0, 3});
  m.add_tuple("in", {1, 3});
  return m;
}

// Arithmetic mod n: S wraps, + and * are taken mod n, < is numeric order.
FiniteStructure make_mod(Elem n) {
  FiniteStructure m(Signature::arith(), n);
  m.set_const("0", 0);
  std::vector<Elem> succ(n), plus(n * n), times(n * n);
  for (Elem a = 0; a < n; ++a) {
    succ[a] = (a + 1) % n;
    for (Elem b = 0; b < n; ++b) {
      plus[a * n + b] = (a + b) % n;
      times[a * n + b] = (a * b) % n;
      if (a < b) m.add_tuple("<", {a, b});
    }
  }
  m.set_func("S", succ);
  m.set_func("+", plus);
  m.set_func("*", times);
  return m;
}

// Deterministic formula corpus: every modal-free shape up to a size budget over a
// fixed atom pool, plus quantified wrappers. Used for round-trip and prenex laws.
std::vector<FormulaPtr> arith_corpus() {
  auto sig = Signature::arith();
  auto x = mk_fvar(sig, "x");
  auto y = mk_fvar(sig, "y");
  auto zero = mk_func(sig, "0", {});
  auto one = mk_func(sig, "S", {zero});

  std::vector<FormulaPtr> atoms = {
      mk_atom(sig, "=", {x, zero}),
      mk_atom(sig, "<", {x, y}),
      mk_atom(sig, "=", {mk_func(sig, "+", {x, y}), y}),
      mk_atom(sig, "<", {zero, one}),
  };

  std::vector<FormulaPtr> out = atoms;
  size_t layer0 = out.size();
  // one connective layer
  for (size_t i = 0; i < layer0; ++i) {
    out.push_back(mk_neg(out[i]));
    for (size_t j = 0; j < layer0; ++j) {
      out.push_back(mk_and(out[i], out[j]));
      out.push_back(mk_implies(out[i], out[j]));
    }
  }
  size_t layer1 = out.size();
  // quantified wrappers over both free variables, including bounded ones
  for (size_t i = 0; i < layer1; ++i) {
    out.push_back(mk_forall("x", out[i]));
    out.push_back(mk_exists("y", out[i]));
    out.push_back(mk_exists("x", mk_forall("y", out[i])));
    out.push_back(mk_bforall("x", one, out[i]));
  }
  return out;
}

std::vector<FormulaPtr> set_corpus() {
  auto sig = Signature::set();
  auto x = mk_fvar(sig, "x");
  auto y = mk_fvar(sig, "y");
  std::vector<FormulaPtr> atoms = {
      mk_atom(sig, "in", {x, y}),
      mk_atom(sig, "=", {x, y}),
      mk_atom(sig, "in", {y, x}),
  };
  std::vector<FormulaPtr> out = atoms;
  for (size_t i = 0; i < atoms.size(); ++i)
    for (size_t j = 0; j < atoms.size(); ++j) {
      out.push_back(mk_or(atoms[i], atoms[j]));
      out.push_back(mk_implies(mk_neg(atoms[i]), atoms[j]));
    }
  size_t layer1 = out.size();
  for (size_t i = 0; i < layer1; ++i) {
    out.push_back(mk_forall("x", out[i]));
    out.push_back(mk_exists("x", mk_forall("y", out[i])));
    out.push_back(mk_bexists("x", y, out[i]));
  }
  return out;
}

std::vector<Assignment> all_assignments(const std::set<std::string>& vars, Elem n) {
  std::vector<Assignment> out = {{}};
  for (const auto& v : vars) {
    std::vector<Assignment> next;
    for (const auto& a : out)
      for (Elem e = 0; e < n; ++e) {
        Assignment b = a;
        b[v] = e;
        next.push_back(b);
      }
    out = next;
  }
  return out;
}

}  // namespace

TEST_CASE("cantor pairing: frozen values and inverse") {
  CHECK(pair(0, 0) == 0);
  CHECK(pair(1, 0) == 1);
  CHECK(pair(0, 1) == 2);
  CHECK(pair(2, 1) == 7);
  CHECK(pair(1, 2) == 8);

  for (unsigned z = 0; z < 5000; ++z) {
    auto [a, b] = unpair(z);
    CHECK(pair(a, b) == z);
  }
  // bijectivity on a grid
  std::set<Nat> seen;
  for (unsigned a = 0; a < 60; ++a)
    for (unsigned b = 0; b < 60; ++b) seen.insert(pair(a, b));
  CHECK(seen.size() == 3600);

  Nat big = Nat(1) << 200;
  auto [a, b] = unpair(pair(big, big + 3));
  CHECK(a == big);
  CHECK(b == big + 3);
}

TEST_CASE("token streams: round trip, front ops, linear growth") {
  CHECK(tokens_to_stream({}) == kEmptyStream);
  CHECK(stream_empty(kEmptyStream));
  CHECK_FALSE(stream_empty(stream_cons(0, kEmptyStream)));

  std::vector<std::vector<Nat>> cases = {
      {},
      {0},
      {0, 0, 0},
      {1, 2, 3, 4, 5},
      {1000000},
      {Nat(1) << 90, 0, 7},
  };
  for (const auto& toks : cases) {
    Nat s = tokens_to_stream(toks);
    CHECK(stream_to_tokens(s) == toks);
  }

  // uncons undoes cons regardless of tail shape
  Nat tail = tokens_to_stream({9, 8, 7});
  auto [h, t] = stream_uncons(stream_cons(42, tail));
  CHECK(h == 42);
  CHECK(t == tail);

  CHECK_THROWS_AS(stream_uncons(kEmptyStream), CodingError);
  CHECK_THROWS_AS(stream_uncons(0), CodingError);

  // n small tokens cost O(n) bits, not O(2^n)
  Nat s = kEmptyStream;
  for (int i = 0; i < 500; ++i) s = stream_cons(3, s);
  CHECK(mpz_sizeinbase(s.get_mpz_t(), 2) < 3000);
}

TEST_CASE("parse: grammar examples") {
  auto arith = Signature::arith();
  auto set = Signature::set();

  SUBCASE("existential over arithmetic") {
    auto f = parse_formula(arith, "exists x. x = 0");
    REQUIRE(f->tag == FTag::Exists);
    auto body = f->subs[0];
    REQUIRE(body->tag == FTag::Atom);
    CHECK(body->terms[0]->tag == TermTag::BVar);
    CHECK(body->terms[1]->tag == TermTag::Func);
    CHECK(free_vars(f).empty());
  }

  SUBCASE("universal negation over sets keeps x free") {
    auto f = parse_formula(set, "forall y. ~(y in x)");
    REQUIRE(f->tag == FTag::Forall);
    CHECK(f->subs[0]->tag == FTag::Neg);
    CHECK(free_vars(f) == std::set<std::string>{"x"});
  }

  SUBCASE("bounded universal is a primitive node") {
    auto f = parse_formula(arith, "forall x < S(0). x = 0");
    CHECK(f->tag == FTag::BForall);
    CHECK(render(f->terms[0]) == "S(0)");
  }

  SUBCASE("modal connectives") {
    auto f = parse_formula(set, "box (x = x -> dia x = x)");
    CHECK(f->tag == FTag::Box);
    CHECK(has_modal(f));
  }

  SUBCASE("errors carry a position") {
    CHECK_THROWS_AS(parse_formula(arith, "forall x."), ParseError);
    CHECK_THROWS_AS(parse_formula(arith, "x in y"), ParseError);  // wrong signature
    CHECK_THROWS_AS(parse_formula(arith, "S(0,0) = 0"), ParseError);
    CHECK_THROWS_AS(parse_formula(arith, "(x = 0 &"), ParseError);
    try {
      parse_formula(arith, "exists x. x = ");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.pos > 0);
    }
  }
}

TEST_CASE("render/parse round trip") {
  auto arith = Signature::arith();
  auto set = Signature::set();

  for (const char* src : {
           "exists x. x = 0",
           "forall x < S(0). x = 0",
           "forall x. exists y. (x < y & ~(y = 0))",
           "((x = 0 | x = S(0)) -> exists z. (z + x) = x)",
           "exists x < (y + y). (x * x) = y",
       }) {
    auto f = parse_formula(arith, src);
    auto g = parse_formula(arith, render(f));
    CHECK(formula_equal(f, g));
  }

  for (const auto& f : arith_corpus()) {
    auto g = parse_formula(arith, render(f));
    CHECK(formula_equal(f, g));
  }
  for (const auto& f : set_corpus()) {
    auto g = parse_formula(set, render(f));
    CHECK(formula_equal(f, g));
  }
}

TEST_CASE("alpha equivalence ignores binder names") {
  auto set = Signature::set();
  auto a = parse_formula(set, "forall a. a in x");
  auto b = parse_formula(set, "forall b. b in x");
  auto c = parse_formula(set, "forall a. a in y");
  CHECK(formula_equal(a, b));
  CHECK_FALSE(formula_equal(a, c));

  // renderer must not capture: inner binder with a clashing hint picks a fresh name
  auto atom = mk_atom(set, "in", {mk_bvar(set, 0), mk_bvar(set, 1)});
  auto nested = mk_forall_raw(mk_exists_raw(atom, "x"), "x");
  CHECK(render(nested) == "forall x. exists y. y in x");
  auto back = parse_formula(set, render(nested));
  CHECK(formula_equal(nested, back));
}

TEST_CASE("evaluate: membership examples on V_3") {
  auto set = Signature::set();
  auto m = make_v3();

  CHECK(evaluate(parse_formula(set, "exists x. forall y. ~(y in x)"), m));
  CHECK_FALSE(evaluate(parse_formula(set, "forall x. exists y. x in y"), m));
  CHECK(evaluate(parse_formula(set, "x = x"), m, {{"x", 2}}));

  // the falsity witness: element 2 ({{0}}) sits in no universe element
  CHECK_FALSE(evaluate(parse_formula(set, "exists y. x in y"), m, {{"x", 2}}));
  CHECK(evaluate(parse_formula(set, "exists y. x in y"), m, {{"x", 0}}));
  CHECK(evaluate(parse_formula(set, "exists y. x in y"), m, {{"x", 1}}));

  SUBCASE("error cases") {
    CHECK_THROWS_AS(evaluate(parse_formula(set, "x = x"), m), SemanticError);
    auto arith_f = parse_formula(Signature::arith(), "0 = 0");
    CHECK_THROWS_AS(evaluate(arith_f, m), SemanticError);
    CHECK_THROWS_AS(evaluate(parse_formula(set, "box x = x"), m, {{"x", 0}}), SemanticError);
  }
}

TEST_CASE("evaluate: arithmetic mod 4") {
  auto arith = Signature::arith();
  auto m = make_mod(4);
  CHECK(evaluate(parse_formula(arith, "forall x. exists y. (x + y) = 0"), m));
  CHECK(evaluate(parse_formula(arith, "exists x. (~(x = 0) & (x * x) = 0)"), m));
  CHECK_FALSE(evaluate(parse_formula(arith, "forall x. x < S(x)"), m));  // 3 wraps to 0
  CHECK(evaluate(parse_formula(arith, "forall x < S(S(0)). (x * x) = x"), m));
}

TEST_CASE("prenex: frozen shapes") {
  auto arith = Signature::arith();

  SUBCASE("negation dualizes") {
    auto f = prenex(parse_formula(arith, "~(exists x. x = y)"));
    CHECK(formula_equal(f, parse_formula(arith, "forall x. ~(x = y)")));
  }

  SUBCASE("existential antecedent turns universal and leads") {
    auto f = prenex(parse_formula(arith, "((exists x. x = y) -> exists x. x = z)"));
    CHECK(formula_equal(f, parse_formula(arith, "forall u. exists v. (u = y -> v = z)")));
  }

  SUBCASE("already prenex is untouched") {
    auto f = parse_formula(arith, "forall x. exists y. (x < y & y = y)");
    CHECK(formula_equal(prenex(f), f));
  }

  SUBCASE("bounded quantifiers stay in the matrix") {
    auto f = parse_formula(arith, "forall x < S(0). exists y. x = y");
    CHECK(formula_equal(prenex(f), f));
  }

  SUBCASE("like-polarity blocks interleave without alternating") {
    auto f = prenex(parse_formula(arith, "((forall x. x = x) & forall y. y = y)"));
    auto expect = parse_formula(arith, "forall x. forall y. (x = x & y = y)");
    CHECK(formula_equal(f, expect));
  }

  SUBCASE("modal input is rejected") {
    auto set = Signature::set();
    CHECK_THROWS_AS(prenex(parse_formula(set, "box x = x")), SemanticError);
  }
}

TEST_CASE("prenex: idempotent and truth-preserving on exhaustive corpus") {
  auto v3 = make_v3();
  auto mod3 = make_mod(3);

  auto check_corpus = [](const std::vector<FormulaPtr>& corpus, const FiniteStructure& m) {
    for (const auto& f : corpus) {
      auto p = prenex(f);
      CHECK(formula_equal(prenex(p), p));
      for (const auto& asg : all_assignments(free_vars(f), static_cast<Elem>(m.size()))) {
        bool want = evaluate(f, m, asg);
        bool got = evaluate(p, m, asg);
        if (want != got) {
          CAPTURE(render(f));
          CAPTURE(render(p));
        }
        REQUIRE(want == got);
      }
    }
  };
  check_corpus(arith_corpus(), mod3);
  check_corpus(set_corpus(), v3);
}

TEST_CASE("classify: frozen examples") {
  auto arith = Signature::arith();
  auto set = Signature::set();

  CHECK(classify(parse_formula(set, "forall y. ~(y in x)")) == pi_class(1));
  CHECK(classify(parse_formula(arith, "forall x < t. x = 0")) == ComplexityClass{CKind::Delta0, 0});
  CHECK(classify(parse_formula(arith, "exists x. forall y. exists z. z = x")) == sigma_class(3));

  CHECK(classify(parse_formula(arith, "x = 0")) == ComplexityClass{CKind::Delta0, 0});
  CHECK(classify(parse_formula(arith, "forall x < S(0). exists y < x. y = 0")) ==
        ComplexityClass{CKind::Delta0, 0});
  CHECK(classify(parse_formula(arith, "exists y. x < y")) == sigma_class(1));
  CHECK(classify(parse_formula(arith, "~(exists y. x < y)")) == pi_class(1));
  // unbounded existential under a bounded universal still counts
  CHECK(classify(parse_formula(arith, "forall x < S(0). exists y. x = y")) == sigma_class(1));
  // same-polarity conjuncts merge into one block
  CHECK(classify(parse_formula(arith, "((forall x. x = x) & forall y. y = y)")) == pi_class(1));
  // opposite polarities force level 2; the left conjunct leads
  CHECK(classify(parse_formula(arith, "((forall x. x = x) & exists y. y = y)")) == pi_class(2));
  CHECK(classify(parse_formula(arith, "((exists y. y = y) & forall x. x = x)")) == sigma_class(2));

  CHECK(sigma_class(2).str() == "Sigma 2");
  CHECK(pi_class(1).str() == "Pi 1");
  CHECK((ComplexityClass{CKind::Delta0, 0}).str() == "Delta0");
}

TEST_CASE("classify: one added quantifier moves the level by at most one") {
  auto corpus = arith_corpus();
  for (const auto& f : corpus) {
    auto base = classify(f);
    for (auto wrapped : {mk_forall("w", f), mk_exists("w", f)}) {
      auto c = classify(wrapped);
      CHECK(c.level <= base.level + 1);
      CHECK(c.level >= base.level);
    }
  }
}

TEST_CASE("godel coding: round trip and spot values") {
  auto arith = Signature::arith();
  auto set = Signature::set();

  for (const char* src : {
           "exists x. x = 0",
           "forall x < S(0). x = 0",
           "forall x. exists y. (x < y & ~(y = 0))",
       }) {
    auto f = parse_formula(arith, src);
    auto code = godel_encode(f);
    CHECK(code.kind == CodeKind::Formula);
    CHECK(formula_equal(godel_decode_formula(arith, code.value), f));
  }

  auto t = parse_term(arith, "(S(0) + (x * y))");
  auto tc = godel_encode(t);
  CHECK(tc.kind == CodeKind::Term);
  CHECK(term_equal(godel_decode_term(arith, tc.value), t));

  // string payloads survive
  auto named = mk_fvar(set, "alpha2");
  auto back = godel_decode_term(set, godel_encode(named).value);
  CHECK(back->fvar == "alpha2");
}

TEST_CASE("godel coding: injective on the corpus, decode total on junk") {
  auto arith = Signature::arith();
  auto set = Signature::set();

  // codes are relative to a signature, so the injectivity law is per signature
  std::set<std::pair<std::string, Nat>> codes;
  size_t objects = 0;
  auto feed = [&](const std::vector<FormulaPtr>& corpus, SigPtr sig) {
    for (const auto& f : corpus) {
      codes.insert({sig->name(), godel_encode(f).value});
      ++objects;
    }
  };
  feed(arith_corpus(), arith);
  feed(set_corpus(), set);

  // pad the corpus to 10^4 distinct terms: numerals and variable chains
  auto zero = mk_func(arith, "0", {});
  TermPtr num = zero;
  for (int i = 0; objects < 10000; ++i) {
    num = mk_func(arith, "S", {num});
    TermPtr v = mk_fvar(arith, "v" + std::to_string(i));
    codes.insert({"term", godel_encode(num).value});
    codes.insert({"term", godel_encode(mk_func(arith, "+", {num, v})).value});
    objects += 2;
  }
  CHECK(objects >= 10000);
  CHECK(codes.size() == objects);

  SUBCASE("decode never crashes, and successes re-encode to the same value") {
    int ok = 0;
    for (unsigned z = 0; z < 4000; ++z) {
      try {
        auto f = godel_decode_formula(arith, z);
        CHECK(godel_encode(f).value == z);
        ++ok;
      } catch (const CodingError&) {
      } catch (const SemanticError&) {
      }
    }
    CHECK(ok < 4000);  // plenty of non-codes in range
    CHECK_THROWS_AS(godel_decode_formula(arith, 0), CodingError);
    CHECK_THROWS_AS(godel_decode_formula(arith, kEmptyStream), CodingError);
  }

  SUBCASE("formula codes declare their kind") {
    auto f = parse_formula(set, "exists x. x in y");
    auto code = godel_encode(f);
    CHECK_THROWS_AS(godel_decode_term(set, code.value), CodingError);
  }
}

TEST_CASE("substitution machinery") {
  auto arith = Signature::arith();
  auto sig = arith;

  SUBCASE("open then close round trips") {
    auto body = parse_formula(sig, "x < y");
    auto closed = close_over(body, "x");
    auto opened = open_body(closed, mk_fvar(sig, "x"));
    CHECK(formula_equal(opened, body));
  }

  SUBCASE("match_open recovers the witness") {
    auto f = parse_formula(sig, "exists x. (x + x) = y");
    auto witness = parse_term(sig, "S(S(0))");
    auto inst = open_body(f->subs[0], witness);
    auto got = match_open(f->subs[0], inst);
    REQUIRE(got.has_value());
    CHECK(term_equal(*got, witness));

    auto wrong = parse_formula(sig, "(0 + 0) = 0");
    CHECK_FALSE(match_open(f->subs[0], wrong).has_value());
  }

  SUBCASE("vacuous binder matches anything") {
    auto f = parse_formula(sig, "forall x. y = y");
    auto got = match_open(f->subs[0], parse_formula(sig, "y = y"));
    CHECK(got.has_value());
  }

  SUBCASE("subst_fvar avoids capture") {
    auto f = parse_formula(sig, "exists z. z = x");
    auto g = subst_fvar(f, "x", parse_term(sig, "S(w)"));
    CHECK(formula_equal(g, parse_formula(sig, "exists z. z = S(w)")));
    CHECK(free_vars(g) == std::set<std::string>{"w"});
  }
}

TEST_CASE("signature discipline") {
  auto arith = Signature::arith();
  auto set = Signature::set();
  CHECK(arith->func_index("S") >= 0);
  CHECK(set->func_index("S") < 0);
  CHECK(set->rel_index("in") == set->bound_rel());

  auto ext = set->extend("set+diag", {{"diag", 1}, {"c0", 0}}, {});
  CHECK(ext->func_index("diag") >= 0);
  CHECK(ext->rel_index("=") == set->rel_index("="));
  CHECK(ext->compatible(*set));
  CHECK(set->compatible(*ext));
  CHECK_FALSE(set->compatible(*arith));
  CHECK_THROWS_AS(set->extend("bad", {{"in", 3}}, {}), SemanticError);

  // formulas over the base signature evaluate in extended-signature structures
  FiniteStructure m(ext, 2);
  m.set_func("diag", {1, 0});
  m.set_const("c0", 0);
  m.add_tuple("in", {0, 1});
  CHECK(evaluate(parse_formula(set, "exists x. x in y"), m, {{"y", 1}}));
}
