#include "logiclab/theory.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "logiclab/godel.hpp"
#include "logiclab/nat.hpp"

namespace logiclab {

namespace {

const char* kPaBase[kPaBaseCount] = {
    "forall x. ~(S(x) = 0)",
    "forall x. forall y. (S(x) = S(y) -> x = y)",
    "forall x. (x + 0) = x",
    "forall x. forall y. (x + S(y)) = S((x + y))",
    "forall x. (x * 0) = 0",
    "forall x. forall y. (x * S(y)) = ((x * y) + x)",
    "forall x. ~(x < 0)",
    "forall x. forall y. ((x < S(y) -> (x < y | x = y)) & ((x < y | x = y) -> x < S(y)))",
    "forall x. forall y. (x < y | (x = y | y < x))",
};

int gamma_bits(const Nat& token) {
  Nat v = token + 1;
  return 2 * static_cast<int>(mpz_sizeinbase(v.get_mpz_t(), 2)) - 1;
}

// Bit costs of the coding tokens, fixed by the token layout.
struct Costs {
  SigPtr sig;
  int zero, succ, plus, times;
  int lt, eq;
  int neg, conj, disj, impl, fa, ex, bfa, bex;
  int fvar_x;
  std::vector<int> bvar;  // cost of index i

  explicit Costs(SigPtr s) : sig(std::move(s)) {
    auto func_tok = [&](const char* n) { return gamma_bits(pair(2, sig->func_index(n))); };
    auto rel_tok = [&](unsigned tag, const char* n) {
      return gamma_bits(pair(tag, sig->rel_index(n)));
    };
    zero = func_tok("0");
    succ = func_tok("S");
    plus = func_tok("+");
    times = func_tok("*");
    lt = rel_tok(3, "<");
    eq = rel_tok(3, "=");
    neg = gamma_bits(pair(4, 0));
    conj = gamma_bits(pair(5, 0));
    disj = gamma_bits(pair(6, 0));
    impl = gamma_bits(pair(7, 0));
    fa = gamma_bits(pair(8, 0));
    ex = gamma_bits(pair(9, 0));
    bfa = gamma_bits(pair(10, sig->bound_rel()));
    bex = gamma_bits(pair(11, sig->bound_rel()));
    fvar_x = gamma_bits(pair(1, string_code("x")));
    for (int i = 0; i < 8; ++i) bvar.push_back(gamma_bits(pair(0, i)));
  }
};

struct TermCand {
  TermPtr t;
  int bits;
};
struct FormCand {
  FormulaPtr f;
  int bits;
};

class CodeOrderGen {
 public:
  CodeOrderGen() : sig_(Signature::arith()), c_(sig_) {}

  // All formulas with stream cost <= budget, free vars among {x}. The stream
  // value of any formula outside this set exceeds every value inside it, so the
  // collected set sorted by code is an initial segment of the global order.
  std::vector<FormulaPtr> up_to(int budget) {
    terms_.clear();
    forms_.clear();
    std::vector<FormulaPtr> out;
    for (const auto& fc : formulas(budget, 0)) out.push_back(fc.f);
    std::sort(out.begin(), out.end(), [](const FormulaPtr& a, const FormulaPtr& b) {
      return godel_encode(a).value < godel_encode(b).value;
    });
    return out;
  }

 private:
  SigPtr sig_;
  Costs c_;
  std::map<std::pair<int, int>, std::vector<TermCand>> terms_;
  std::map<std::pair<int, int>, std::vector<FormCand>> forms_;

  const std::vector<TermCand>& terms(int budget, int depth) {
    if (budget < 0) budget = 0;
    auto key = std::make_pair(budget, depth);
    auto it = terms_.find(key);
    if (it != terms_.end()) return it->second;
    std::vector<TermCand> out;
    if (c_.zero <= budget) out.push_back({mk_func(sig_, "0", {}), c_.zero});
    for (int i = 0; i < depth && i < static_cast<int>(c_.bvar.size()); ++i)
      if (c_.bvar[i] <= budget) out.push_back({mk_bvar(sig_, i), c_.bvar[i]});
    if (c_.fvar_x <= budget) out.push_back({mk_fvar(sig_, "x"), c_.fvar_x});
    if (c_.succ < budget)
      for (const auto& a : terms(budget - c_.succ, depth))
        out.push_back({mk_func(sig_, "S", {a.t}), c_.succ + a.bits});
    for (auto [op, cost] : {std::pair<const char*, int>{"+", c_.plus}, {"*", c_.times}}) {
      if (cost >= budget) continue;
      for (const auto& a : terms(budget - cost, depth))
        for (const auto& b : terms(budget - cost - a.bits, depth))
          out.push_back({mk_func(sig_, op, {a.t, b.t}), cost + a.bits + b.bits});
    }
    return terms_.emplace(key, std::move(out)).first->second;
  }

  const std::vector<FormCand>& formulas(int budget, int depth) {
    if (budget < 0) budget = 0;
    auto key = std::make_pair(budget, depth);
    auto it = forms_.find(key);
    if (it != forms_.end()) return it->second;
    std::vector<FormCand> out;
    for (auto [rel, cost] : {std::pair<const char*, int>{"<", c_.lt}, {"=", c_.eq}}) {
      if (cost >= budget) continue;
      for (const auto& a : terms(budget - cost, depth))
        for (const auto& b : terms(budget - cost - a.bits, depth))
          out.push_back({mk_atom(sig_, rel, {a.t, b.t}), cost + a.bits + b.bits});
    }
    if (c_.neg < budget)
      for (const auto& f : formulas(budget - c_.neg, depth))
        out.push_back({mk_neg(f.f), c_.neg + f.bits});
    for (auto [tag, cost] : {std::pair<int, int>{0, c_.conj}, {1, c_.disj}, {2, c_.impl}}) {
      if (cost >= budget) continue;
      for (const auto& a : formulas(budget - cost, depth))
        for (const auto& b : formulas(budget - cost - a.bits, depth)) {
          auto f = tag == 0 ? mk_and(a.f, b.f) : tag == 1 ? mk_or(a.f, b.f) : mk_implies(a.f, b.f);
          out.push_back({f, cost + a.bits + b.bits});
        }
    }
    for (auto [uni, cost] : {std::pair<bool, int>{true, c_.fa}, {false, c_.ex}}) {
      if (cost >= budget) continue;
      for (const auto& b : formulas(budget - cost, depth + 1))
        out.push_back({uni ? mk_forall_raw(b.f) : mk_exists_raw(b.f), cost + b.bits});
    }
    int brel = sig_->bound_rel();
    for (auto [uni, cost] : {std::pair<bool, int>{true, c_.bfa}, {false, c_.bex}}) {
      if (cost >= budget) continue;
      for (const auto& bt : terms(budget - cost, depth))
        for (const auto& b : formulas(budget - cost - bt.bits, depth + 1)) {
          auto f = uni ? mk_bforall_raw(brel, bt.t, b.f) : mk_bexists_raw(brel, bt.t, b.f);
          out.push_back({f, cost + bt.bits + b.bits});
        }
    }
    return forms_.emplace(key, std::move(out)).first->second;
  }
};

std::mutex g_mutex;
std::vector<FormulaPtr> g_sorted;  // induction formulas in code order
int g_radius = 0;

}  // namespace

std::vector<FormulaPtr> induction_formula_prefix(size_t n) {
  std::lock_guard<std::mutex> lock(g_mutex);
  while (g_sorted.size() < n) {
    g_radius = g_radius == 0 ? 28 : g_radius + 6;
    if (g_radius > 72) throw std::runtime_error("induction enumeration radius exhausted");
    g_sorted = CodeOrderGen().up_to(g_radius);
  }
  return {g_sorted.begin(), g_sorted.begin() + static_cast<long>(n)};
}

FormulaPtr induction_instance(const FormulaPtr& phi) {
  auto sig = phi->sig;
  auto zero = mk_func(sig, "0", {});
  auto x = mk_fvar(sig, "x");
  auto base = subst_fvar(phi, "x", zero);
  auto succ = subst_fvar(phi, "x", mk_func(sig, "S", {x}));
  auto step = mk_forall("x", mk_implies(phi, succ));
  return mk_implies(mk_and(base, step), mk_forall("x", phi));
}

FormulaPtr padding_tautology(SigPtr sig) {
  static std::mutex m;
  static std::map<std::string, FormulaPtr> cache;
  std::lock_guard<std::mutex> lock(m);
  auto& f = cache[sig->name()];
  if (!f) f = parse_formula(sig, "forall x. x = x");
  return f;
}

std::vector<FormulaPtr> axioms_of(const Theory& T, size_t k) {
  std::vector<FormulaPtr> out;
  out.reserve(k);
  for (size_t i = 0; i < k; ++i) out.push_back(T.axiom(i));
  return out;
}

const Theory& pa_theory() {
  static const Theory T("PA", Signature::arith(), [](size_t i) -> FormulaPtr {
    static std::mutex m;
    static std::map<size_t, FormulaPtr> cache;
    std::lock_guard<std::mutex> lock(m);
    auto& slot = cache[i];
    if (slot) return slot;
    if (i < 2 * kPaBaseCount && i % 2 == 0) {
      slot = parse_formula(Signature::arith(), kPaBase[i / 2]);
    } else {
      size_t j = i < 2 * kPaBaseCount ? (i - 1) / 2 : kPaBaseCount + (i - 2 * kPaBaseCount);
      slot = induction_instance(induction_formula_prefix(j + 1)[j]);
    }
    return slot;
  });
  return T;
}

const Theory& set_base_theory() {
  static const Theory T = [] {
    auto sig = Signature::set();
    std::vector<FormulaPtr> axioms = {
        parse_formula(sig,
                      "forall x. forall y. (((forall z. (z in x -> z in y)) & "
                      "(forall z. (z in y -> z in x))) -> x = y)"),
        parse_formula(sig, "exists x. forall y. ~(y in x)"),
    };
    return finite_theory("SET0", sig, std::move(axioms));
  }();
  return T;
}

Theory finite_theory(std::string name, SigPtr sig, std::vector<FormulaPtr> axioms) {
  auto list = std::make_shared<std::vector<FormulaPtr>>(std::move(axioms));
  auto s = sig;
  return Theory(std::move(name), std::move(sig), [list, s](size_t i) -> FormulaPtr {
    if (i < list->size()) return (*list)[i];
    return padding_tautology(s);
  });
}

}  // namespace logiclab
