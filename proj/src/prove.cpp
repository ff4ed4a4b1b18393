#include "logiclab/prove.hpp"

#include <algorithm>
#include <cassert>

#include "logiclab/godel.hpp"

namespace logiclab {

namespace {

bool term_closed(const TermPtr& t) {
  if (t->tag != TermTag::Func) return false;
  for (const auto& a : t->args)
    if (!term_closed(a)) return false;
  return true;
}

void collect_subterms(const TermPtr& t, std::vector<TermPtr>& out) {
  if (term_closed(t)) out.push_back(t);
  for (const auto& a : t->args) collect_subterms(a, out);
}

void collect_subterms(const FormulaPtr& f, std::vector<TermPtr>& out) {
  for (const auto& t : f->terms) collect_subterms(t, out);
  for (const auto& s : f->subs) collect_subterms(s, out);
}

// Closed ground terms usable as equality subjects and instantiation witnesses:
// subterms of the cited axioms plus small numerals. Sorted by code, deduplicated.
std::vector<TermPtr> term_pool(const Theory& T, size_t k, size_t size_budget) {
  std::vector<TermPtr> pool;
  for (const auto& ax : axioms_of(T, k)) collect_subterms(ax, pool);
  int zi = T.sig()->func_index("0");
  int si = T.sig()->func_index("S");
  if (zi >= 0) {
    TermPtr n = mk_func(T.sig(), zi, {});
    pool.push_back(n);
    size_t max_nodes = std::max<size_t>(2, size_budget / 2);
    while (si >= 0 && node_count(n) < max_nodes) {
      n = mk_func(T.sig(), si, {n});
      pool.push_back(n);
    }
  }
  std::sort(pool.begin(), pool.end(), [](const TermPtr& a, const TermPtr& b) {
    return godel_encode(a).value < godel_encode(b).value;
  });
  pool.erase(std::unique(pool.begin(), pool.end(),
                         [](const TermPtr& a, const TermPtr& b) { return term_equal(a, b); }),
             pool.end());
  return pool;
}

TermPtr rewrite_all(const TermPtr& t, const TermPtr& a, const TermPtr& b) {
  if (term_equal(t, a)) return b;
  if (t->tag != TermTag::Func) return t;
  std::vector<TermPtr> args;
  bool changed = false;
  for (const auto& x : t->args) {
    auto nx = rewrite_all(x, a, b);
    changed = changed || nx.get() != x.get();
    args.push_back(std::move(nx));
  }
  if (!changed) return t;
  return mk_func(t->sig, t->func, std::move(args));
}

FormulaPtr rewrite_all(const FormulaPtr& f, const TermPtr& a, const TermPtr& b) {
  std::vector<TermPtr> terms;
  std::vector<FormulaPtr> subs;
  bool changed = false;
  for (const auto& t : f->terms) {
    auto nt = rewrite_all(t, a, b);
    changed = changed || nt.get() != t.get();
    terms.push_back(std::move(nt));
  }
  for (const auto& s : f->subs) {
    auto ns = rewrite_all(s, a, b);
    changed = changed || ns.get() != s.get();
    subs.push_back(std::move(ns));
  }
  if (!changed) return f;
  auto g = std::make_shared<Formula>(*f);
  g->terms = std::move(terms);
  g->subs = std::move(subs);
  return g;
}

bool is_eq_shape(const FormulaPtr& f) {
  return f->tag == FTag::Atom && f->sig->eq_rel() >= 0 && f->rel == f->sig->eq_rel();
}

struct Enumerator {
  const Theory& T;
  size_t k;
  size_t budget;
  std::vector<TermPtr> pool;
  std::vector<FormulaPtr> axioms;
  std::vector<Step> script;
  size_t used = 0;
  std::vector<Proof> out;

  Enumerator(const Theory& t, size_t kk, size_t b) : T(t), k(kk), budget(b) {
    axioms = axioms_of(T, k);
    pool = term_pool(T, k, budget);
  }

  static size_t cost(const Step& s) { return 1 + node_count(s.formula); }

  void emit() {
    Proof p;
    p.steps = script;
    p.conclusion = script.back().formula;
    for (const auto& s : script)
      if (s.rule == Rule::Axiom) p.premises_used.push_back(s.arg);
    std::sort(p.premises_used.begin(), p.premises_used.end());
    p.premises_used.erase(std::unique(p.premises_used.begin(), p.premises_used.end()),
                          p.premises_used.end());
    if (check_proof(p, T, k).ok) out.push_back(std::move(p));
  }

  void push_and_recurse(Step s) {
    size_t c = cost(s);
    if (used + c > budget) return;
    script.push_back(std::move(s));
    used += c;
    emit();
    extend();
    used -= c;
    script.pop_back();
  }

  // Candidate moves in frozen order; each concrete candidate is distinct, so no
  // script is generated twice.
  void extend() {
    auto eq_sig = T.sig();
    for (size_t j = 0; j < k; ++j) {
      Step s = mk_axiom_step(T, j);
      push_and_recurse(std::move(s));
    }
    if (eq_sig->eq_rel() >= 0) {
      for (const auto& t : pool)
        push_and_recurse(mk_step(Rule::EqRefl, {}, mk_atom(eq_sig, eq_sig->eq_rel(), {t, t})));
    }
    for (size_t r = 0; r < script.size(); ++r) {
      const auto& f = script[r].formula;
      if (is_eq_shape(f))
        push_and_recurse(mk_step(Rule::EqSym, {r},
                                 mk_atom(f->sig, f->rel, {f->terms[1], f->terms[0]})));
      if (f->tag == FTag::And) {
        push_and_recurse(mk_step(Rule::AndElim1, {r}, f->subs[0]));
        push_and_recurse(mk_step(Rule::AndElim2, {r}, f->subs[1]));
      }
      if (f->tag == FTag::Forall) {
        for (const auto& t : pool)
          push_and_recurse(mk_step(Rule::ForallElim, {r}, open_body(f->subs[0], t)));
      }
    }
    for (size_t r1 = 0; r1 < script.size(); ++r1) {
      for (size_t r2 = 0; r2 < script.size(); ++r2) {
        const auto& a = script[r1].formula;
        const auto& b = script[r2].formula;
        push_and_recurse(mk_step(Rule::AndIntro, {r1, r2}, mk_and(a, b)));
        if (a->tag == FTag::Implies && formula_equal(a->subs[0], b))
          push_and_recurse(mk_step(Rule::ImplElim, {r1, r2}, a->subs[1]));
        if (is_eq_shape(a)) {
          auto target = rewrite_all(b, a->terms[0], a->terms[1]);
          if (!formula_equal(target, b))
            push_and_recurse(mk_step(Rule::EqSubst, {r1, r2}, target));
        }
      }
    }
  }

  std::vector<Proof> run() {
    extend();
    std::sort(out.begin(), out.end(), [](const Proof& a, const Proof& b) {
      return godel_encode(a).value < godel_encode(b).value;
    });
    return std::move(out);
  }
};

}  // namespace

std::vector<Proof> enumerate_proofs(const Theory& T, size_t k, size_t size_budget) {
  if (size_budget < 1) throw SemanticError("enumerate_proofs: size budget must be positive");
  return Enumerator(T, k, size_budget).run();
}

std::optional<Proof> is_provable_within(const Theory& T, size_t k, const FormulaPtr& goal,
                                        size_t size_budget) {
  if (!is_closed(goal)) throw SemanticError("is_provable_within: goal must be a sentence");
  // any proof of the goal ends with a step holding the goal itself
  if (size_budget < 1 + node_count(goal)) return std::nullopt;

  auto finish = [&](Proof p) -> std::optional<Proof> {
    for (const auto& s : p.steps)
      if (s.rule == Rule::Axiom) p.premises_used.push_back(s.arg);
    std::sort(p.premises_used.begin(), p.premises_used.end());
    p.premises_used.erase(std::unique(p.premises_used.begin(), p.premises_used.end()),
                          p.premises_used.end());
    p.conclusion = p.steps.back().formula;
    if (proof_size(p) > size_budget) return std::nullopt;
    if (!check_proof(p, T, k).ok) return std::nullopt;
    return p;
  };

  for (size_t j = 0; j < k; ++j) {
    if (formula_equal(T.axiom(j), goal)) {
      Proof p;
      p.steps.push_back(mk_axiom_step(T, j));
      if (auto r = finish(std::move(p))) return r;
    }
  }
  if (is_eq_shape(goal) && term_equal(goal->terms[0], goal->terms[1])) {
    Proof p;
    p.steps.push_back(mk_step(Rule::EqRefl, {}, goal));
    if (auto r = finish(std::move(p))) return r;
  }
  if (goal->tag == FTag::Forall) {
    auto inst = open_body(goal->subs[0], mk_fvar(goal->sig, "v0"));
    if (is_eq_shape(inst) && term_equal(inst->terms[0], inst->terms[1])) {
      Proof p;
      p.steps.push_back(mk_step(Rule::EqRefl, {}, inst));
      p.steps.push_back(mk_step(Rule::ForallIntro, {0}, goal));
      if (auto r = finish(std::move(p))) return r;
    }
  }
  for (auto& p : enumerate_proofs(T, k, size_budget))
    if (formula_equal(p.conclusion, goal)) return p;
  return std::nullopt;
}

}  // namespace logiclab
