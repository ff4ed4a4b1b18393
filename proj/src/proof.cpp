#include "logiclab/proof.hpp"

#include <algorithm>
#include <set>

namespace logiclab {

namespace {

const char* kRuleNames[] = {
    "axiom",        "assume",       "impl_intro",   "impl_elim",  "and_intro",
    "and_elim1",    "and_elim2",    "or_intro1",    "or_intro2",  "or_elim",
    "neg_intro",    "neg_elim",     "raa",          "forall_intro", "forall_elim",
    "exists_intro", "exists_elim",  "eq_refl",      "eq_sym",     "eq_subst",
};
constexpr size_t kRuleCount = sizeof(kRuleNames) / sizeof(kRuleNames[0]);

bool term_has_bvar(const TermPtr& t) {
  if (t->tag == TermTag::BVar) return true;
  for (const auto& a : t->args)
    if (term_has_bvar(a)) return true;
  return false;
}

// psi obtained from phi by replacing some occurrences of a with b. a and b must
// be binder-closed so occurrences look the same at every depth.
bool rewrite_term(const TermPtr& s, const TermPtr& t, const TermPtr& a, const TermPtr& b) {
  if (term_equal(s, t)) return true;
  if (term_equal(s, a) && term_equal(t, b)) return true;
  if (s->tag != TermTag::Func || t->tag != TermTag::Func || s->func != t->func) return false;
  for (size_t i = 0; i < s->args.size(); ++i)
    if (!rewrite_term(s->args[i], t->args[i], a, b)) return false;
  return true;
}

bool rewrite_formula(const FormulaPtr& f, const FormulaPtr& g, const TermPtr& a,
                     const TermPtr& b) {
  if (f->tag != g->tag || f->rel != g->rel) return false;
  if (f->terms.size() != g->terms.size() || f->subs.size() != g->subs.size()) return false;
  for (size_t i = 0; i < f->terms.size(); ++i)
    if (!rewrite_term(f->terms[i], g->terms[i], a, b)) return false;
  for (size_t i = 0; i < f->subs.size(); ++i)
    if (!rewrite_formula(f->subs[i], g->subs[i], a, b)) return false;
  return true;
}

bool is_eq_atom(const FormulaPtr& f) {
  return f->tag == FTag::Atom && f->sig->eq_rel() >= 0 && f->rel == f->sig->eq_rel();
}

struct Checker {
  const Proof& p;
  const Theory& T;
  size_t k;
  // per step: indices of assume steps still undischarged
  std::vector<std::set<size_t>> deps;
  CheckResult res;

  Checker(const Proof& pp, const Theory& tt, size_t kk) : p(pp), T(tt), k(kk) {}

  bool bad(size_t i, const std::string& why) {
    res = {false, RejectReason::BadRule, i, why};
    return false;
  }

  const FormulaPtr& fml(size_t i) const { return p.steps[i].formula; }

  std::set<size_t> merged(std::initializer_list<size_t> refs) const {
    std::set<size_t> out;
    for (size_t r : refs) out.insert(deps[r].begin(), deps[r].end());
    return out;
  }

  // remove open assumptions whose formula equals a
  static void discharge(std::set<size_t>& open, const Proof& p, const FormulaPtr& a) {
    for (auto it = open.begin(); it != open.end();) {
      if (formula_equal(p.steps[*it].formula, a))
        it = open.erase(it);
      else
        ++it;
    }
  }

  std::set<std::string> open_free_vars(const std::set<size_t>& open, size_t except = SIZE_MAX) {
    std::set<std::string> out;
    for (size_t a : open) {
      if (a == except) continue;
      auto fv = free_vars(p.steps[a].formula);
      out.insert(fv.begin(), fv.end());
    }
    return out;
  }

  bool check_step(size_t i) {
    const Step& s = p.steps[i];
    if (!s.formula) return bad(i, "missing formula");
    if (has_modal(s.formula)) return bad(i, "modal formula in a proof");
    if (!s.formula->sig->compatible(*T.sig())) return bad(i, "signature mismatch");
    for (size_t r : s.refs)
      if (r >= i) return bad(i, "forward reference");
    const auto& f = s.formula;
    const auto& refs = s.refs;
    auto need_refs = [&](size_t n) { return refs.size() == n; };

    switch (s.rule) {
      case Rule::Axiom: {
        if (!need_refs(0)) return bad(i, "axiom cites steps");
        if (s.arg >= k) {
          res = {false, RejectReason::OutOfFragment, i,
                 "axiom index " + std::to_string(s.arg) + " not below fragment " +
                     std::to_string(k)};
          return false;
        }
        if (!formula_equal(f, T.axiom(s.arg))) return bad(i, "cited axiom differs");
        deps[i] = {};
        return true;
      }
      case Rule::Assume:
        if (!need_refs(0)) return bad(i, "assume cites steps");
        deps[i] = {i};
        return true;
      case Rule::ImplIntro: {
        if (!need_refs(1)) return bad(i, "impl_intro needs one ref");
        if (f->tag != FTag::Implies) return bad(i, "conclusion not an implication");
        if (!formula_equal(f->subs[1], fml(refs[0]))) return bad(i, "consequent mismatch");
        deps[i] = deps[refs[0]];
        discharge(deps[i], p, f->subs[0]);
        return true;
      }
      case Rule::ImplElim: {
        if (!need_refs(2)) return bad(i, "impl_elim needs two refs");
        const auto& imp = fml(refs[0]);
        if (imp->tag != FTag::Implies) return bad(i, "first ref not an implication");
        if (!formula_equal(imp->subs[0], fml(refs[1]))) return bad(i, "antecedent mismatch");
        if (!formula_equal(imp->subs[1], f)) return bad(i, "consequent mismatch");
        deps[i] = merged({refs[0], refs[1]});
        return true;
      }
      case Rule::AndIntro: {
        if (!need_refs(2)) return bad(i, "and_intro needs two refs");
        if (f->tag != FTag::And) return bad(i, "conclusion not a conjunction");
        if (!formula_equal(f->subs[0], fml(refs[0])) || !formula_equal(f->subs[1], fml(refs[1])))
          return bad(i, "conjunct mismatch");
        deps[i] = merged({refs[0], refs[1]});
        return true;
      }
      case Rule::AndElim1:
      case Rule::AndElim2: {
        if (!need_refs(1)) return bad(i, "and_elim needs one ref");
        const auto& c = fml(refs[0]);
        if (c->tag != FTag::And) return bad(i, "ref not a conjunction");
        const auto& part = c->subs[s.rule == Rule::AndElim1 ? 0 : 1];
        if (!formula_equal(part, f)) return bad(i, "component mismatch");
        deps[i] = deps[refs[0]];
        return true;
      }
      case Rule::OrIntro1:
      case Rule::OrIntro2: {
        if (!need_refs(1)) return bad(i, "or_intro needs one ref");
        if (f->tag != FTag::Or) return bad(i, "conclusion not a disjunction");
        const auto& part = f->subs[s.rule == Rule::OrIntro1 ? 0 : 1];
        if (!formula_equal(part, fml(refs[0]))) return bad(i, "disjunct mismatch");
        deps[i] = deps[refs[0]];
        return true;
      }
      case Rule::OrElim: {
        if (!need_refs(3)) return bad(i, "or_elim needs three refs");
        const auto& d = fml(refs[0]);
        if (d->tag != FTag::Or) return bad(i, "first ref not a disjunction");
        if (!formula_equal(fml(refs[1]), f) || !formula_equal(fml(refs[2]), f))
          return bad(i, "case conclusions differ");
        auto left = deps[refs[1]];
        discharge(left, p, d->subs[0]);
        auto right = deps[refs[2]];
        discharge(right, p, d->subs[1]);
        deps[i] = deps[refs[0]];
        deps[i].insert(left.begin(), left.end());
        deps[i].insert(right.begin(), right.end());
        return true;
      }
      case Rule::NegIntro:
      case Rule::Raa: {
        if (!need_refs(2)) return bad(i, "needs two refs");
        if (!formula_equal(fml(refs[1]), mk_neg(fml(refs[0]))))
          return bad(i, "refs are not a contradictory pair");
        FormulaPtr discharged;
        if (s.rule == Rule::NegIntro) {
          if (f->tag != FTag::Neg) return bad(i, "conclusion not a negation");
          discharged = f->subs[0];
        } else {
          discharged = mk_neg(f);
        }
        deps[i] = merged({refs[0], refs[1]});
        discharge(deps[i], p, discharged);
        return true;
      }
      case Rule::NegElim: {
        if (!need_refs(2)) return bad(i, "neg_elim needs two refs");
        if (!formula_equal(fml(refs[1]), mk_neg(fml(refs[0]))))
          return bad(i, "refs are not a contradictory pair");
        deps[i] = merged({refs[0], refs[1]});
        return true;
      }
      case Rule::ForallIntro: {
        if (!need_refs(1)) return bad(i, "forall_intro needs one ref");
        if (f->tag != FTag::Forall) return bad(i, "conclusion not universal");
        auto w = match_open(f->subs[0], fml(refs[0]));
        if (!w) return bad(i, "ref is not an instance of the body");
        deps[i] = deps[refs[0]];
        if ((*w)->tag == TermTag::FVar && (*w)->fvar == "_any") return true;  // vacuous
        if ((*w)->tag != TermTag::FVar) return bad(i, "eigenvariable is not a variable");
        const std::string& v = (*w)->fvar;
        if (free_vars(f).count(v)) return bad(i, "eigenvariable free in the conclusion");
        auto hyp = open_free_vars(deps[refs[0]]);
        if (hyp.count(v)) return bad(i, "eigenvariable free in an open assumption");
        return true;
      }
      case Rule::ForallElim: {
        if (!need_refs(1)) return bad(i, "forall_elim needs one ref");
        const auto& u = fml(refs[0]);
        if (u->tag != FTag::Forall) return bad(i, "ref not universal");
        if (!match_open(u->subs[0], f)) return bad(i, "conclusion not an instance");
        deps[i] = deps[refs[0]];
        return true;
      }
      case Rule::ExistsIntro: {
        if (!need_refs(1)) return bad(i, "exists_intro needs one ref");
        if (f->tag != FTag::Exists) return bad(i, "conclusion not existential");
        if (!match_open(f->subs[0], fml(refs[0]))) return bad(i, "ref not an instance");
        deps[i] = deps[refs[0]];
        return true;
      }
      case Rule::ExistsElim: {
        if (!need_refs(2)) return bad(i, "exists_elim needs two refs");
        const auto& e = fml(refs[0]);
        if (e->tag != FTag::Exists) return bad(i, "first ref not existential");
        const auto& c = f;
        if (!formula_equal(fml(refs[1]), c)) return bad(i, "conclusion mismatch with case");
        // find the case assumption: an open instance of the body at a fresh variable
        for (size_t a : deps[refs[1]]) {
          auto w = match_open(e->subs[0], p.steps[a].formula);
          if (!w) continue;
          bool vacuous = (*w)->tag == TermTag::FVar && (*w)->fvar == "_any";
          std::string v = (*w)->tag == TermTag::FVar ? (*w)->fvar : "";
          if (!vacuous) {
            if ((*w)->tag != TermTag::FVar) continue;
            if (free_vars(c).count(v) || free_vars(e).count(v)) continue;
            bool clash = false;
            for (size_t o : deps[refs[1]]) {
              if (formula_equal(p.steps[o].formula, p.steps[a].formula)) continue;
              if (free_vars(p.steps[o].formula).count(v)) {
                clash = true;
                break;
              }
            }
            if (clash) continue;
          }
          deps[i] = merged({refs[0], refs[1]});
          discharge(deps[i], p, p.steps[a].formula);
          return true;
        }
        return bad(i, "no dischargeable case assumption");
      }
      case Rule::EqRefl: {
        if (!need_refs(0)) return bad(i, "eq_refl cites steps");
        if (!is_eq_atom(f) || !term_equal(f->terms[0], f->terms[1]))
          return bad(i, "not a reflexive equation");
        deps[i] = {};
        return true;
      }
      case Rule::EqSym: {
        if (!need_refs(1)) return bad(i, "eq_sym needs one ref");
        const auto& e = fml(refs[0]);
        if (!is_eq_atom(e) || !is_eq_atom(f)) return bad(i, "not equations");
        if (!term_equal(e->terms[0], f->terms[1]) || !term_equal(e->terms[1], f->terms[0]))
          return bad(i, "not the symmetric equation");
        deps[i] = deps[refs[0]];
        return true;
      }
      case Rule::EqSubst: {
        if (!need_refs(2)) return bad(i, "eq_subst needs two refs");
        const auto& e = fml(refs[0]);
        if (!is_eq_atom(e)) return bad(i, "first ref not an equation");
        const auto& a = e->terms[0];
        const auto& b = e->terms[1];
        if (term_has_bvar(a) || term_has_bvar(b))
          return bad(i, "substituted terms must be binder-closed");
        if (!rewrite_formula(fml(refs[1]), f, a, b))
          return bad(i, "conclusion is not a rewrite of the ref");
        deps[i] = merged({refs[0], refs[1]});
        return true;
      }
    }
    return bad(i, "unknown rule");
  }

  CheckResult run() {
    if (p.steps.empty())
      return {false, RejectReason::ConclusionMismatch, 0, "proof has no steps"};
    deps.resize(p.steps.size());
    for (size_t i = 0; i < p.steps.size(); ++i)
      if (!check_step(i)) return res;

    std::vector<size_t> cited;
    for (const auto& s : p.steps)
      if (s.rule == Rule::Axiom) cited.push_back(s.arg);
    std::sort(cited.begin(), cited.end());
    cited.erase(std::unique(cited.begin(), cited.end()), cited.end());
    if (cited != p.premises_used)
      return {false, RejectReason::ConclusionMismatch, 0, "premise list differs from citations"};

    if (!p.conclusion || !formula_equal(p.steps.back().formula, p.conclusion))
      return {false, RejectReason::ConclusionMismatch, 0, "final step is not the conclusion"};
    if (!deps.back().empty())
      return {false, RejectReason::ConclusionMismatch, 0, "conclusion carries open assumptions"};
    return {true, RejectReason::None, 0, ""};
  }
};

}  // namespace

const char* rule_name(Rule r) { return kRuleNames[static_cast<size_t>(r)]; }

Rule rule_from_name(const std::string& name) {
  for (size_t i = 0; i < kRuleCount; ++i)
    if (name == kRuleNames[i]) return static_cast<Rule>(i);
  throw CodingError("unknown proof rule " + name);
}

CheckResult check_proof(const Proof& p, const Theory& T, size_t k) {
  return Checker(p, T, k).run();
}

size_t proof_size(const Proof& p) {
  size_t n = 0;
  for (const auto& s : p.steps) n += 1 + node_count(s.formula);
  return n;
}

nlohmann::json proof_to_json(const Proof& p) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : p.steps) {
    nlohmann::json j{{"rule", rule_name(s.rule)}, {"refs", s.refs}, {"formula", render(s.formula)}};
    if (s.rule == Rule::Axiom) j["arg"] = s.arg;
    steps.push_back(std::move(j));
  }
  return nlohmann::json{{"conclusion", render(p.conclusion)},
                        {"premises", p.premises_used},
                        {"steps", std::move(steps)}};
}

Proof proof_from_json(SigPtr sig, const nlohmann::json& j) {
  Proof p;
  p.conclusion = parse_formula(sig, j.at("conclusion").get<std::string>());
  p.premises_used = j.at("premises").get<std::vector<size_t>>();
  for (const auto& js : j.at("steps")) {
    Step s;
    s.rule = rule_from_name(js.at("rule").get<std::string>());
    s.refs = js.at("refs").get<std::vector<size_t>>();
    s.arg = js.value("arg", size_t{0});
    s.formula = parse_formula(sig, js.at("formula").get<std::string>());
    p.steps.push_back(std::move(s));
  }
  return p;
}

GodelCode godel_encode(const Proof& p) {
  std::vector<Nat> toks{static_cast<unsigned long>(CodeKind::Proof)};
  toks.push_back(p.premises_used.size());
  for (size_t x : p.premises_used) toks.push_back(x);
  toks.push_back(p.steps.size());
  for (const auto& s : p.steps) {
    toks.push_back(static_cast<unsigned long>(s.rule));
    toks.push_back(s.arg);
    toks.push_back(s.refs.size());
    for (size_t r : s.refs) toks.push_back(r);
    formula_tokens(s.formula, toks);
  }
  return {tokens_to_stream(toks), CodeKind::Proof};
}

Proof godel_decode_proof(SigPtr sig, const Nat& value) {
  auto toks = stream_to_tokens(value);
  size_t at = 0;
  auto next = [&]() -> const Nat& {
    if (at >= toks.size()) throw CodingError("proof decode: truncated");
    return toks[at++];
  };
  if (toks.empty() || toks[0] != static_cast<unsigned long>(CodeKind::Proof))
    throw CodingError("decode: not a proof code");
  ++at;
  Proof p;
  size_t np = to_u64(next());
  for (size_t i = 0; i < np; ++i) p.premises_used.push_back(to_u64(next()));
  size_t ns = to_u64(next());
  for (size_t i = 0; i < ns; ++i) {
    Step s;
    size_t rule = to_u64(next());
    if (rule >= kRuleCount) throw CodingError("proof decode: bad rule tag");
    s.rule = static_cast<Rule>(rule);
    s.arg = to_u64(next());
    size_t nr = to_u64(next());
    for (size_t r = 0; r < nr; ++r) s.refs.push_back(to_u64(next()));
    s.formula = formula_from_tokens(sig, toks, at);
    p.steps.push_back(std::move(s));
  }
  if (at != toks.size()) throw CodingError("proof decode: trailing tokens");
  if (p.steps.empty()) throw CodingError("proof decode: no steps");
  p.conclusion = p.steps.back().formula;
  return p;
}

Step mk_axiom_step(const Theory& T, size_t index) {
  Step s;
  s.rule = Rule::Axiom;
  s.arg = index;
  s.formula = T.axiom(index);
  return s;
}

Step mk_step(Rule r, std::vector<size_t> refs, FormulaPtr formula) {
  Step s;
  s.rule = r;
  s.refs = std::move(refs);
  s.formula = std::move(formula);
  return s;
}

}  // namespace logiclab
