#include "logiclab/synth.hpp"

#include <set>
#include <string>
#include <vector>

namespace logiclab {

namespace {

constexpr uint64_t kMaxShellDepth = 12;

const char* variant_name(ProcessVariant v) {
  switch (v) {
    case ProcessVariant::A: return "A";
    case ProcessVariant::B: return "B";
    case ProcessVariant::C: return "C";
  }
  return "?";
}

// Role relations. The first slot of each is the process's own description
// code; the atoms are judged by the surrounding theory, never evaluated here.
SigPtr process_signature(const Theory& T, uint64_t m) {
  std::vector<RelSym> rels = {{"Layer", 2},
                              {"Reflects", static_cast<int>(m) + 1},
                              {"Covered", 2},
                              {"Admit", 5},
                              {"AdmitCut", 3},
                              {"AdmitVal", 4},
                              {"Descends", 3},
                              {"Capped", 2},
                              {"TreeRank", 3}};
  try {
    // stage and value constants instantiate the free variables when the
    // diagonal certificate needs a one-variable template
    return T.sig()->extend(T.sig()->name() + "+process",
                           {{"stagec", 0}, {"valc", 0}}, std::move(rels));
  } catch (const SemanticError&) {
    throw SemanticError(
        "process: theory signature clashes with the role relations");
  }
}

struct Builder {
  SigPtr s;
  uint64_t m;

  TermPtr var(const std::string& name) const { return mk_fvar(s, name); }
  FormulaPtr atom(const std::string& rel, std::vector<TermPtr> args) const {
    return mk_atom(s, rel, std::move(args));
  }

  // v collects exactly the layers below the cut d
  FormulaPtr layering() const {
    return mk_forall("u", mk_iff(atom("in", {var("u"), var("v")}),
                                 atom("Layer", {var("u"), var("d")})));
  }

  // depth-m alternating shell, universal lead, every witness in the matrix
  FormulaPtr reflection_shell() const {
    std::vector<TermPtr> args = {var("v")};
    for (uint64_t i = 1; i <= m; ++i)
      args.push_back(var("w" + std::to_string(i)));
    FormulaPtr f = atom("Reflects", std::move(args));
    for (uint64_t i = m; i >= 1; --i) {
      const std::string w = "w" + std::to_string(i);
      f = i % 2 == 1 ? mk_forall(w, f) : mk_exists(w, f);
    }
    return f;
  }

  FormulaPtr no_cover() const {
    return mk_forall("w", mk_neg(atom("Covered", {var("v"), var("w")})));
  }

  FormulaPtr pool_hit() const {
    return atom("Admit", {var("v"), var("d"), var("a"), var("f"), var("n")});
  }

  // lexically least triple in the stage's pool: no lower cut, no lower value
  // at this cut, no lower fragment index at this cut and value
  FormulaPtr minimality() const {
    FormulaPtr no_cut = mk_bforall(
        "e", var("d"), mk_neg(atom("AdmitCut", {var("v"), var("e"), var("n")})));
    FormulaPtr no_val = mk_bforall(
        "b", var("a"),
        mk_neg(atom("AdmitVal", {var("v"), var("d"), var("b"), var("n")})));
    FormulaPtr no_frag = mk_bforall(
        "g", var("f"),
        mk_neg(atom("Admit",
                    {var("v"), var("d"), var("a"), var("g"), var("n")})));
    return mk_and(no_cut, mk_and(no_val, no_frag));
  }

  FormulaPtr descent() const {
    return atom("Descends", {var("v"), var("f"), var("n")});
  }

  FormulaPtr capped_marker() const {
    return atom("Capped", {var("v"), var("n")});
  }

  FormulaPtr rank_slot() const {
    return atom("TreeRank", {var("v"), var("a"), var("n")});
  }

  // once a capped stage has happened, only capped stages follow; the ranked
  // disjunct therefore forbids any earlier capped stage
  FormulaPtr capped_history_guard() const {
    return mk_bforall("j", var("n"),
                      mk_neg(atom("Capped", {var("v"), var("j")})));
  }

  FormulaPtr core(FormulaPtr extra) const {
    FormulaPtr body = layering();
    body = mk_and(body, reflection_shell());
    body = mk_and(body, no_cover());
    if (extra) body = mk_and(body, std::move(extra));
    body = mk_and(body, pool_hit());
    body = mk_and(body, minimality());
    body = mk_and(body, descent());
    return mk_exists("d", mk_exists("f", body));
  }
};

}  // namespace

std::map<std::string, std::string> ProcessFormulaSpec::default_roles() {
  return {{"cut", "rank cut of the candidate segment"},
          {"placed", "value the stage places onto the sequence"},
          {"descent", "strictly decreasing fragment index"},
          {"obstruction_rank", "order rank of the obstruction tree, symbolic only"}};
}

nlohmann::json ProcessSynthesis::to_json() const {
  return nlohmann::json{
      {"which", variant_name(which)},
      {"shell_depth", shell_depth},
      {"formula", render(formula)},
      {"rank_slot", rank_slot ? nlohmann::json(render(rank_slot))
                              : nlohmann::json(nullptr)},
      {"complexity", complexity.str()},
      {"roles", roles},
      {"certificate", certificate.to_json()}};
}

ProcessSynthesis synthesize_process_formula(const ProcessFormulaSpec& spec,
                                            ProcessVariant which) {
  if (spec.m == 0)
    throw SemanticError(
        "process: shell depth 0 is delegated to the plain universal sequence "
        "builder");
  if (spec.m > kMaxShellDepth)
    throw SemanticError("process: shell depth out of range");
  for (const char* key : {"cut", "placed", "descent", "obstruction_rank"})
    if (!spec.roles.count(key))
      throw SemanticError(
          "process: role table must describe cut, placed, descent and "
          "obstruction_rank");

  const Builder b{process_signature(spec.theory, spec.m), spec.m};

  FormulaPtr open;
  switch (which) {
    case ProcessVariant::A:
      open = mk_and(b.capped_marker(), b.core(nullptr));
      break;
    case ProcessVariant::B:
      open = b.core(b.rank_slot());
      break;
    case ProcessVariant::C:
      open = mk_or(mk_and(b.capped_marker(), b.core(nullptr)),
                   mk_and(mk_neg(b.capped_marker()),
                          mk_and(b.core(b.rank_slot()),
                                 b.capped_history_guard())));
      break;
  }
  if (free_vars(open) != std::set<std::string>{"a", "n", "v"})
    throw SemanticError("process: synthesis produced stray free variables");

  // one-variable instance for the diagonal: freeze the stage and the value
  FormulaPtr instance =
      subst_fvar(subst_fvar(open, "n", mk_func(b.s, "stagec", {})), "a",
                 mk_func(b.s, "valc", {}));
  const Theory base = finite_theory(spec.theory.name() + "+process", b.s, {});
  FixedPointCertificate cert = godel_carnap_fixed_point(instance, base);

  // the open formula speaks about its own description via the certificate's
  // naming constant
  const SigPtr cert_sig = cert.theory->sig();
  FormulaPtr lifted = parse_formula(cert_sig, render(open));
  FormulaPtr psi = subst_fvar(lifted, "v", mk_func(cert_sig, "c", {}));

  ProcessSynthesis out;
  out.which = which;
  out.shell_depth = spec.m;
  out.formula = psi;
  if (which != ProcessVariant::A)
    out.rank_slot = subst_fvar(parse_formula(cert_sig, render(b.rank_slot())),
                               "v", mk_func(cert_sig, "c", {}));
  out.complexity = classify(psi);
  out.certificate = std::move(cert);
  out.roles = spec.roles;
  if (out.complexity != sigma_class(static_cast<int>(spec.m) + 1))
    throw SemanticError("process: synthesis drifted off its complexity level");
  return out;
}

}  // namespace logiclab
