#include "logiclab/classify.hpp"

#include <map>

namespace logiclab {

std::string ComplexityClass::str() const {
  switch (kind) {
    case CKind::Delta0: return "Delta0";
    case CKind::Sigma: return "Sigma " + std::to_string(level);
    case CKind::Pi: return "Pi " + std::to_string(level);
  }
  return "?";
}

ComplexityClass sigma_class(int level) { return {level == 0 ? CKind::Delta0 : CKind::Sigma, level}; }
ComplexityClass pi_class(int level) { return {level == 0 ? CKind::Delta0 : CKind::Pi, level}; }

namespace {

struct Binder {
  bool universal;
  std::string hint;
};

// Prenex working form: formula == Q(prefix[0]) ... Q(prefix[n-1]) . matrix, prefix
// outermost first; matrix de Bruijn index (j + local depth) with j < n refers to
// prefix[n-1-j]; larger indices pass through to enclosing binders.
struct PForm {
  std::vector<Binder> prefix;
  FormulaPtr matrix;
};

std::vector<Binder> dual(std::vector<Binder> p) {
  for (auto& b : p) b.universal = !b.universal;
  return p;
}

// Remap matrix indices after its prefix positions moved. `map` sends old
// prefix-relative index (innermost-first) to new; indices >= map.size() shift by
// `outer_shift` (the number of foreign binders inserted below the enclosing scope).
TermPtr remap_term(const TermPtr& t, int depth, const std::vector<int>& map, int outer_shift) {
  switch (t->tag) {
    case TermTag::BVar: {
      int i = t->bvar;
      if (i < depth) return t;
      int j = i - depth;
      int nj = j < static_cast<int>(map.size()) ? map[j] : j + outer_shift;
      if (nj == j) return t;
      return mk_bvar(t->sig, nj + depth);
    }
    case TermTag::FVar:
      return t;
    case TermTag::Func: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (const auto& a : t->args) {
        auto na = remap_term(a, depth, map, outer_shift);
        changed = changed || na.get() != a.get();
        args.push_back(std::move(na));
      }
      if (!changed) return t;
      return mk_func(t->sig, t->func, std::move(args));
    }
  }
  return t;
}

FormulaPtr remap_formula(const FormulaPtr& f, int depth, const std::vector<int>& map,
                         int outer_shift) {
  bool binder = f->tag == FTag::Forall || f->tag == FTag::Exists || f->tag == FTag::BForall ||
                f->tag == FTag::BExists;
  std::vector<TermPtr> terms;
  terms.reserve(f->terms.size());
  bool changed = false;
  for (const auto& t : f->terms) {
    auto nt = remap_term(t, depth, map, outer_shift);
    changed = changed || nt.get() != t.get();
    terms.push_back(std::move(nt));
  }
  std::vector<FormulaPtr> subs;
  subs.reserve(f->subs.size());
  for (const auto& s : f->subs) {
    auto ns = remap_formula(s, depth + (binder ? 1 : 0), map, outer_shift);
    changed = changed || ns.get() != s.get();
    subs.push_back(std::move(ns));
  }
  if (!changed) return f;
  auto g = std::make_shared<Formula>(*f);
  g->terms = std::move(terms);
  g->subs = std::move(subs);
  return g;
}

// Interleave two prefixes preserving order, minimizing polarity blocks. Deterministic
// tie-breaking: continue the current polarity, then prefer the left operand.
struct MergeResult {
  std::vector<Binder> prefix;
  std::vector<int> map_a;  // innermost-first old index -> new index
  std::vector<int> map_b;
};

MergeResult merge_prefixes(const std::vector<Binder>& a, const std::vector<Binder>& b) {
  size_t n = a.size(), m = b.size();
  // last: 0 none, 1 universal, 2 existential
  struct Cell {
    int cost = -1;
    int move = -1;  // 0 take a, 1 take b
  };
  std::vector<Cell> dp((n + 1) * (m + 1) * 3);
  auto at = [&](size_t i, size_t j, int last) -> Cell& { return dp[(i * (m + 1) + j) * 3 + last]; };
  // Fill backwards from (n, m).
  for (size_t i = n + 1; i-- > 0;) {
    for (size_t j = m + 1; j-- > 0;) {
      for (int last = 0; last < 3; ++last) {
        Cell& c = at(i, j, last);
        if (i == n && j == m) {
          c.cost = 0;
          continue;
        }
        c.cost = -1;
        auto consider = [&](int move, bool universal) {
          int pol = universal ? 1 : 2;
          size_t ni = i + (move == 0 ? 1 : 0);
          size_t nj = j + (move == 1 ? 1 : 0);
          int sub = at(ni, nj, pol).cost;
          int cost = sub + (pol == last ? 0 : 1);
          bool better = c.cost < 0 || cost < c.cost;
          if (!better && cost == c.cost) {
            // On equal cost keep blocks coalesced; the left operand was considered
            // first, so a full tie keeps it.
            int cur_pol = c.move == 0 ? (a[i].universal ? 1 : 2) : (b[j].universal ? 1 : 2);
            better = pol == last && cur_pol != last;
          }
          if (better) {
            c.cost = cost;
            c.move = move;
          }
        };
        if (i < n) consider(0, a[i].universal);
        if (j < m) consider(1, b[j].universal);
      }
    }
  }
  MergeResult out;
  out.map_a.assign(n, 0);
  out.map_b.assign(m, 0);
  size_t i = 0, j = 0;
  int last = 0;
  std::vector<int> pos_a(n), pos_b(m);  // outermost-first position in merged prefix
  while (i < n || j < m) {
    const Cell& c = at(i, j, last);
    if (c.move == 0) {
      pos_a[i] = static_cast<int>(out.prefix.size());
      out.prefix.push_back(a[i]);
      last = a[i].universal ? 1 : 2;
      ++i;
    } else {
      pos_b[j] = static_cast<int>(out.prefix.size());
      out.prefix.push_back(b[j]);
      last = b[j].universal ? 1 : 2;
      ++j;
    }
  }
  int total = static_cast<int>(out.prefix.size());
  for (size_t k = 0; k < n; ++k)
    out.map_a[n - 1 - k] = total - 1 - pos_a[k];  // innermost-first views
  for (size_t k = 0; k < m; ++k) out.map_b[m - 1 - k] = total - 1 - pos_b[k];
  return out;
}

FormulaPtr nest(const PForm& p) {
  FormulaPtr f = p.matrix;
  for (size_t i = p.prefix.size(); i-- > 0;) {
    const Binder& b = p.prefix[i];
    f = b.universal ? mk_forall_raw(f, b.hint) : mk_exists_raw(f, b.hint);
  }
  return f;
}

PForm prenex_rec(const FormulaPtr& f);

FormulaPtr prenex_full(const FormulaPtr& f) { return nest(prenex_rec(f)); }

PForm combine(FTag tag, const FormulaPtr& node, PForm a, PForm b, bool dual_a) {
  if (dual_a) a.prefix = dual(std::move(a.prefix));
  MergeResult mr = merge_prefixes(a.prefix, b.prefix);
  int grow_a = static_cast<int>(mr.prefix.size() - a.prefix.size());
  int grow_b = static_cast<int>(mr.prefix.size() - b.prefix.size());
  FormulaPtr ma = remap_formula(a.matrix, 0, mr.map_a, grow_a);
  FormulaPtr mb = remap_formula(b.matrix, 0, mr.map_b, grow_b);
  auto g = std::make_shared<Formula>(*node);
  g->tag = tag;
  g->subs = {std::move(ma), std::move(mb)};
  return {std::move(mr.prefix), std::move(g)};
}

PForm prenex_rec(const FormulaPtr& f) {
  switch (f->tag) {
    case FTag::Atom:
      return {{}, f};
    case FTag::Neg: {
      PForm p = prenex_rec(f->subs[0]);
      return {dual(std::move(p.prefix)), mk_neg(p.matrix)};
    }
    case FTag::And:
    case FTag::Or:
      return combine(f->tag, f, prenex_rec(f->subs[0]), prenex_rec(f->subs[1]), false);
    case FTag::Implies:
      return combine(f->tag, f, prenex_rec(f->subs[0]), prenex_rec(f->subs[1]), true);
    case FTag::Forall:
    case FTag::Exists: {
      PForm p = prenex_rec(f->subs[0]);
      std::vector<Binder> prefix;
      prefix.push_back({f->tag == FTag::Forall, f->binder_hint});
      prefix.insert(prefix.end(), p.prefix.begin(), p.prefix.end());
      return {std::move(prefix), p.matrix};
    }
    case FTag::BForall:
    case FTag::BExists: {
      auto g = std::make_shared<Formula>(*f);
      g->subs = {prenex_full(f->subs[0])};
      return {{}, std::move(g)};
    }
    case FTag::Box:
    case FTag::Dia:
      throw SemanticError("prenex: modal operators have no prenex form");
  }
  throw SemanticError("prenex: bad node");
}

// ---- classification over prenexed formulas ----

// Alternation pattern: 'A' / 'E' blocks, outermost first. Empty = Delta0.
using Pattern = std::string;

Pattern pat_dual(Pattern p) {
  for (char& c : p) c = c == 'A' ? 'E' : 'A';
  return p;
}

// Fewest-blocks merge of two alternation patterns, left operand preferred on ties.
Pattern pat_join(const Pattern& a, const Pattern& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  size_t n = a.size(), m = b.size();
  // One block per pattern element; reuse the DP shape from merge_prefixes.
  std::vector<Binder> ba(n), bb(m);
  for (size_t i = 0; i < n; ++i) ba[i] = {a[i] == 'A', ""};
  for (size_t j = 0; j < m; ++j) bb[j] = {b[j] == 'A', ""};
  MergeResult mr = merge_prefixes(ba, bb);
  Pattern out;
  for (const auto& x : mr.prefix) {
    char c = x.universal ? 'A' : 'E';
    if (out.empty() || out.back() != c) out += c;
  }
  return out;
}

Pattern pat_of(const FormulaPtr& f);

Pattern pat_of_matrix(const FormulaPtr& f) {
  switch (f->tag) {
    case FTag::Atom:
      return {};
    case FTag::Neg:
      return pat_dual(pat_of_matrix(f->subs[0]));
    case FTag::And:
    case FTag::Or:
      return pat_join(pat_of_matrix(f->subs[0]), pat_of_matrix(f->subs[1]));
    case FTag::Implies:
      return pat_join(pat_dual(pat_of_matrix(f->subs[0])), pat_of_matrix(f->subs[1]));
    case FTag::BForall:
    case FTag::BExists:
      return pat_of_matrix(f->subs[0]);  // bounded quantifiers are free
    case FTag::Forall: {
      Pattern rest = pat_of_matrix(f->subs[0]);
      if (rest.empty() || rest[0] != 'A') rest.insert(rest.begin(), 'A');
      return rest;
    }
    case FTag::Exists: {
      Pattern rest = pat_of_matrix(f->subs[0]);
      if (rest.empty() || rest[0] != 'E') rest.insert(rest.begin(), 'E');
      return rest;
    }
    case FTag::Box:
    case FTag::Dia:
      throw SemanticError("classify: modal operators are outside the hierarchy");
  }
  throw SemanticError("classify: bad node");
}

Pattern pat_of(const FormulaPtr& f) { return pat_of_matrix(f); }

}  // namespace

FormulaPtr prenex(const FormulaPtr& f) { return prenex_full(f); }

ComplexityClass classify(const FormulaPtr& f) {
  Pattern p = pat_of(prenex(f));
  if (p.empty()) return {CKind::Delta0, 0};
  return {p[0] == 'E' ? CKind::Sigma : CKind::Pi, static_cast<int>(p.size())};
}

}  // namespace logiclab
