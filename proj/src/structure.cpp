#include "logiclab/structure.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace logiclab {

FiniteStructure::FiniteStructure(SigPtr sig, size_t size) : sig_(std::move(sig)), size_(size) {
  if (size_ > 0x10000) throw SemanticError("structure: universe too large");
  rel_set_.resize(sig_->rels().size());
  rel_list_.resize(sig_->rels().size());
  func_table_.resize(sig_->funcs().size());
}

std::uint64_t FiniteStructure::pack(const std::vector<Elem>& tuple) const {
  if (tuple.size() > 4) throw SemanticError("structure: relation arity above 4");
  std::uint64_t key = 0;
  for (Elem e : tuple) key = (key << 16) | e;
  return key | (static_cast<std::uint64_t>(tuple.size()) << 60);
}

void FiniteStructure::add_tuple(int rel, const std::vector<Elem>& tuple) {
  if (rel < 0 || rel >= static_cast<int>(rel_set_.size()))
    throw SemanticError("structure: unknown relation");
  if (rel == sig_->eq_rel()) throw SemanticError("structure: '=' is built in");
  if (static_cast<int>(tuple.size()) != sig_->rels()[rel].arity)
    throw SemanticError("structure: tuple arity mismatch");
  for (Elem e : tuple)
    if (e >= size_) throw SemanticError("structure: element out of range");
  if (rel_set_[rel].insert(pack(tuple)).second) rel_list_[rel].push_back(tuple);
}

void FiniteStructure::add_tuple(const std::string& rel, const std::vector<Elem>& tuple) {
  int idx = sig_->rel_index(rel);
  if (idx < 0) throw SemanticError("structure: unknown relation " + rel);
  add_tuple(idx, tuple);
}

void FiniteStructure::set_func(const std::string& name, std::vector<Elem> table) {
  int idx = sig_->func_index(name);
  if (idx < 0) throw SemanticError("structure: unknown function " + name);
  size_t want = 1;
  for (int i = 0; i < sig_->funcs()[idx].arity; ++i) want *= size_;
  if (table.size() != want) throw SemanticError("structure: function table size mismatch");
  for (Elem e : table)
    if (e >= size_) throw SemanticError("structure: function value out of range");
  func_table_[idx] = std::move(table);
}

void FiniteStructure::set_const(const std::string& name, Elem value) {
  set_func(name, {value});
}

bool FiniteStructure::rel_holds(int rel, const std::vector<Elem>& tuple) const {
  if (rel == sig_->eq_rel()) return tuple[0] == tuple[1];
  return rel_set_[rel].count(pack(tuple)) != 0;
}

Elem FiniteStructure::func_value(int func, const std::vector<Elem>& args) const {
  const auto& table = func_table_[func];
  if (table.empty())
    throw SemanticError("structure: no table for " + sig_->funcs()[func].name);
  size_t idx = 0;
  for (Elem a : args) idx = idx * size_ + a;
  return table[idx];
}

bool FiniteStructure::same_signature(const FiniteStructure& other) const {
  return sig_->compatible(*other.sig_) &&
         sig_->rels().size() == other.sig_->rels().size() &&
         sig_->funcs().size() == other.sig_->funcs().size();
}

nlohmann::json FiniteStructure::to_json() const {
  nlohmann::json j;
  j["universe_size"] = size_;
  if (sig_->name() == "SET" || sig_->name() == "ARITH") {
    j["signature"] = sig_->name();
  } else {
    nlohmann::json sj;
    sj["name"] = sig_->name();
    sj["funcs"] = nlohmann::json::array();
    for (const auto& f : sig_->funcs()) sj["funcs"].push_back({{"name", f.name}, {"arity", f.arity}});
    sj["rels"] = nlohmann::json::array();
    for (const auto& r : sig_->rels()) sj["rels"].push_back({{"name", r.name}, {"arity", r.arity}});
    j["signature"] = sj;
  }
  nlohmann::json rels = nlohmann::json::object();
  for (size_t r = 0; r < rel_list_.size(); ++r) {
    if (static_cast<int>(r) == sig_->eq_rel()) continue;
    nlohmann::json arr = nlohmann::json::array();
    auto sorted = rel_list_[r];
    std::sort(sorted.begin(), sorted.end());
    for (const auto& t : sorted) arr.push_back(t);
    rels[sig_->rels()[r].name] = arr;
  }
  j["relations"] = rels;
  nlohmann::json funcs = nlohmann::json::object();
  for (size_t f = 0; f < func_table_.size(); ++f) {
    if (func_table_[f].empty()) continue;
    funcs[sig_->funcs()[f].name] = func_table_[f];
  }
  j["functions"] = funcs;
  return j;
}

FiniteStructure FiniteStructure::from_json(const nlohmann::json& j) {
  SigPtr sig;
  const auto& js = j.at("signature");
  if (js.is_string()) {
    std::string name = js.get<std::string>();
    if (name == "SET") sig = Signature::set();
    else if (name == "ARITH") sig = Signature::arith();
    else throw SemanticError("structure json: unknown signature " + name);
  } else {
    std::vector<FuncSym> funcs;
    std::vector<RelSym> rels;
    for (const auto& f : js.at("funcs"))
      funcs.push_back({f.at("name").get<std::string>(), f.at("arity").get<int>()});
    for (const auto& r : js.at("rels"))
      rels.push_back({r.at("name").get<std::string>(), r.at("arity").get<int>()});
    sig = std::make_shared<const Signature>(js.at("name").get<std::string>(), std::move(funcs),
                                            std::move(rels));
  }
  FiniteStructure M(sig, j.at("universe_size").get<size_t>());
  if (j.contains("relations")) {
    for (const auto& [name, arr] : j.at("relations").items()) {
      for (const auto& t : arr) M.add_tuple(name, t.get<std::vector<Elem>>());
    }
  }
  if (j.contains("functions")) {
    for (const auto& [name, arr] : j.at("functions").items()) {
      M.set_func(name, arr.get<std::vector<Elem>>());
    }
  }
  return M;
}

namespace {

Elem eval_term_env(const TermPtr& t, const FiniteStructure& M, const Assignment& asg,
                   std::vector<Elem>& env) {
  switch (t->tag) {
    case TermTag::BVar: {
      int idx = t->bvar;
      if (idx >= static_cast<int>(env.size()))
        throw SemanticError("evaluate: dangling bound variable");
      return env[env.size() - 1 - idx];
    }
    case TermTag::FVar: {
      auto it = asg.find(t->fvar);
      if (it == asg.end()) throw SemanticError("evaluate: unassigned variable " + t->fvar);
      if (it->second >= M.size()) throw SemanticError("evaluate: assignment out of range");
      return it->second;
    }
    case TermTag::Func: {
      std::vector<Elem> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(eval_term_env(a, M, asg, env));
      return M.func_value(t->func, args);
    }
  }
  throw SemanticError("evaluate: bad term");
}

bool eval_env(const FormulaPtr& f, const FiniteStructure& M, const Assignment& asg,
              std::vector<Elem>& env) {
  switch (f->tag) {
    case FTag::Atom: {
      std::vector<Elem> tuple;
      tuple.reserve(f->terms.size());
      for (const auto& t : f->terms) tuple.push_back(eval_term_env(t, M, asg, env));
      return M.rel_holds(f->rel, tuple);
    }
    case FTag::Neg:
      return !eval_env(f->subs[0], M, asg, env);
    case FTag::And:
      return eval_env(f->subs[0], M, asg, env) && eval_env(f->subs[1], M, asg, env);
    case FTag::Or:
      return eval_env(f->subs[0], M, asg, env) || eval_env(f->subs[1], M, asg, env);
    case FTag::Implies:
      return !eval_env(f->subs[0], M, asg, env) || eval_env(f->subs[1], M, asg, env);
    case FTag::Forall: {
      for (Elem a = 0; a < M.size(); ++a) {
        env.push_back(a);
        bool ok = eval_env(f->subs[0], M, asg, env);
        env.pop_back();
        if (!ok) return false;
      }
      return true;
    }
    case FTag::Exists: {
      for (Elem a = 0; a < M.size(); ++a) {
        env.push_back(a);
        bool ok = eval_env(f->subs[0], M, asg, env);
        env.pop_back();
        if (ok) return true;
      }
      return false;
    }
    case FTag::BForall:
    case FTag::BExists: {
      Elem bound = eval_term_env(f->terms[0], M, asg, env);
      bool universal = f->tag == FTag::BForall;
      for (Elem a = 0; a < M.size(); ++a) {
        if (!M.rel_holds(f->rel, {a, bound})) continue;
        env.push_back(a);
        bool ok = eval_env(f->subs[0], M, asg, env);
        env.pop_back();
        if (universal && !ok) return false;
        if (!universal && ok) return true;
      }
      return universal;
    }
    case FTag::Box:
    case FTag::Dia:
      throw SemanticError("evaluate: modal operator outside a Kripke model");
  }
  throw SemanticError("evaluate: bad node");
}

}  // namespace

bool evaluate(const FormulaPtr& f, const FiniteStructure& M, const Assignment& asg) {
  if (!f->sig->compatible(*M.sig())) throw SemanticError("evaluate: signature mismatch");
  std::vector<Elem> env;
  return eval_env(f, M, asg, env);
}

Elem eval_term(const TermPtr& t, const FiniteStructure& M, const Assignment& asg) {
  if (!t->sig->compatible(*M.sig())) throw SemanticError("evaluate: signature mismatch");
  std::vector<Elem> env;
  return eval_term_env(t, M, asg, env);
}

}  // namespace logiclab
