#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "logiclab/logic.hpp"

namespace logiclab {

using Elem = std::uint32_t;

// Finite first-order structure with universe {0, .., size-1}. Equality is logical and
// always interpreted as identity; it never has a stored table.
class FiniteStructure {
 public:
  FiniteStructure(SigPtr sig, size_t size);

  const SigPtr& sig() const { return sig_; }
  size_t size() const { return size_; }

  void add_tuple(int rel, const std::vector<Elem>& tuple);
  void add_tuple(const std::string& rel, const std::vector<Elem>& tuple);
  void set_func(const std::string& name, std::vector<Elem> table);  // row-major
  void set_const(const std::string& name, Elem value);

  bool rel_holds(int rel, const std::vector<Elem>& tuple) const;
  Elem func_value(int func, const std::vector<Elem>& args) const;
  const std::vector<std::vector<Elem>>& tuples_of(int rel) const { return rel_list_[rel]; }

  nlohmann::json to_json() const;
  static FiniteStructure from_json(const nlohmann::json& j);

  bool same_signature(const FiniteStructure& other) const;

 private:
  SigPtr sig_;
  size_t size_;
  std::vector<std::unordered_set<std::uint64_t>> rel_set_;
  std::vector<std::vector<std::vector<Elem>>> rel_list_;
  std::vector<std::vector<Elem>> func_table_;  // index by func, row-major over args

  std::uint64_t pack(const std::vector<Elem>& tuple) const;
};

using Assignment = std::map<std::string, Elem>;

// Tarskian evaluation. Throws SemanticError on modal nodes, unassigned free variables,
// signature mismatch, or missing interpretation tables.
bool evaluate(const FormulaPtr& f, const FiniteStructure& M, const Assignment& asg = {});
Elem eval_term(const TermPtr& t, const FiniteStructure& M, const Assignment& asg = {});

}  // namespace logiclab
