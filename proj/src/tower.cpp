#include "logiclab/tower.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "logiclab/logic.hpp"
#include "logiclab/nat.hpp"

namespace logiclab {

namespace {

std::uint64_t pair_code(std::uint64_t i, std::uint64_t j) {
  return pair(Nat(i), Nat(j)).get_ui();
}

std::pair<std::uint64_t, std::uint64_t> unpair_code(std::uint64_t n) {
  const auto [a, b] = unpair(Nat(n));
  return {a.get_ui(), b.get_ui()};
}

}  // namespace

MockSystem::MockSystem(std::vector<std::uint64_t> arrivals_per_stage)
    : arrivals_(std::move(arrivals_per_stage)) {
  World w0;
  w0.elem_count = arrivals_.empty() ? 0 : arrivals_[0];
  worlds_.push_back(w0);
}

const MockSystem::World& MockSystem::world(WorldId w) const {
  if (w >= worlds_.size()) throw SemanticError("mock system: unknown world");
  return worlds_[w];
}

std::vector<ElemId> MockSystem::elements(WorldId w) {
  std::vector<ElemId> out(world(w).elem_count);
  for (ElemId e = 0; e < out.size(); ++e) out[e] = e;
  return out;
}

WorldId MockSystem::extend(WorldId w, std::optional<ElemId> target,
                           std::uint64_t level) {
  World next = world(w);
  if (target) {
    if (*target >= next.elem_count)
      throw SemanticError("mock system: element is not in this world");
    next.flags.emplace(*target, level);  // first flag wins; later ones are higher
  }
  next.stage += 1;
  if (next.stage < arrivals_.size()) next.elem_count += arrivals_[next.stage];
  worlds_.push_back(std::move(next));
  const WorldId id = worlds_.size() - 1;
  edge_levels_[{w, id}] = level;
  return id;
}

std::uint64_t MockSystem::elementarity_level(WorldId from, WorldId to) {
  const auto it = edge_levels_.find({from, to});
  if (it == edge_levels_.end())
    throw SemanticError("mock system: not an extension edge");
  return it->second;
}

std::optional<std::uint64_t> MockSystem::definable_at(WorldId w, ElemId e) {
  const World& st = world(w);
  const auto it = st.flags.find(e);
  if (it == st.flags.end()) return std::nullopt;
  return it->second;
}

BookkeepingPlan plan_bookkeeping(const std::vector<std::uint64_t>& arrivals) {
  BookkeepingPlan plan;
  for (std::uint64_t i = 0; i < arrivals.size(); ++i)
    for (std::uint64_t j = 0; j < arrivals[i]; ++j)
      plan.schedule[pair_code(i, j)] = {i, j};
  return plan;
}

nlohmann::json TowerTrace::to_json() const {
  nlohmann::json elems = nlohmann::json::array();
  for (const TowerElement& e : elements) {
    nlohmann::json row = {{"id", e.id},
                          {"arrival_stage", e.arrival_stage},
                          {"definable_at_stage", nullptr}};
    if (e.definable_at_stage) row["definable_at_stage"] = *e.definable_at_stage;
    elems.push_back(std::move(row));
  }
  return nlohmann::json{{"stages", levels.size()},
                        {"levels", levels},
                        {"elements", std::move(elems)}};
}

TowerTrace run_tower(PotentialistSystem& system, WorldId start,
                     std::uint64_t stages, std::uint64_t base_level) {
  TowerTrace trace;
  trace.base_level = base_level;
  trace.worlds.push_back(start);

  std::set<ElemId> known;
  // arrivals[i] lists the elements first seen in world i, in listing order
  std::vector<std::vector<ElemId>> arrivals;
  auto absorb = [&](WorldId w, std::uint64_t at_stage) {
    std::vector<ElemId> fresh;
    for (ElemId e : system.elements(w))
      if (known.insert(e).second) fresh.push_back(e);
    for (std::uint64_t j = 0; j < fresh.size(); ++j)
      trace.elements.push_back({fresh[j], at_stage, j, std::nullopt});
    arrivals.push_back(std::move(fresh));
  };
  absorb(start, 0);

  for (std::uint64_t n = 0; n < stages; ++n) {
    const WorldId w = trace.worlds.back();
    const auto [i, j] = unpair_code(n);
    std::optional<ElemId> target;
    if (i < arrivals.size() && j < arrivals[i].size()) target = arrivals[i][j];

    WorldId next;
    try {
      next = system.extend(w, target, base_level + n);
    } catch (const std::exception& ex) {
      throw SemanticError("tower: extend failed at stage " + std::to_string(n) +
                          ": " + ex.what());
    }

    // old elements must survive into the new world
    const std::vector<ElemId> now = system.elements(next);
    const std::set<ElemId> now_set(now.begin(), now.end());
    for (ElemId e : known)
      if (!now_set.count(e))
        throw SemanticError("tower: extension dropped an element at stage " +
                            std::to_string(n));
    if (system.elementarity_level(w, next) != base_level + n)
      throw SemanticError("tower: edge level mismatch at stage " +
                          std::to_string(n));
    // flags persist: everything this run made definable must stay definable,
    // at a level no higher than the one it was flagged with
    for (TowerElement& e : trace.elements) {
      const auto after = system.definable_at(next, e.id);
      if (e.definable_at_stage &&
          (!after || *after > base_level + *e.definable_at_stage))
        throw SemanticError("tower: definability flag lost at stage " +
                            std::to_string(n));
      if (target && e.id == *target && after && !e.definable_at_stage)
        e.definable_at_stage = n;
    }

    trace.levels.push_back(base_level + n);
    trace.worlds.push_back(next);
    absorb(next, n + 1);
  }
  return trace;
}

nlohmann::json ExhaustionVerdict::to_json() const {
  nlohmann::json j{{"ok", ok}};
  if (missing_pair)
    j["missing_pair"] = {missing_pair->first, missing_pair->second};
  if (missing_element) j["missing_element"] = *missing_element;
  return j;
}

ExhaustionVerdict check_exhaustion(const TowerTrace& trace) {
  ExhaustionVerdict v;
  for (const TowerElement& e : trace.elements) {
    if (pair_code(e.arrival_stage, e.arrival_index) >= trace.levels.size())
      continue;  // its slot lies beyond the run
    if (!e.definable_at_stage) {
      v.ok = false;
      v.missing_pair = {e.arrival_stage, e.arrival_index};
      v.missing_element = e.id;
      return v;
    }
  }
  return v;
}

}  // namespace logiclab
