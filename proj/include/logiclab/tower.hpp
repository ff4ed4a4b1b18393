#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace logiclab {

using WorldId = std::uint64_t;
using ElemId = std::uint64_t;

// Chain of structures under an extension relation. Implementations hand out
// world handles; extend must return a world whose element set includes the
// old one, and a definability flag, once set, must survive into every later
// world at a level at least as high.
class PotentialistSystem {
 public:
  virtual ~PotentialistSystem() = default;

  virtual std::vector<ElemId> elements(WorldId w) = 0;
  // Grow the world one step. A present target is flagged definable at the
  // given level; an absent one makes a growth-only step.
  virtual WorldId extend(WorldId w, std::optional<ElemId> target,
                         std::uint64_t level) = 0;
  virtual std::uint64_t elementarity_level(WorldId from, WorldId to) = 0;
  virtual std::optional<std::uint64_t> definable_at(WorldId w, ElemId e) = 0;
};

// Finite labeled-element system for desk runs: world k holds the first
// arrivals[0] + .. + arrivals[k] element ids, and extending from world k
// brings in the arrivals of stage k + 1.
class MockSystem : public PotentialistSystem {
 public:
  explicit MockSystem(std::vector<std::uint64_t> arrivals_per_stage);

  WorldId start() const { return 0; }
  std::vector<ElemId> elements(WorldId w) override;
  WorldId extend(WorldId w, std::optional<ElemId> target,
                 std::uint64_t level) override;
  std::uint64_t elementarity_level(WorldId from, WorldId to) override;
  std::optional<std::uint64_t> definable_at(WorldId w, ElemId e) override;

 private:
  struct World {
    std::uint64_t stage = 0;
    std::uint64_t elem_count = 0;
    std::map<ElemId, std::uint64_t> flags;  // element -> first flag level
  };
  std::vector<std::uint64_t> arrivals_;
  std::vector<World> worlds_;
  std::map<std::pair<WorldId, WorldId>, std::uint64_t> edge_levels_;

  const World& world(WorldId w) const;
};

// Dovetailing schedule: the pair (source stage i, element index j) is handled
// at the stage its pairing code names, so everything that ever arrives gets
// its turn.
struct BookkeepingPlan {
  // stage -> (source stage, element index)
  std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> schedule;
};

// arrivals[i] = how many elements stage i introduces. Every (i, j) with
// j < arrivals[i] is scheduled exactly once, at stage pair(i, j).
BookkeepingPlan plan_bookkeeping(const std::vector<std::uint64_t>& arrivals);

struct TowerElement {
  ElemId id = 0;
  std::uint64_t arrival_stage = 0;
  std::uint64_t arrival_index = 0;  // position among that stage's arrivals
  std::optional<std::uint64_t> definable_at_stage;
};

struct TowerTrace {
  std::uint64_t base_level = 0;
  std::vector<WorldId> worlds;          // stages + 1 entries
  std::vector<std::uint64_t> levels;    // level of edge n is base_level + n
  std::vector<TowerElement> elements;   // in arrival order
  nlohmann::json to_json() const;  // keys: stages, levels, elements
};

// Runs the dovetailed tower for the given number of stages: stage n extends
// with the element its pairing slot names (when that element has arrived)
// at level base_level + n. Element arrivals are discovered by diffing the
// system's element sets, so the orchestrator works against any system.
// Asserts on every step that element sets grow, edge levels match, and
// definability flags persist. A throwing extend is rethrown with the stage
// attached.
TowerTrace run_tower(PotentialistSystem& system, WorldId start,
                     std::uint64_t stages, std::uint64_t base_level);

struct ExhaustionVerdict {
  bool ok = true;
  // set when ok is false: the scheduled pair whose element never got its flag
  std::optional<std::pair<std::uint64_t, std::uint64_t>> missing_pair;
  std::optional<ElemId> missing_element;
  nlohmann::json to_json() const;
};

// True iff every element whose pairing slot fell inside the run is flagged
// definable in the trace's final accounting.
ExhaustionVerdict check_exhaustion(const TowerTrace& trace);

}  // namespace logiclab
