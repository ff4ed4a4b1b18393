#include <doctest.h>

#include <optional>
#include <stdexcept>
#include <vector>

#include "logiclab/logic.hpp"
#include "logiclab/nat.hpp"
#include "logiclab/tower.hpp"

using namespace logiclab;

namespace {

std::uint64_t pair_u(std::uint64_t i, std::uint64_t j) {
  return pair(Nat(i), Nat(j)).get_ui();
}

// system that never records the flags it is asked to set
class ForgetfulSystem : public MockSystem {
 public:
  using MockSystem::MockSystem;
  WorldId extend(WorldId w, std::optional<ElemId>, std::uint64_t level) override {
    return MockSystem::extend(w, std::nullopt, level);
  }
};

class ThrowingSystem : public MockSystem {
 public:
  using MockSystem::MockSystem;
  WorldId extend(WorldId w, std::optional<ElemId> target,
                 std::uint64_t level) override {
    if (++calls_ > 2) throw std::runtime_error("wire pulled");
    return MockSystem::extend(w, target, level);
  }

 private:
  int calls_ = 0;
};

// system that forgets old flags whenever a new world is created
class AmnesiacSystem : public MockSystem {
 public:
  using MockSystem::MockSystem;
  WorldId extend(WorldId w, std::optional<ElemId> target,
                 std::uint64_t level) override {
    const WorldId next = MockSystem::extend(w, target, level);
    last_flagged_ = target;
    last_world_ = next;
    return next;
  }
  std::optional<std::uint64_t> definable_at(WorldId w, ElemId e) override {
    if (w == last_world_ && last_flagged_ == e)
      return MockSystem::definable_at(w, e);
    return std::nullopt;
  }

 private:
  std::optional<ElemId> last_flagged_;
  WorldId last_world_ = 0;
};

}  // namespace

TEST_CASE("bookkeeping plan dovetails every arrival exactly once") {
  SUBCASE("one element per stage") {
    const BookkeepingPlan plan = plan_bookkeeping(std::vector<std::uint64_t>(20, 1));
    REQUIRE(plan.schedule.size() == 20);
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto it = plan.schedule.find(pair_u(i, 0));
      REQUIRE(it != plan.schedule.end());
      CHECK(it->second == std::make_pair(i, std::uint64_t{0}));
    }
  }
  SUBCASE("no arrivals, no plan") {
    CHECK(plan_bookkeeping({}).schedule.empty());
    CHECK(plan_bookkeeping(std::vector<std::uint64_t>(10, 0)).schedule.empty());
  }
  SUBCASE("coverage under mixed arrivals") {
    std::vector<std::uint64_t> arrivals(50);
    for (std::uint64_t i = 0; i < 50; ++i) arrivals[i] = i % 4;
    const BookkeepingPlan plan = plan_bookkeeping(arrivals);
    std::uint64_t expected = 0;
    for (std::uint64_t i = 0; i < 50; ++i)
      for (std::uint64_t j = 0; j < arrivals[i]; ++j) {
        ++expected;
        const auto it = plan.schedule.find(pair_u(i, j));
        REQUIRE(it != plan.schedule.end());
        CHECK(it->second == std::make_pair(i, j));
      }
    CHECK(plan.schedule.size() == expected);
  }
  SUBCASE("pairs are processed no later than their code") {
    for (std::uint64_t bound = 1; bound <= 5; ++bound) {
      std::vector<std::uint64_t> arrivals(200);
      for (std::uint64_t i = 0; i < 200; ++i) arrivals[i] = (i * 3 + bound) % (bound + 1);
      const BookkeepingPlan plan = plan_bookkeeping(arrivals);
      for (const auto& [stage, pr] : plan.schedule)
        CHECK(stage <= pair_u(pr.first, pr.second));
    }
  }
}

TEST_CASE("zero stages leave the start world alone") {
  MockSystem sys({3, 1});
  const TowerTrace t = run_tower(sys, sys.start(), 0, 2);
  CHECK(t.worlds == std::vector<WorldId>{0});
  CHECK(t.levels.empty());
  CHECK(t.elements.size() == 3);
  CHECK(check_exhaustion(t).ok);
}

TEST_CASE("hundred-stage run makes every early arrival definable") {
  std::vector<std::uint64_t> arrivals(100);
  for (std::uint64_t i = 0; i < 100; ++i) arrivals[i] = (i % 3 == 0) ? 2 : 1;
  MockSystem sys(arrivals);
  const TowerTrace t = run_tower(sys, sys.start(), 100, 0);
  REQUIRE(t.worlds.size() == 101);
  for (const TowerElement& e : t.elements) {
    if (e.arrival_stage > 9) continue;
    REQUIRE(e.definable_at_stage.has_value());
    CHECK(*e.definable_at_stage == pair_u(e.arrival_stage, e.arrival_index));
    CHECK(sys.definable_at(t.worlds.back(), e.id).has_value());
  }
  CHECK(check_exhaustion(t).ok);
}

TEST_CASE("levels climb one per stage from the base") {
  MockSystem sys(std::vector<std::uint64_t>(30, 1));
  const TowerTrace t = run_tower(sys, sys.start(), 30, 3);
  REQUIRE(t.levels.size() == 30);
  for (std::uint64_t n = 0; n < 30; ++n) {
    CHECK(t.levels[n] == 3 + n);
    if (n > 0) CHECK(t.levels[n] > t.levels[n - 1]);
    CHECK(sys.elementarity_level(t.worlds[n], t.worlds[n + 1]) == 3 + n);
  }
}

TEST_CASE("arrival bound five, horizon two hundred, nothing escapes") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    std::vector<std::uint64_t> arrivals(200);
    for (std::uint64_t i = 0; i < 200; ++i)
      arrivals[i] = (i * seed + seed) % 6;
    MockSystem sys(arrivals);
    const TowerTrace t = run_tower(sys, sys.start(), 200, 1);
    const ExhaustionVerdict v = check_exhaustion(t);
    CHECK(v.ok);
    for (const TowerElement& e : t.elements)
      if (pair_u(e.arrival_stage, e.arrival_index) < 200)
        CHECK(e.definable_at_stage.has_value());
  }
}

TEST_CASE("empty system is exhausted vacuously") {
  MockSystem sys({});
  const TowerTrace t = run_tower(sys, sys.start(), 5, 0);
  CHECK(t.elements.empty());
  CHECK(t.levels.size() == 5);
  CHECK(check_exhaustion(t).ok);
}

TEST_CASE("a system that never flags is caught with the pair named") {
  ForgetfulSystem sys(std::vector<std::uint64_t>(10, 1));
  const TowerTrace t = run_tower(sys, sys.start(), 10, 0);
  const ExhaustionVerdict v = check_exhaustion(t);
  REQUIRE_FALSE(v.ok);
  CHECK(v.missing_pair == std::make_pair(std::uint64_t{0}, std::uint64_t{0}));
  CHECK(v.missing_element == ElemId{0});
  const nlohmann::json j = v.to_json();
  CHECK(j.at("ok") == false);
  CHECK(j.at("missing_pair") == nlohmann::json{0, 0});
}

TEST_CASE("extend failures carry their stage") {
  ThrowingSystem sys(std::vector<std::uint64_t>(10, 1));
  CHECK_THROWS_WITH_AS(run_tower(sys, sys.start(), 10, 0),
                       "tower: extend failed at stage 2: wire pulled",
                       SemanticError);
}

TEST_CASE("flag loss along the chain is rejected") {
  AmnesiacSystem sys(std::vector<std::uint64_t>(10, 1));
  CHECK_THROWS_AS(run_tower(sys, sys.start(), 10, 0), SemanticError);
}

TEST_CASE("mock system validates its inputs") {
  MockSystem sys({2});
  CHECK_THROWS_AS(sys.extend(sys.start(), ElemId{5}, 0), SemanticError);
  CHECK_THROWS_AS(sys.elements(99), SemanticError);
  CHECK_THROWS_AS(sys.elementarity_level(0, 0), SemanticError);
}

TEST_CASE("trace reports are deterministic") {
  std::vector<std::uint64_t> arrivals = {2, 0, 3, 1, 1};
  MockSystem a(arrivals);
  MockSystem b(arrivals);
  const nlohmann::json ja = run_tower(a, a.start(), 12, 1).to_json();
  const nlohmann::json jb = run_tower(b, b.start(), 12, 1).to_json();
  CHECK(ja.dump() == jb.dump());
  CHECK(ja.at("stages") == 12);
  REQUIRE(ja.at("elements").size() == 7);
  CHECK(ja.at("elements")[0].contains("definable_at_stage"));
}
