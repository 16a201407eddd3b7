#include "huauv/executor.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstring>

using namespace huauv;
using Catch::Matchers::WithinAbs;

namespace {

const VehicleConstants kConsts{};
const VehicleParams kParams = make_vehicle_params(kConsts);
const GainSet kGains{};

World empty_world() {
  World w;
  w.bounds = {Vec3(-10.0, -10.0, -5.0), Vec3(10.0, 10.0, 10.0)};
  return w;
}

VehicleState hover_at(const Vec3& p) {
  VehicleState x;
  x.pos = p;
  return x;
}

int add_safe_leaf(Tree& t, int parent, const Vec3& pos, double ctg) {
  TreeNode n;
  n.parent = parent;
  n.ref_end = {pos.x(), pos.y(), pos.z(), 0.0};
  n.end_state = hover_at(pos);
  n.states = {t.node(parent).end_state, n.end_state};
  n.segment.append_line(t.node(parent).ref_end, n.ref_end, 100);
  n.cost_to_go = ctg;
  return t.add_node(std::move(n));
}

MissionSetup basic_setup(const Vec3& start, const ReferenceCommand& goal) {
  MissionSetup ms;
  ms.world = empty_world();
  ms.start = hover_at(start);
  ms.goal = goal;
  ms.params = kParams;
  ms.gains = kGains;
  ms.executor.expansion_budget = 80;
  ms.executor.max_time = 60.0;
  ms.seed = 5;
  return ms;
}

}  // namespace

TEST_CASE("safety_action holds pose or exits the band") {
  VehicleState air = hover_at(Vec3(1.0, 2.0, 5.0));
  air.att.z() = 0.7;
  const ReferenceCommand hold = safety_action(air, Medium::Air, 0.8);
  CHECK(hold.x == 1.0);
  CHECK(hold.y == 2.0);
  CHECK(hold.z == 5.0);
  CHECK(hold.psi == 0.7);

  VehicleState wet = hover_at(Vec3(-1.0, 0.0, -3.0));
  const ReferenceCommand station = safety_action(wet, Medium::Water, 0.8);
  CHECK(station.z == -3.0);

  VehicleState diving = hover_at(Vec3(0.0, 0.0, 0.3));
  diving.vel.z() = -0.2;
  const ReferenceCommand down = safety_action(diving, Medium::Transition, 0.8);
  CHECK_THAT(down.z, WithinAbs(-1.0, 1e-12));  // continue to -1.25*mu

  VehicleState rising = hover_at(Vec3(0.0, 0.0, -0.3));
  rising.vel.z() = 0.2;
  const ReferenceCommand up = safety_action(rising, Medium::Transition, 0.8);
  CHECK_THAT(up.z, WithinAbs(1.0, 1e-12));
}

TEST_CASE("select_best picks the nearest safe terminal") {
  const ReferenceCommand goal{0.0, 0.0, 5.0, 0.0};
  Tree t;
  t.init(hover_at(Vec3(0.0, 0.0, 5.0)), ControllerMemory{}, goal);

  CHECK_FALSE(select_best(t, goal).has_value());  // only the root

  const int far = add_safe_leaf(t, 0, Vec3(5.0, 0.0, 5.0), 5.0);
  const int near = add_safe_leaf(t, 0, Vec3(2.0, 0.0, 5.0), 2.0);
  const auto best = select_best(t, goal);
  REQUIRE(best.has_value());
  CHECK(best->back() == near);
  CHECK(best->front() == t.root());

  // ties go to the lower id
  t.node(near).cost_to_go = 5.0;
  const auto tied = select_best(t, goal);
  REQUIRE(tied.has_value());
  CHECK(tied->back() == far);

  t.node(far).safe = false;
  t.node(near).safe = false;
  CHECK_FALSE(select_best(t, goal).has_value());
}

TEST_CASE("validate_path re-propagates against new knowledge") {
  const ReferenceCommand goal{2.0, 0.0, 5.0, 0.0};
  World w = empty_world();
  w.obstacles = {{Vec3(1.0, 0.0, 5.0), 0.6}};
  w.known = {0};

  Tree t;
  const VehicleState start = hover_at(Vec3(0.0, 0.0, 5.0));
  t.init(start, ControllerMemory{}, goal);
  const int leaf = add_safe_leaf(t, 0, Vec3(2.0, 0.0, 5.0), 0.0);
  const auto path = t.path_to(leaf);

  PlannerConfig cfg;
  CHECK(validate_path(path, t, start, ControllerMemory{}, w, kParams, kGains, cfg));

  w.sense(Vec3(0.5, 0.0, 5.0));  // the obstacle becomes known
  REQUIRE(w.known[0] == 1);
  CHECK_FALSE(validate_path(path, t, start, ControllerMemory{}, w, kParams, kGains, cfg));

  CHECK_THROWS_AS(validate_path({}, t, start, ControllerMemory{}, w, kParams, kGains, cfg),
                  std::invalid_argument);
}

TEST_CASE("validate_path rejects crossings that lost smoothness") {
  const ReferenceCommand goal{0.0, 0.0, -2.0, 0.0};
  World w = empty_world();

  Tree t;
  const VehicleState calm = hover_at(Vec3(0.0, 0.0, 1.0));
  t.init(calm, ControllerMemory{}, goal);
  TreeNode n;
  n.parent = 0;
  n.segment.append_line({0.0, 0.0, 1.0, 0.0}, {0.0, 0.0, -1.0, 0.0}, 700);
  n.segment.append_hold({0.0, 0.0, -1.0, 0.0}, 300);
  n.ref_end = n.segment.back();
  n.end_state = hover_at(Vec3(0.0, 0.0, -1.0));
  n.states = {calm, n.end_state};
  n.transition = true;
  const int leaf = t.add_node(std::move(n));
  const auto path = t.path_to(leaf);

  PlannerConfig cfg;
  CHECK(validate_path(path, t, calm, ControllerMemory{}, w, kParams, kGains, cfg));

  VehicleState moving = calm;
  moving.vel.x() = 1.0;  // lateral speed the vertical reference cannot shed in time
  CHECK_FALSE(validate_path(path, t, moving, ControllerMemory{}, w, kParams, kGains, cfg));
}

TEST_CASE("prune removes blocked subtrees, never the root") {
  const ReferenceCommand goal{4.0, 0.0, 5.0, 0.0};
  World w = empty_world();
  w.obstacles = {{Vec3(2.0, 0.0, 5.0), 0.8}};
  w.known = {1};

  Tree t;
  t.init(hover_at(Vec3(0.0, 0.0, 5.0)), ControllerMemory{}, goal);
  const int mid = add_safe_leaf(t, 0, Vec3(2.0, 0.0, 5.0), 2.0);   // sits inside the sphere
  const int tip = add_safe_leaf(t, mid, Vec3(4.0, 0.0, 5.0), 0.0);
  const int side = add_safe_leaf(t, 0, Vec3(0.0, 3.0, 5.0), 5.0);

  World unknown = w;
  unknown.known = {0};
  CHECK(prune(t, unknown) == 0);  // nothing known, nothing pruned

  CHECK(prune(t, w) == 2);
  CHECK_FALSE(t.node(mid).alive);
  CHECK_FALSE(t.node(tip).alive);
  CHECK(t.node(side).alive);
  CHECK(t.node(t.root()).alive);
}

TEST_CASE("mission succeeds immediately when the goal is the start") {
  const MissionSetup ms = basic_setup(Vec3(1.0, 1.0, 5.0), {1.0, 1.0, 5.0, 0.0});
  const MissionResult r = run_mission(ms);
  CHECK(r.log.summary.success);
  CHECK(r.log.summary.elapsed == 0.0);
  CHECK(r.log.summary.path_length == 0.0);
  int goal_events = 0;
  for (const auto& e : r.log.events) goal_events += e.kind == MissionEvent::Goal;
  CHECK(goal_events == 1);
}

TEST_CASE("mission reaches a nearby aerial goal") {
  const MissionSetup ms = basic_setup(Vec3(0.0, 0.0, 5.0), {5.0, 0.0, 5.0, 0.0});
  const MissionResult r = run_mission(ms);
  REQUIRE(r.log.summary.success);
  CHECK(r.log.summary.path_length >= 5.0 - ms.executor.goal_radius);
  // displacement can never exceed the integrated path length
  const Vec3 displacement = r.log.trace.back().state.pos - r.log.trace.front().state.pos;
  CHECK(r.log.summary.path_length >= displacement.norm() - 1e-9);
  // tick timestamps advance by exactly the period
  for (std::size_t i = 0; i + 1 < r.log.ticks.size(); ++i)
    CHECK_THAT(r.log.ticks[i + 1].t - r.log.ticks[i].t, WithinAbs(ms.executor.period, 1e-12));
}

TEST_CASE("mission times out when the goal is unreachable") {
  MissionSetup ms = basic_setup(Vec3(0.0, 0.0, 5.0), {5.0, 0.0, 5.0, 0.0});
  ms.world.obstacles = {{Vec3(5.0, 0.0, 5.0), 1.0}};  // goal sits inside a sphere
  ms.world.known = {0};
  ms.executor.max_time = 12.0;
  const MissionResult r = run_mission(ms);
  CHECK_FALSE(r.log.summary.success);
  CHECK(r.log.summary.elapsed == 12.0);
  int goal_events = 0;
  for (const auto& e : r.log.events) goal_events += e.kind == MissionEvent::Goal;
  CHECK(goal_events == 0);
}

TEST_CASE("mission log is deterministic for a fixed seed") {
  const MissionSetup ms = basic_setup(Vec3(0.0, 0.0, 5.0), {4.0, 2.0, 6.0, 0.0});
  const MissionResult a = run_mission(ms);
  const MissionResult b = run_mission(ms);
  REQUIRE(a.log.trace.size() == b.log.trace.size());
  CHECK(a.log.summary.success == b.log.summary.success);
  CHECK(a.log.summary.path_length == b.log.summary.path_length);
  for (std::size_t i = 0; i < a.log.trace.size(); i += 37) {
    CHECK(std::memcmp(a.log.trace[i].state.pos.data(), b.log.trace[i].state.pos.data(),
                      3 * sizeof(double)) == 0);
  }
  // every tick either follows a validated plan or issues a safety action
  for (const auto& tick : a.log.ticks) {
    CHECK((tick.event == MissionEvent::Plan || tick.event == MissionEvent::Replan ||
           tick.event == MissionEvent::Safety));
  }
}

TEST_CASE("perturbed plant still reaches the goal") {
  MissionSetup ms = basic_setup(Vec3(0.0, 0.0, 5.0), {4.0, 0.0, 5.0, 0.0});
  ms.executor.perturb = true;
  const MissionResult r = run_mission(ms);
  CHECK(r.log.summary.success);
}
