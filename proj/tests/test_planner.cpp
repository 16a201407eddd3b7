#include "huauv/planner.hpp"

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

VehicleState hover_at(const Vec3& p, double psi = 0.0) {
  VehicleState x;
  x.pos = p;
  x.att = Vec3(0.0, 0.0, psi);
  return x;
}

Tree tree_rooted_at(const Vec3& p, const ReferenceCommand& goal) {
  Tree t;
  t.init(hover_at(p), ControllerMemory{}, goal);
  return t;
}

// minimal hand-made node for the ordering tests
int add_stub_node(Tree& t, int parent, const Vec3& ref_pos) {
  TreeNode n;
  n.parent = parent;
  n.ref_end = {ref_pos.x(), ref_pos.y(), ref_pos.z(), 0.0};
  n.end_state = hover_at(ref_pos);
  n.states = {n.end_state};
  return t.add_node(std::move(n));
}

}  // namespace

TEST_CASE("sample_reference honors bias and the band") {
  const World w = empty_world();
  const ReferenceCommand goal{9.0, 9.0, -3.0, 0.0};

  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const ReferenceCommand s = sample_reference(w, goal, 1.0, rng);
    CHECK(s.x == goal.x);
    CHECK(s.z == goal.z);
  }

  Rng rng2(2);
  for (int i = 0; i < 10000; ++i) {
    const ReferenceCommand s = sample_reference(w, goal, 0.0, rng2);
    CHECK(std::abs(s.z) > w.mu);
    CHECK(w.bounds.contains(s.position()));
    CHECK(s.psi > -kPi);
    CHECK(s.psi <= kPi);
  }

  Rng a(42), b(42);
  for (int i = 0; i < 50; ++i) {
    const ReferenceCommand sa = sample_reference(w, goal, 0.1, a);
    const ReferenceCommand sb = sample_reference(w, goal, 0.1, b);
    CHECK(sa.x == sb.x);
    CHECK(sa.z == sb.z);
    CHECK(sa.psi == sb.psi);
  }

  CHECK_THROWS_AS(sample_reference(w, goal, 1.5, rng), std::invalid_argument);
}

TEST_CASE("candidate ordering") {
  const ReferenceCommand goal{0.0, 0.0, 5.0, 0.0};
  Tree t = tree_rooted_at(Vec3(0.0, 0.0, 5.0), goal);

  CHECK(sort_candidate_nodes(t, Vec3(3.0, 0.0, 5.0)) == std::vector<int>{0});

  const int near = add_stub_node(t, 0, Vec3(2.0, 0.0, 5.0));
  const int far = add_stub_node(t, 0, Vec3(5.0, 0.0, 5.0));
  const auto order = sort_candidate_nodes(t, Vec3(2.0, 0.0, 5.0));
  REQUIRE(order.size() == 3);
  CHECK(order[0] == near);
  CHECK(order[1] == 0);
  CHECK(order[2] == far);

  // equidistant nodes break ties by id
  const int tie_a = add_stub_node(t, 0, Vec3(0.0, 4.0, 5.0));
  const int tie_b = add_stub_node(t, 0, Vec3(0.0, -4.0, 5.0));
  const auto tied = sort_candidate_nodes(t, Vec3(0.0, 0.0, 5.0));
  const auto pos_a = std::find(tied.begin(), tied.end(), tie_a);
  const auto pos_b = std::find(tied.begin(), tied.end(), tie_b);
  CHECK(pos_a < pos_b);

  const auto top2 = nearest_candidates(t, Vec3(2.0, 0.0, 5.0), 2);
  REQUIRE(top2.size() == 2);
  CHECK(top2[0] == order[0]);
  CHECK(top2[1] == order[1]);
}

TEST_CASE("connect_reference interpolation and truncation") {
  PlannerConfig cfg;

  const RefSegment far = connect_reference({0.0, 0.0, 5.0, 0.0}, {10.0, 0.0, 5.0, 0.0}, 100, cfg);
  CHECK(far.total_steps() == 100);
  CHECK_THAT(far.back().x, WithinAbs(1.0, 1e-12));  // v_ref_air * 1 s
  CHECK_THAT(far.back().z, WithinAbs(5.0, 1e-12));
  CHECK_THAT(far.back().psi, WithinAbs(0.0, 1e-12));

  const RefSegment close = connect_reference({0.0, 0.0, 5.0, 0.0}, {0.3, 0.0, 5.0, 0.0}, 100, cfg);
  CHECK(close.total_steps() == 100);
  CHECK_THAT(close.back().x, WithinAbs(0.3, 1e-12));  // endpoint exactly `to`, then hold

  const RefSegment hover = connect_reference({1.0, 2.0, 5.0, 0.3}, {1.0, 2.0, 5.0, 0.3}, 100, cfg);
  CHECK(hover.total_steps() == 100);
  CHECK(hover.at_step(50).x == 1.0);
  CHECK(hover.at_step(50).psi == 0.3);

  // water-side legs move at the slower reference speed
  const RefSegment wet = connect_reference({0.0, 0.0, -3.0, 0.0}, {10.0, 0.0, -3.0, 0.0}, 100, cfg);
  CHECK_THAT(wet.back().x, WithinAbs(0.4, 1e-12));
}

TEST_CASE("propagate_segment tracks a hover and is deterministic") {
  RefSegment hover;
  hover.append_hold({0.0, 0.0, 5.0, 0.0}, 100);

  const VehicleState start = hover_at(Vec3(0.0, 0.0, 5.0));
  const Propagation a = propagate_segment(start, hover, kParams, kGains, ControllerMemory{});
  REQUIRE(a.ok);
  REQUIRE(a.states.size() == 101);
  CHECK((a.states.back().pos - start.pos).norm() < 1e-3);
  CHECK(a.memory.model == ControlMode::Air);  // stayed aerial throughout

  const Propagation b = propagate_segment(start, hover, kParams, kGains, ControllerMemory{});
  CHECK(std::memcmp(a.states.back().pos.data(), b.states.back().pos.data(), 3 * sizeof(double)) ==
        0);
  CHECK(std::memcmp(a.states.back().vel.data(), b.states.back().vel.data(), 3 * sizeof(double)) ==
        0);
}

TEST_CASE("vertical transition builder produces a smooth crossing") {
  PlannerConfig cfg;
  const double mu = 0.8;

  const ReferenceCommand from{0.0, 0.0, 1.5, 0.0};
  const ReferenceCommand to{0.0, 0.0, -2.0, 0.0};
  const VehicleState start = hover_at(Vec3(0.0, 0.0, 1.5));

  const TransitionBuild built =
      enforce_vertical_transition(from, to, start, ControllerMemory{}, kParams, kGains, cfg, mu);
  REQUIRE(built.ok);
  CHECK(built.segment.total_steps() % cfg.leg_steps == 0);

  const Propagation prop =
      propagate_segment(start, built.segment, kParams, kGains, ControllerMemory{});
  REQUIRE(prop.ok);
  CHECK(band_states_smooth(prop.states, mu, cfg));
  // the crossing actually happened and ends below the band
  CHECK(prop.states.back().pos.z() < -mu);
  bool entered_band = false;
  for (const auto& s : prop.states) entered_band = entered_band || std::abs(s.pos.z()) <= mu;
  CHECK(entered_band);
}

TEST_CASE("transition builder sheds entry speed or fails") {
  PlannerConfig cfg;
  const double mu = 0.8;
  VehicleState fast = hover_at(Vec3(0.0, 0.0, 1.5));
  fast.vel.x() = 2.0;

  const TransitionBuild built = enforce_vertical_transition(
      {0.0, 0.0, 1.5, 0.0}, {0.0, 0.0, -2.0, 0.0}, fast, ControllerMemory{}, kParams, kGains, cfg,
      mu);
  if (built.ok) {
    const Propagation prop = propagate_segment(fast, built.segment, kParams, kGains,
                                               ControllerMemory{});
    REQUIRE(prop.ok);
    CHECK(band_states_smooth(prop.states, mu, cfg));
  }
}

TEST_CASE("expand adds progress toward an unobstructed goal") {
  World w = empty_world();
  const ReferenceCommand goal{3.0, 0.0, 5.0, 0.0};
  Tree t = tree_rooted_at(Vec3(0.0, 0.0, 5.0), goal);
  PlannerConfig cfg;
  cfg.goal_bias = 1.0;  // always sample the goal

  Rng rng(7);
  const ExpandStats stats = expand(t, w, goal, rng, 1, kParams, kGains, cfg);
  CHECK(stats.nodes_added >= 1);
  bool closer = false;
  for (const auto& n : t.nodes())
    if (n.alive && n.id != t.root()) closer = closer || n.cost_to_go < t.node(t.root()).cost_to_go;
  CHECK(closer);
}

TEST_CASE("expand discards segments that enter known obstacles") {
  World w = empty_world();
  w.obstacles = {{Vec3(1.0, 0.0, 5.0), 1.0}};
  w.known = {1};
  const ReferenceCommand goal{3.0, 0.0, 5.0, 0.0};
  Tree t = tree_rooted_at(Vec3(0.0, 0.0, 5.0), goal);
  PlannerConfig cfg;
  cfg.goal_bias = 1.0;

  Rng rng(7);
  expand(t, w, goal, rng, 5, kParams, kGains, cfg);
  CHECK(t.alive_count() == 1);  // every goal-directed leg runs straight into the sphere
}

TEST_CASE("expansion across media inserts transition chains") {
  World w = empty_world();
  const ReferenceCommand goal{0.5, 0.0, -2.0, 0.0};
  Tree t = tree_rooted_at(Vec3(0.0, 0.0, 2.0), goal);
  PlannerConfig cfg;
  cfg.goal_bias = 1.0;

  Rng rng(11);
  expand(t, w, goal, rng, 30, kParams, kGains, cfg);

  bool has_water_node = false;
  bool chain_rule_holds = true;
  for (const auto& n : t.nodes()) {
    if (!n.alive || n.parent < 0) continue;
    if (n.medium == ControlMode::Water) has_water_node = true;
    const auto& parent = t.node(n.parent);
    if (parent.medium != n.medium && !n.transition) chain_rule_holds = false;
  }
  CHECK(has_water_node);
  CHECK(chain_rule_holds);

  // references stay out of the band except on transition chains
  for (const auto& n : t.nodes()) {
    if (!n.alive || n.transition || n.parent < 0) continue;
    CHECK(std::abs(n.ref_end.z) > w.mu);
  }
}

TEST_CASE("expand is reproducible for a fixed seed") {
  World w = empty_world();
  const ReferenceCommand goal{4.0, 4.0, 3.0, 0.0};
  PlannerConfig cfg;

  Tree t1 = tree_rooted_at(Vec3(0.0, 0.0, 5.0), goal);
  Tree t2 = tree_rooted_at(Vec3(0.0, 0.0, 5.0), goal);
  Rng r1(99), r2(99);
  expand(t1, w, goal, r1, 40, kParams, kGains, cfg);
  expand(t2, w, goal, r2, 40, kParams, kGains, cfg);

  REQUIRE(t1.size() == t2.size());
  for (std::size_t i = 0; i < t1.size(); ++i) {
    CHECK(std::memcmp(t1.node(i).end_state.pos.data(), t2.node(i).end_state.pos.data(),
                      3 * sizeof(double)) == 0);
    CHECK(t1.node(i).safe == t2.node(i).safe);
  }
}

TEST_CASE("cost_to_go is the euclidean gap") {
  const ReferenceCommand goal{1.0, 2.0, 3.0, 0.0};
  CHECK(cost_to_go(hover_at(Vec3(1.0, 2.0, 3.0)), goal) == 0.0);
  CHECK_THAT(cost_to_go(hover_at(Vec3(1.0, 2.0, 8.0)), goal), WithinAbs(5.0, 1e-12));
  VehicleState yawed = hover_at(Vec3(1.0, 2.0, 8.0), 1.2);
  CHECK(cost_to_go(yawed, goal) == cost_to_go(hover_at(Vec3(1.0, 2.0, 8.0)), goal));
}
