// scratch harness for closed-loop experiments (not installed)
#define HUAUV_EXEC_TRACE
#include "huauv/huauv.hpp"

#include <cstdio>

using namespace huauv;


namespace {
int expand_probe() {
  const huauv::VehicleConstants consts{};
  const huauv::VehicleParams params = huauv::make_vehicle_params(consts);
  const huauv::GainSet gains{};
  huauv::World w;
  w.bounds = {huauv::Vec3(-10.0, -10.0, -5.0), huauv::Vec3(10.0, 10.0, 10.0)};
  huauv::PlannerConfig cfg;

  huauv::VehicleState root;
  root.pos = huauv::Vec3(9.0, -9.0, -3.0);
  const huauv::ReferenceCommand goal{-9.0, 9.0, 7.0, 0.0};
  huauv::Tree tree;
  tree.init(root, huauv::ControllerMemory{}, goal);
  huauv::Rng rng(5);
  const huauv::ExpandStats st = huauv::expand(tree, w, goal, rng, 200, params, gains, cfg);
  int safe_nodes = 0, alive = 0;
  for (const auto& n : tree.nodes()) {
    if (!n.alive) continue;
    ++alive;
    safe_nodes += n.safe;
  }
  std::printf("attempts=%d added=%d alive=%d safe=%d | coll=%d smooth=%d div=%d tfail=%d unsafe=%d\n",
              st.attempts, st.nodes_added, alive, safe_nodes, st.rejected_collision,
              st.rejected_smoothness, st.rejected_divergence, st.transition_failures,
              st.unsafe_chains);
  return 0;
}
}  // namespace


namespace {
int leg_probe() {
  const huauv::VehicleConstants consts{};
  const huauv::VehicleParams params = huauv::make_vehicle_params(consts);
  const huauv::GainSet gains{};
  huauv::World w;
  w.bounds = {huauv::Vec3(-10.0, -10.0, -5.0), huauv::Vec3(10.0, 10.0, 10.0)};
  huauv::PlannerConfig cfg;

  huauv::VehicleState x;
  x.pos = huauv::Vec3(9.0, -9.0, -3.0);
  // a leg toward the exp2 goal direction
  const huauv::ReferenceCommand from{9.0, -9.0, -3.0, 0.0};
  const huauv::ReferenceCommand to{-9.0, 9.0, -2.0, 0.0};
  const huauv::RefSegment seg = huauv::connect_reference(from, to, 100, cfg);
  std::printf("leg end ref: %.3f %.3f %.3f psi %.3f\n", seg.back().x, seg.back().y, seg.back().z,
              seg.back().psi);
  const huauv::Propagation prop =
      huauv::propagate_segment(x, seg, params, gains, huauv::ControllerMemory{});
  std::printf("ok=%d\n", prop.ok);
  for (std::size_t i = 0; i < prop.states.size(); ++i) {
    const auto& s = prop.states[i];
    const bool free = huauv::is_free(s.pos, w);
    if (i % 10 == 0 || !free)
      std::printf("  k=%3zu pos %8.4f %8.4f %8.4f att %7.4f %7.4f %7.4f vel %7.3f %7.3f %7.3f %s\n",
                  i, s.pos.x(), s.pos.y(), s.pos.z(), s.att.x(), s.att.y(), s.att.z(), s.vel.x(),
                  s.vel.y(), s.vel.z(), free ? "" : "<-- NOT FREE");
    if (!free) break;
  }
  return 0;
}
}  // namespace

int main(int argc, char** argv) {
  const VehicleConstants consts{};
  const VehicleParams params = make_vehicle_params(consts);
  const GainSet gains{};

  const int mode = argc > 1 ? std::atoi(argv[1]) : 0;

  if (mode == 3) return leg_probe();
  if (mode == 2) return expand_probe();

  if (mode == 0) {
    // bare water closed loop chasing a moving reference, like a planner leg
    VehicleState x;
    x.pos = Vec3(9.0, -9.0, -3.0);
    ControllerMemory mem;
    // reference marches toward the exp2 goal direction at v_ref_water
    RefSegment seg;
    ReferenceCommand from{9.0, -9.0, -3.0, 0.0};
    ReferenceCommand to{8.6, -8.6, -3.0, 0.0};
    PlannerConfig cfg;
    for (int leg = 0; leg < 20; ++leg) {
      seg = connect_reference(from, to, 100, cfg);
      for (int i = 0; i < 100; ++i) {
        try {
          StepResult r = closed_loop_step(x, seg.at_step(i + 1), params, gains, mem, kDt);
          x = r.state;
          mem = r.memory;
        } catch (const std::exception& e) {
          std::printf("leg %d step %d: EXCEPTION %s\n", leg, i, e.what());
          std::printf("  pos %.3f %.3f %.3f att %.3f %.3f %.3f\n", x.pos.x(), x.pos.y(),
                      x.pos.z(), x.att.x(), x.att.y(), x.att.z());
          std::printf("  vel %.3f %.3f %.3f omega %.3f %.3f %.3f\n", x.vel.x(), x.vel.y(),
                      x.vel.z(), x.omega.x(), x.omega.y(), x.omega.z());
          return 1;
        }
      }
      std::printf(
          "leg %2d: pos %7.3f %7.3f %7.3f att %6.3f %6.3f %6.3f vel %6.3f %6.3f %6.3f om %6.2f %6.2f %6.2f\n",
          leg, x.pos.x(), x.pos.y(), x.pos.z(), x.att.x(), x.att.y(), x.att.z(), x.vel.x(),
          x.vel.y(), x.vel.z(), x.omega.x(), x.omega.y(), x.omega.z());
      from = seg.back();
      to = {from.x - 0.4, from.y + 0.4, -3.0, 0.0};
    }
    return 0;
  }

  // mode 1: run exp2-like mission without obstacles and report per tick
  Scenario s = builtin_scenario("exp2");
  s.obstacles.count = 0;
  s.executor.max_time = 40.0;
  const MissionSetup setup = make_setup(s);
  const MissionResult r = run_mission(setup);
  std::printf("success=%d elapsed=%.1f ticks=%zu\n", r.log.summary.success,
              r.log.summary.elapsed, r.log.ticks.size());
  for (const auto& tick : r.log.ticks) {
    std::printf("t=%5.1f event=%-7s pos %7.3f %7.3f %7.3f ref %7.3f %7.3f %7.3f\n", tick.t,
                event_name(tick.event), tick.state.pos.x(), tick.state.pos.y(),
                tick.state.pos.z(), tick.ref.x, tick.ref.y, tick.ref.z);
  }
  for (std::size_t i = 0; i < r.log.trace.size(); i += 25) {
    const auto& row = r.log.trace[i];
    std::printf("  t=%6.2f z=%7.3f att %6.3f %6.3f %6.3f vel %6.3f %6.3f %6.3f\n", row.t,
                row.state.pos.z(), row.state.att.x(), row.state.att.y(), row.state.att.z(),
                row.state.vel.x(), row.state.vel.y(), row.state.vel.z());
  }
  return 0;
}
