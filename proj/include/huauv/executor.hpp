#pragma once

#include "huauv/planner.hpp"

#include <cstdio>
#include <optional>
#include <vector>

namespace huauv {

struct ExecutorConfig {
  double period{1.0};        // planning tick [s]; must be a multiple of kDt
  int expansion_budget{200}; // sample attempts per tick
  double goal_radius{0.5};   // [m]
  double max_time{300.0};    // [s]
  bool perturb{false};       // run the plant with off-nominal mass/drag
  double perturb_mass_scale{1.05};
  double perturb_drag_scale{0.95};
};

enum class MissionEvent { Plan, Replan, Safety, TransitionEnter, TransitionExit, Goal };

inline const char* event_name(MissionEvent e) {
  switch (e) {
    case MissionEvent::Plan: return "plan";
    case MissionEvent::Replan: return "replan";
    case MissionEvent::Safety: return "safety";
    case MissionEvent::TransitionEnter: return "transition-enter";
    case MissionEvent::TransitionExit: return "transition-exit";
    case MissionEvent::Goal: return "goal";
  }
  return "?";
}

struct TickRecord {
  double t{0.0};
  VehicleState state;
  ReferenceCommand ref;
  Medium medium{Medium::Air};
  MissionEvent event{MissionEvent::Plan};
};

struct EventRecord {
  double t{0.0};
  MissionEvent kind{MissionEvent::Plan};
};

struct TraceRow {
  double t{0.0};
  VehicleState state;
  ReferenceCommand ref;
};

struct MissionSummary {
  bool success{false};
  double elapsed{0.0};
  double path_length{0.0};
  int transition_count{0};
  int air_to_water{0};
  int water_to_air{0};
  double time_in_air{0.0};
  double time_in_water{0.0};
  int ticks{0};
  std::size_t obstacles_known{0};
};

struct MissionLog {
  std::vector<TickRecord> ticks;   // one per planning period, timestamps step by the period
  std::vector<EventRecord> events; // transition/goal markers at sub-tick resolution
  std::vector<TraceRow> trace;     // dense executed trajectory, one row per control step
  MissionSummary summary;
};

/// Safe node with the least distance-to-goal (ties to the lower id); returns
/// the root->node id chain, or nothing when only the root (or unsafe nodes)
/// remain.
inline std::optional<std::vector<int>> select_best(const Tree& tree, const ReferenceCommand&) {
  int best = -1;
  double best_cost = 0.0;
  for (const auto& n : tree.nodes()) {
    if (!n.alive || !n.safe || n.id == tree.root()) continue;
    if (best < 0 || n.cost_to_go < best_cost) {
      best = n.id;
      best_cost = n.cost_to_go;
    }
  }
  if (best < 0) return std::nullopt;
  return tree.path_to(best);
}

namespace detail {

struct PathCheck {
  bool ok{true};
  int first_bad{-1};                // index into the path of the first failing leg
  std::vector<Propagation> legs;    // one per non-root path node, up to the failure
};

inline PathCheck repropagate_path(const std::vector<int>& path, const Tree& tree,
                                  const VehicleState& start, ControllerMemory memory,
                                  const World& w, const VehicleParams& vp, const GainSet& g,
                                  const PlannerConfig& cfg) {
  PathCheck out;
  VehicleState x = start;
  for (std::size_t i = 1; i < path.size(); ++i) {
    Propagation prop = propagate_segment(x, tree.node(path[i]).segment, vp, g, memory);
    const bool leg_ok = prop.ok && band_states_smooth(prop.states, w.mu, cfg) &&
                        trajectory_free_states(prop.states, w);
    x = prop.states.back();
    memory = prop.memory;
    out.legs.push_back(std::move(prop));
    if (!leg_ok) {
      out.ok = false;
      out.first_bad = static_cast<int>(i);
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Closed-loop re-propagation of a root->node chain from the committed state
/// against currently known obstacles, including the smoothness envelope on
/// any band crossing.
inline bool validate_path(const std::vector<int>& path, const Tree& tree,
                          const VehicleState& committed_state, const ControllerMemory& memory,
                          const World& w, const VehicleParams& vp, const GainSet& g,
                          const PlannerConfig& cfg) {
  if (path.empty()) throw std::invalid_argument("validate_path: empty path");
  return detail::repropagate_path(path, tree, committed_state, memory, w, vp, g, cfg).ok;
}

/// Removes every node whose stored trajectory intersects a known obstacle,
/// together with all its descendants. The root always survives. Returns the
/// number of nodes removed.
inline int prune(Tree& tree, const World& w) {
  const std::size_t before = tree.alive_count();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    TreeNode& n = tree.node(static_cast<int>(i));
    if (!n.alive || n.id == tree.root()) continue;
    if (!trajectory_free_states(n.states, w)) tree.kill_subtree(n.id);
  }
  return static_cast<int>(before - tree.alive_count());
}

struct MissionSetup {
  World world;  // ground truth; knowledge starts empty
  VehicleState start;
  ReferenceCommand goal;
  VehicleParams params;  // nominal model used by controllers and planner
  GainSet gains;
  PlannerConfig planner;
  ExecutorConfig executor;
  std::uint64_t seed{0};
};

struct MissionResult {
  MissionLog log;
  Tree tree;
  World world;  // final knowledge state
};

namespace detail {

inline VehicleParams perturbed_plant(const VehicleParams& nominal, const ExecutorConfig& ec) {
  VehicleParams p = nominal;
  for (MediumParams* mp : {&p.air, &p.water}) {
    mp->mass *= ec.perturb_mass_scale;
    mp->mass_eff *= ec.perturb_mass_scale;
    mp->drag_lin *= ec.perturb_drag_scale;
    mp->drag_rot *= ec.perturb_drag_scale;
  }
  return p;
}

}  // namespace detail

/// The execution loop: each period senses, predicts the committed state one
/// period ahead, expands the tree within the iteration budget, selects and
/// validates the best branch (pruning and reselecting on failure), then flies
/// the period while sensing continuously. Terminates at the goal radius or
/// the mission time limit.
inline MissionResult run_mission(const MissionSetup& setup) {
  const double period = setup.executor.period;
  const int leg_steps = static_cast<int>(std::llround(period / kDt));
  if (leg_steps <= 0) throw std::invalid_argument("run_mission: period shorter than a control step");

  PlannerConfig cfg = setup.planner;
  cfg.leg_steps = leg_steps;

  const VehicleParams& model = setup.params;
  const VehicleParams plant =
      setup.executor.perturb ? detail::perturbed_plant(model, setup.executor) : model;

  MissionResult out;
  out.world = setup.world;
  World& w = out.world;
  if (w.known.size() != w.obstacles.size()) w.known.assign(w.obstacles.size(), 0);

  MissionLog& log = out.log;
  Tree& tree = out.tree;
  Rng rng(setup.seed);

  VehicleState x = setup.start;
  x.wrap_attitude();
  ControllerMemory mem;

  const auto at_goal = [&](const VehicleState& s) {
    return (s.pos - setup.goal.position()).norm() <= setup.executor.goal_radius;
  };
  const auto hold_leg = [&](const VehicleState& s) {
    RefSegment leg;
    leg.append_hold(safety_action(s, medium_of(s.pos.z(), w.mu), w.mu, cfg.band_overshoot),
                    leg_steps);
    return leg;
  };

  double path_length = 0.0, time_air = 0.0, time_water = 0.0;
  int a2w = 0, w2a = 0;
  bool success = false, diverged = false;
  double end_time = 0.0;
  bool in_band_prev = in_transition_zone(x.pos.z(), w.mu);

  w.sense(x.pos);
  log.trace.push_back({0.0, x, {x.pos.x(), x.pos.y(), x.pos.z(), x.att.z()}});

  RefSegment current_leg = hold_leg(x);
  bool following_chain = false;
  bool need_reinit = false;
  int committed_node = -1;

  const int max_ticks = static_cast<int>(std::llround(setup.executor.max_time / period));

  if (at_goal(x)) {
    success = true;
    log.events.push_back({0.0, MissionEvent::Goal});
  }

  int tick = 0;
  while (!success && tick < max_ticks) {
    const double t_tick = tick * period;

    w.sense(x.pos);
    if (at_goal(x)) {
      success = true;
      end_time = t_tick;
      log.events.push_back({t_tick, MissionEvent::Goal});
      break;
    }

    // Predict the state one period ahead under the leg about to be flown,
    // re-checking it against knowledge gained since it was committed.
    bool aborted = false;
    Propagation pred = propagate_segment(x, current_leg, model, setup.gains, mem);
    if (!pred.ok || !trajectory_free_states(pred.states, w) ||
        !band_states_smooth(pred.states, w.mu, cfg)) {
      current_leg = hold_leg(x);
      following_chain = false;
      aborted = true;
      pred = propagate_segment(x, current_leg, model, setup.gains, mem);
      if (!pred.ok) {
        diverged = true;
        end_time = t_tick;
        break;
      }
    }
    const VehicleState x_pred = pred.states.back();
    const ControllerMemory mem_pred = pred.memory;

    // Root the tree at the predicted state. Following a committed edge moves
    // the root along it; otherwise (safety hold, recheck abort) the tree is
    // kept and the root is refreshed in place, so accumulated depth survives
    // hover ticks. Only a mid-leg guard trip discards the tree: the vehicle
    // has then left the predicted trajectory entirely.
    if (tree.initialized() && !need_reinit) {
      if (following_chain && committed_node >= 0 && tree.node(committed_node).alive)
        tree.advance_root(committed_node);
      TreeNode& root = tree.node(tree.root());
      root.end_state = x_pred;
      root.end_memory = mem_pred;
      root.ref_end = current_leg.back();
      root.states = detail::subsample_states(pred.states, cfg.state_stride);
      root.cost_to_go = cost_to_go(x_pred, setup.goal);
    } else {
      tree.init(x_pred, mem_pred, setup.goal);
      need_reinit = false;
    }

    const ExpandStats exp_stats =
        expand(tree, w, setup.goal, rng, setup.executor.expansion_budget, model, setup.gains, cfg);
#ifdef HUAUV_EXEC_TRACE
    std::printf("[expand] t=%5.1f added=%d unsafe=%d (div=%d band=%d coll=%d bounds=%d) tfail=%d\n",
                t_tick, exp_stats.nodes_added, exp_stats.unsafe_chains, exp_stats.unsafe_diverged,
                exp_stats.unsafe_band, exp_stats.unsafe_collision, exp_stats.unsafe_bounds,
                exp_stats.transition_failures);
#else
    (void)exp_stats;
#endif

    // Select the best branch; on validation failure cut the offending subtree,
    // prune against knowledge, and reselect.
    bool committed = false;
    int reselects = 0;
    int next_committed = -1;
    while (true) {
      const auto best = select_best(tree, setup.goal);
      if (!best) break;
      detail::PathCheck check =
          detail::repropagate_path(*best, tree, x_pred, mem_pred, w, model, setup.gains, cfg);
      if (check.ok) {
        for (std::size_t i = 1; i < best->size(); ++i) {
          TreeNode& n = tree.node((*best)[i]);
          const Propagation& leg = check.legs[i - 1];
          n.end_state = leg.states.back();
          n.end_memory = leg.memory;
          n.states = detail::subsample_states(leg.states, cfg.state_stride);
          n.cost_to_go = cost_to_go(n.end_state, setup.goal);
        }
        next_committed = (*best)[1];
        committed = true;
        break;
      }
      tree.kill_subtree((*best)[check.first_bad]);
      prune(tree, w);
      ++reselects;
    }

#ifdef HUAUV_EXEC_TRACE
    {
      std::size_t alive = 0, safe_cnt = 0;
      double best_cost = -1.0;
      for (const auto& n : tree.nodes()) {
        if (!n.alive) continue;
        ++alive;
        if (n.safe && n.id != tree.root()) {
          ++safe_cnt;
          if (best_cost < 0.0 || n.cost_to_go < best_cost) best_cost = n.cost_to_go;
        }
      }
      std::printf(
          "[trace] t=%5.1f alive=%zu safe=%zu best_ctg=%7.3f committed=%d reselects=%d aborted=%d\n",
          t_tick, alive, safe_cnt, best_cost, committed ? 1 : 0, reselects, aborted ? 1 : 0);
    }
#endif
    RefSegment next_leg;
    MissionEvent tick_event;
    bool next_following = false;
    if (committed) {
      next_leg = tree.node(next_committed).segment;
      next_following = true;
      tick_event = (aborted || reselects > 0) ? MissionEvent::Replan : MissionEvent::Plan;
    } else {
      next_leg = hold_leg(x_pred);
      tick_event = MissionEvent::Safety;
    }

    log.ticks.push_back(
        {t_tick, x, current_leg.front(), medium_of(x.pos.z(), w.mu), tick_event});

    // Fly the period on the (possibly perturbed) plant with continuous
    // sensing; a known-set violation mid-leg falls back to holding pose.
    bool guard_tripped = false;
    ReferenceCommand guard_ref;
    for (int i = 0; i < leg_steps; ++i) {
      const ReferenceCommand ref = guard_tripped ? guard_ref : current_leg.at_step(i + 1);
      const Vec3 prev_pos = x.pos;
      const double prev_z = x.pos.z();
      try {
        StepResult sr = closed_loop_step(x, ref, model, plant, setup.gains, std::move(mem), kDt);
        x = sr.state;
        mem = std::move(sr.memory);
      } catch (const std::exception&) {
        diverged = true;
        end_time = t_tick + i * kDt;
        break;
      }
      const double t_now = t_tick + (i + 1) * kDt;
      log.trace.push_back({t_now, x, ref});
      path_length += (x.pos - prev_pos).norm();
      (x.pos.z() > 0.0 ? time_air : time_water) += kDt;
      w.sense(x.pos);

      const bool in_band = in_transition_zone(x.pos.z(), w.mu);
      if (in_band && !in_band_prev) log.events.push_back({t_now, MissionEvent::TransitionEnter});
      if (!in_band && in_band_prev) log.events.push_back({t_now, MissionEvent::TransitionExit});
      in_band_prev = in_band;
      if (prev_z > 0.0 && x.pos.z() <= 0.0) ++a2w;
      if (prev_z <= 0.0 && x.pos.z() > 0.0) ++w2a;

      if (at_goal(x)) {
        success = true;
        end_time = t_now;
        log.events.push_back({t_now, MissionEvent::Goal});
        break;
      }
      if (!guard_tripped && !is_free(x.pos, w)) {
        guard_tripped = true;
        guard_ref = safety_action(x, medium_of(x.pos.z(), w.mu), w.mu, cfg.band_overshoot);
        log.events.push_back({t_now, MissionEvent::Safety});
      }
    }
    if (success || diverged) break;

    if (guard_tripped) {
      current_leg = hold_leg(x);
      following_chain = false;
      need_reinit = true;
    } else {
      current_leg = next_leg;
      following_chain = next_following;
      committed_node = next_committed;
    }
    ++tick;
  }

  if (!success && !diverged) end_time = max_ticks * period;

  MissionSummary& s = log.summary;
  s.success = success;
  s.elapsed = end_time;
  s.path_length = path_length;
  s.air_to_water = a2w;
  s.water_to_air = w2a;
  s.transition_count = a2w + w2a;
  s.time_in_air = time_air;
  s.time_in_water = time_water;
  s.ticks = static_cast<int>(log.ticks.size());
  s.obstacles_known = w.known_count();
  return out;
}

}  // namespace huauv
