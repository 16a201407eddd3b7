#pragma once

#include "huauv/control.hpp"
#include "huauv/reference.hpp"
#include "huauv/world.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace huauv {

struct PlannerConfig {
  double goal_bias{0.1};
  double v_ref_air{1.0};    // reference travel speed [m/s]
  double v_ref_water{0.4};
  double v_vertical{0.3};   // transition crossing speed [m/s]
  int k_nearest{5};         // candidate fan-out per sample
  int leg_steps{100};       // control periods per tree edge (= executor period)
  double sample_z_margin{0.5};
  double water_turn_rate{0.35};  // [rad/s] in-place yaw slew for misaligned water legs
  double water_turn_tol{0.3};    // [rad] heading error beyond which a leg only turns

  // smooth-crossing envelope
  double v_lat_max{0.05};                  // [m/s] inside the band
  double tilt_max_band{2.0 * kPi / 180.0}; // [rad] inside the band
  double band_overshoot{1.25};             // crossing references extend past the band

  // transition-builder settle thresholds and timeouts
  double settle_v_lat{0.03};
  double settle_tilt{kPi / 180.0};
  double settle_vz{0.15};
  double pin_radius{0.4};
  double settle_timeout{12.0};   // [s]
  double exit_timeout{15.0};     // [s]
  int max_transition_builds{20}; // per expand() call

  double stop_check_time{2.0};   // verified stoppable-endpoint horizon [s]
  int state_stride{10};          // stored-state subsampling
};

/// One CL-RRT node: a reference leg plus the closed-loop state trajectory it
/// produced, with the controller memory needed to continue from its end.
struct TreeNode {
  int id{-1};
  int parent{-1};
  std::vector<int> children;
  ReferenceCommand ref_end;
  RefSegment segment;
  std::vector<VehicleState> states;  // subsampled, first = leg start, last = end_state
  VehicleState end_state;
  ControllerMemory end_memory;
  ControlMode medium{ControlMode::Air};
  bool safe{true};
  bool transition{false};
  bool alive{true};
  double cost_to_go{0.0};
  double path_cost{0.0};
};

inline double cost_to_go(const VehicleState& end_state, const ReferenceCommand& goal) {
  return (end_state.pos - goal.position()).norm();
}

class Tree {
 public:
  Tree() = default;

  void init(const VehicleState& root_state, const ControllerMemory& memory,
            const ReferenceCommand& goal) {
    nodes_.clear();
    TreeNode root;
    root.id = 0;
    root.ref_end = {root_state.pos.x(), root_state.pos.y(), root_state.pos.z(),
                    root_state.att.z()};
    root.states = {root_state};
    root.end_state = root_state;
    root.end_memory = memory;
    root.medium = model_for_z(root_state.pos.z());
    root.cost_to_go = huauv::cost_to_go(root_state, goal);
    nodes_.push_back(std::move(root));
    root_ = 0;
  }

  bool initialized() const { return !nodes_.empty(); }
  int root() const { return root_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  TreeNode& node(int id) { return nodes_[id]; }
  const TreeNode& node(int id) const { return nodes_[id]; }

  int add_node(TreeNode n) {
    n.id = static_cast<int>(nodes_.size());
    nodes_[n.parent].children.push_back(n.id);
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  std::size_t alive_count() const {
    std::size_t n = 0;
    for (const auto& nd : nodes_) n += nd.alive;
    return n;
  }

  void kill_subtree(int id) {
    std::vector<int> stack{id};
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      nodes_[cur].alive = false;
      for (int c : nodes_[cur].children) stack.push_back(c);
    }
  }

  /// Moves the root to one of its children (the committed leg) and discards
  /// every other branch hanging off the old root.
  void advance_root(int child_id) {
    TreeNode& old_root = nodes_[root_];
    for (int c : old_root.children)
      if (c != child_id) kill_subtree(c);
    old_root.alive = false;
    nodes_[child_id].parent = -1;
    root_ = child_id;
  }

  /// Reference chain root -> id.
  std::vector<int> path_to(int id) const {
    std::vector<int> out;
    for (int cur = id; cur != -1; cur = nodes_[cur].parent) out.push_back(cur);
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<TreeNode> nodes_;
  int root_{0};
};

/// Goal with probability `bias`, otherwise uniform over the bounds with z
/// rejected until it clears the transition band by `z_margin`; yaw uniform
/// in (-pi, pi].
inline ReferenceCommand sample_reference(const World& w, const ReferenceCommand& goal, double bias,
                                         Rng& rng, double z_margin = 0.0) {
  if (bias < 0.0 || bias > 1.0) throw std::invalid_argument("sample_reference: bias outside [0,1]");
  if (bias > 0.0 && rng.uniform() < bias) return goal;
  ReferenceCommand r;
  r.x = rng.uniform(w.bounds.lo.x(), w.bounds.hi.x());
  r.y = rng.uniform(w.bounds.lo.y(), w.bounds.hi.y());
  const double keepout = w.mu + z_margin;
  int guard = 0;
  do {
    if (++guard > 1000)
      throw std::invalid_argument("sample_reference: z range lies inside the transition band");
    r.z = rng.uniform(w.bounds.lo.z(), w.bounds.hi.z());
  } while (std::abs(r.z) <= keepout);
  r.psi = wrap_angle(rng.uniform(-kPi, kPi));
  return r;
}

namespace detail {

inline std::vector<int> candidates_by_distance(const Tree& tree, const Vec3& sample_pos, int k) {
  std::vector<std::pair<double, int>> order;
  order.reserve(tree.size());
  for (const auto& n : tree.nodes())
    if (n.alive) order.emplace_back((n.ref_end.position() - sample_pos).squaredNorm(), n.id);
  const auto cmp = [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second < b.second;
  };
  if (k > 0 && static_cast<std::size_t>(k) < order.size()) {
    std::partial_sort(order.begin(), order.begin() + k, order.end(), cmp);
    order.resize(k);
  } else {
    std::sort(order.begin(), order.end(), cmp);
  }
  std::vector<int> ids;
  ids.reserve(order.size());
  for (const auto& [d, id] : order) ids.push_back(id);
  return ids;
}

}  // namespace detail

/// All live nodes ordered by ascending distance of ref_end to the sample,
/// ties broken by lower id.
inline std::vector<int> sort_candidate_nodes(const Tree& tree, const Vec3& sample_pos) {
  return detail::candidates_by_distance(tree, sample_pos, 0);
}

inline std::vector<int> nearest_candidates(const Tree& tree, const Vec3& sample_pos, int k) {
  return detail::candidates_by_distance(tree, sample_pos, k);
}

/// Straight-line leg of exactly `steps` periods from `from` toward `to` at the
/// medium's reference speed: truncated at reach if `to` is farther, otherwise
/// reaching `to` and holding there. Yaw turns toward the travel bearing.
/// Under water a badly misaligned leg first turns in place: the hull is
/// nonholonomic there and the surge law chases any moving reference, so the
/// reference must hold position until the heading roughly matches the bearing.
inline RefSegment connect_reference(const ReferenceCommand& from, const ReferenceCommand& to,
                                    int steps, const PlannerConfig& cfg) {
  if (steps <= 0) throw std::invalid_argument("connect_reference: steps must be positive");
  const double v_ref = from.z > 0.0 ? cfg.v_ref_air : cfg.v_ref_water;
  const Vec3 delta = to.position() - from.position();
  const double dist = delta.norm();

  RefSegment seg;
  if (dist <= 1e-12) {
    seg.append_hold(to, steps);
    return seg;
  }
  const double planar = std::hypot(delta.x(), delta.y());
  const double psi_target = planar > 0.1 ? std::atan2(delta.y(), delta.x()) : to.psi;

  if (from.z <= 0.0 && planar > kBearingSwitch) {
    const double turn = wrap_angle(psi_target - from.psi);
    if (std::abs(turn) > cfg.water_turn_tol) {
      const double slew = cfg.water_turn_rate * steps * kDt;
      ReferenceCommand spun = from;
      spun.psi = wrap_angle(from.psi + std::clamp(turn, -slew, slew));
      seg.append_line(from, spun, steps);
      return seg;
    }
  }

  const double reach = v_ref * steps * kDt;
  if (dist <= reach) {
    int travel = std::max<int>(1, static_cast<int>(std::llround(dist / (v_ref * kDt))));
    travel = std::min(travel, steps);
    ReferenceCommand end = to;
    end.psi = psi_target;
    seg.append_line(from, end, travel);
    if (travel < steps) seg.append_hold(end, steps - travel);
  } else {
    ReferenceCommand end;
    const Vec3 p = from.position() + delta * (reach / dist);
    end.x = p.x();
    end.y = p.y();
    end.z = p.z();
    end.psi = psi_target;
    seg.append_line(from, end, steps);
  }
  return seg;
}

struct Propagation {
  std::vector<VehicleState> states;  // dense; states[0] is the start state
  ControllerMemory memory;
  bool ok{true};
};

/// Closed-loop rollout of a reference segment at the control period; the
/// model switches per step with the sign of z. Divergence or a controller
/// singularity marks the propagation failed.
inline Propagation propagate_segment(const VehicleState& start, const RefSegment& seg,
                                     const VehicleParams& vp, const GainSet& g,
                                     ControllerMemory memory) {
  if (!start.finite()) throw std::invalid_argument("propagate_segment: non-finite start state");
  Propagation out;
  out.states.reserve(seg.total_steps() + 1);
  out.states.push_back(start);
  VehicleState x = start;
  try {
    for (int i = 0; i < seg.total_steps(); ++i) {
      StepResult r = closed_loop_step(x, seg.at_step(i + 1), vp, g, std::move(memory), kDt);
      x = r.state;
      memory = std::move(r.memory);
      out.states.push_back(x);
    }
  } catch (const IntegrationError&) {
    out.ok = false;
  } catch (const SingularAttitudeError&) {
    out.ok = false;
  }
  out.memory = std::move(memory);
  return out;
}

/// True iff every state inside the band respects the lateral-speed and tilt
/// envelope.
inline bool band_states_smooth(const std::vector<VehicleState>& states, double mu,
                               const PlannerConfig& cfg) {
  for (const auto& s : states) {
    if (std::abs(s.pos.z()) > mu) continue;
    if (std::abs(s.vel.x()) > cfg.v_lat_max || std::abs(s.vel.y()) > cfg.v_lat_max) return false;
    if (std::abs(s.att.x()) > cfg.tilt_max_band || std::abs(s.att.y()) > cfg.tilt_max_band)
      return false;
  }
  return true;
}

struct ExpandStats {
  int attempts{0};
  int nodes_added{0};
  int rejected_collision{0};
  int rejected_smoothness{0};
  int rejected_divergence{0};
  int transition_failures{0};
  int unsafe_chains{0};
  int unsafe_diverged{0};
  int unsafe_band{0};
  int unsafe_collision{0};
  int unsafe_bounds{0};
};

/// Fallback reference when no validated trajectory exists: hold pose in air
/// or water, continue out of the band vertically when caught inside it (to
/// the side the vertical velocity already points at).
inline ReferenceCommand safety_action(const VehicleState& x, Medium medium, double mu,
                                      double overshoot = 1.25) {
  ReferenceCommand r{x.pos.x(), x.pos.y(), x.pos.z(), x.att.z()};
  if (medium == Medium::Transition) {
    double side;
    if (x.vel.z() < 0.0) side = -1.0;
    else if (x.vel.z() > 0.0) side = +1.0;
    else side = x.pos.z() >= 0.0 ? +1.0 : -1.0;
    r.z = side * mu * overshoot;
  }
  return r;
}

struct TransitionBuild {
  RefSegment segment;
  bool ok{false};
};

/// Builds the vertical media-crossing reference: approach the point where the
/// leg meets the band edge, hover until lateral speed and tilt die out, pin
/// the lateral reference to the settled position, cross vertically to
/// overshoot * mu on the far side, hold until depth converges, then resume
/// toward the target. Fails (ok=false) if the closed loop cannot settle, the
/// crossing never converges, or any in-band state breaks the envelope.
inline TransitionBuild enforce_vertical_transition(const ReferenceCommand& from_ref,
                                                   const ReferenceCommand& to_ref,
                                                   const VehicleState& start,
                                                   const ControllerMemory& start_memory,
                                                   const VehicleParams& vp, const GainSet& g,
                                                   const PlannerConfig& cfg, double mu) {
  TransitionBuild out;
  const double hold_z_mag = mu * cfg.band_overshoot;
  const int exit_side = to_ref.z >= 0.0 ? +1 : -1;
  const int from_side = from_ref.z >= 0.0 ? +1 : -1;
  const bool already_vertical = std::abs(from_ref.z) <= hold_z_mag + 1e-9;

  RefSegment seg;
  std::vector<VehicleState> trace;
  trace.push_back(start);
  VehicleState x = start;
  ControllerMemory mem = start_memory;
  int consumed = 0;

  const auto run_pending = [&]() -> bool {
    while (consumed < seg.total_steps()) {
      try {
        StepResult r = closed_loop_step(x, seg.at_step(consumed + 1), vp, g, std::move(mem), kDt);
        x = r.state;
        mem = std::move(r.memory);
      } catch (const IntegrationError&) {
        return false;
      } catch (const SingularAttitudeError&) {
        return false;
      }
      trace.push_back(x);
      ++consumed;
    }
    return true;
  };

  // Simulates holding `ref` until `done(x)`, appending the hold piece that was
  // actually needed. Fails on timeout.
  const auto hold_until = [&](const ReferenceCommand& ref, double timeout,
                              const auto& done) -> bool {
    const int budget = static_cast<int>(std::llround(timeout / kDt));
    int used = 0;
    while (!done(x)) {
      if (used >= budget) return false;
      try {
        StepResult r = closed_loop_step(x, ref, vp, g, std::move(mem), kDt);
        x = r.state;
        mem = std::move(r.memory);
      } catch (const IntegrationError&) {
        return false;
      } catch (const SingularAttitudeError&) {
        return false;
      }
      trace.push_back(x);
      ++used;
    }
    if (used > 0) {
      seg.append_hold(ref, used);
      consumed += used;
    }
    return true;
  };

  double cross_x = from_ref.x, cross_y = from_ref.y;
  double cross_psi = from_ref.psi;
  double cross_z_start = from_ref.z;

  if (!already_vertical) {
    // entry point: where the from->to line meets the band edge on this side
    const Vec3 a = from_ref.position();
    const Vec3 b = to_ref.position();
    if (std::abs(b.z() - a.z()) > 1e-9) {
      const double tc = std::clamp((from_side * mu - a.z()) / (b.z() - a.z()), 0.0, 1.0);
      cross_x = a.x() + tc * (b.x() - a.x());
      cross_y = a.y() + tc * (b.y() - a.y());
    }
    const double planar = std::hypot(to_ref.x - cross_x, to_ref.y - cross_y);
    cross_psi = planar > 0.1 ? std::atan2(to_ref.y - cross_y, to_ref.x - cross_x) : from_ref.psi;
    cross_z_start = from_side * hold_z_mag;

    const ReferenceCommand hold{cross_x, cross_y, cross_z_start, cross_psi};
    const double v_ref = from_side > 0 ? cfg.v_ref_air : cfg.v_ref_water;
    const double dist = (hold.position() - from_ref.position()).norm();
    if (dist > 1e-9) {
      const int travel = std::max<int>(1, static_cast<int>(std::llround(dist / (v_ref * kDt))));
      seg.append_line(from_ref, hold, travel);
      if (!run_pending()) return out;
    }

    const auto settled = [&](const VehicleState& s) {
      return std::abs(s.vel.x()) <= cfg.settle_v_lat && std::abs(s.vel.y()) <= cfg.settle_v_lat &&
             std::abs(s.att.x()) <= cfg.settle_tilt && std::abs(s.att.y()) <= cfg.settle_tilt &&
             std::abs(s.vel.z()) <= cfg.settle_vz &&
             std::hypot(s.pos.x() - cross_x, s.pos.y() - cross_y) <= cfg.pin_radius;
    };
    if (!hold_until(hold, cfg.settle_timeout, settled)) return out;

    // Pin the lateral reference to the settled pose; a forward-only surge law
    // must see d ~ 0 while crossing or it injects lateral speed in the band.
    cross_x = x.pos.x();
    cross_y = x.pos.y();
    cross_psi = x.att.z();
    cross_z_start = from_side * hold_z_mag;
  }

  const double exit_z = exit_side * hold_z_mag;
  const ReferenceCommand cross_from{cross_x, cross_y, cross_z_start, cross_psi};
  const ReferenceCommand cross_to{cross_x, cross_y, exit_z, cross_psi};
  const double span = std::abs(exit_z - cross_z_start);
  if (span > 1e-9) {
    const int cross_steps =
        std::max<int>(1, static_cast<int>(std::llround(span / (cfg.v_vertical * kDt))));
    seg.append_line(cross_from, cross_to, cross_steps);
    if (!run_pending()) return out;
  }

  const auto arrived = [&](const VehicleState& s) {
    return (s.pos.z() - exit_z) * exit_side > -0.3 && std::abs(s.pos.z()) > mu &&
           std::abs(s.vel.z()) <= 0.25 && std::abs(s.vel.x()) <= cfg.v_lat_max &&
           std::abs(s.vel.y()) <= cfg.v_lat_max;
  };
  if (!hold_until(cross_to, cfg.exit_timeout, arrived)) return out;

  // resume toward the target in the new medium
  seg.extend(connect_reference(cross_to, to_ref, cfg.leg_steps, cfg));
  if (!run_pending()) return out;

  // pad to a whole number of tree legs
  const int rem = seg.total_steps() % cfg.leg_steps;
  if (rem != 0) {
    seg.append_hold(seg.back(), cfg.leg_steps - rem);
    if (!run_pending()) return out;
  }

  if (!band_states_smooth(trace, mu, cfg)) return out;
  out.segment = std::move(seg);
  out.ok = true;
  return out;
}

namespace detail {

inline std::vector<VehicleState> subsample_states(const std::vector<VehicleState>& dense,
                                                  int stride) {
  std::vector<VehicleState> out;
  out.reserve(dense.size() / stride + 2);
  for (std::size_t i = 0; i < dense.size(); i += stride) out.push_back(dense[i]);
  if ((dense.size() - 1) % stride != 0) out.push_back(dense.back());
  return out;
}

inline double polyline_length(const std::vector<VehicleState>& pts) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) len += (pts[i + 1].pos - pts[i].pos).norm();
  return len;
}

/// Verified stoppable endpoint: holding the terminal reference for the stop
/// horizon stays collision-free and inside the smoothness envelope. A
/// distance pre-filter skips the rollout when no known obstacle or wall can
/// possibly be reached within the horizon.
inline bool stoppable_endpoint(const VehicleState& x, const ControllerMemory& mem,
                               const ReferenceCommand& hold, const World& w,
                               const VehicleParams& vp, const GainSet& g,
                               const PlannerConfig& cfg, int* why = nullptr) {
  const double reach = 3.0 + cfg.stop_check_time * x.vel.norm();
  bool anything_near = false;
  for (std::size_t i = 0; i < w.obstacles.size() && !anything_near; ++i) {
    if (!w.known[i]) continue;
    const double gap =
        (w.obstacles[i].center - x.pos).norm() - w.obstacles[i].radius - w.vehicle_radius;
    anything_near = gap < reach;
  }
  if (!anything_near) {
    const Vec3 to_lo = x.pos - w.bounds.lo;
    const Vec3 to_hi = w.bounds.hi - x.pos;
    anything_near = to_lo.minCoeff() < reach || to_hi.minCoeff() < reach;
  }
  if (!anything_near && std::abs(x.pos.z()) > w.mu + reach) return true;

  // loiter where the trajectory actually stops; chasing the reference point
  // from a misaligned heading is exactly what a stopped vehicle must not do
  const ReferenceCommand station = safety_action(x, medium_of(x.pos.z(), w.mu), w.mu,
                                                 cfg.band_overshoot);
  (void)hold;
  RefSegment s;
  s.append_hold(station, static_cast<int>(std::llround(cfg.stop_check_time / kDt)));
  const Propagation prop = propagate_segment(x, s, vp, g, mem);
  if (why) {
    if (!prop.ok) *why = 1;
    else if (!band_states_smooth(prop.states, w.mu, cfg)) *why = 2;
    else if (!trajectory_free_states(prop.states, w)) *why = 3;
    else *why = 0;
    if (*why == 3) {
      for (const auto& st : prop.states)
        if (!w.bounds.contains(st.pos)) { *why = 4; break; }
    }
  }
  return prop.ok && band_states_smooth(prop.states, w.mu, cfg) &&
         trajectory_free_states(prop.states, w);
}

/// Attempts one connection from a tree node toward a sample. Returns the
/// number of nodes added (0 on failure).
inline int try_connect(Tree& tree, int from_id, const ReferenceCommand& sample,
                       const ReferenceCommand& goal, const World& w, const VehicleParams& vp,
                       const GainSet& g, const PlannerConfig& cfg, int& transition_budget,
                       ExpandStats& stats) {
  const auto side = [&](double z) { return z > w.mu ? +1 : (z < -w.mu ? -1 : 0); };

  RefSegment seg = connect_reference(tree.node(from_id).ref_end, sample, cfg.leg_steps, cfg);
  const int s_from = side(tree.node(from_id).ref_end.z);
  const int s_end = side(seg.back().z);
  const bool crossing = s_from == 0 || s_from != s_end;
  if (crossing) {
    if (transition_budget <= 0) return 0;
    --transition_budget;
    TransitionBuild built =
        enforce_vertical_transition(tree.node(from_id).ref_end, sample, tree.node(from_id).end_state,
                                    tree.node(from_id).end_memory, vp, g, cfg, w.mu);
    if (!built.ok) {
      ++stats.transition_failures;
      return 0;
    }
    seg = std::move(built.segment);
  }

  struct PendingNode {
    RefSegment leg;
    std::vector<VehicleState> sparse;
    VehicleState end;
    ControllerMemory memory;
  };
  const int n_legs = seg.total_steps() / cfg.leg_steps;
  std::vector<PendingNode> pending;
  pending.reserve(n_legs);

  VehicleState x = tree.node(from_id).end_state;
  ControllerMemory mem = tree.node(from_id).end_memory;
  for (int leg = 0; leg < n_legs; ++leg) {
    RefSegment piece = seg.slice(leg * cfg.leg_steps, (leg + 1) * cfg.leg_steps);
    Propagation prop = propagate_segment(x, piece, vp, g, mem);
    if (!prop.ok) {
      ++stats.rejected_divergence;
      return 0;
    }
    if (!band_states_smooth(prop.states, w.mu, cfg)) {
      ++stats.rejected_smoothness;
      return 0;
    }
    if (!trajectory_free_states(prop.states, w)) {
      ++stats.rejected_collision;
      return 0;
    }
    PendingNode p;
    p.leg = std::move(piece);
    p.sparse = subsample_states(prop.states, cfg.state_stride);
    p.end = prop.states.back();
    p.memory = prop.memory;
    x = p.end;
    mem = p.memory;
    pending.push_back(std::move(p));
  }
  if (pending.empty()) return 0;

  int why = 0;
  const bool safe = stoppable_endpoint(x, mem, seg.back(), w, vp, g, cfg, &why);
  if (!safe) {
    ++stats.unsafe_chains;
    if (why == 1) ++stats.unsafe_diverged;
    if (why == 2) ++stats.unsafe_band;
    if (why == 3) ++stats.unsafe_collision;
    if (why == 4) ++stats.unsafe_bounds;
  }

  int parent = from_id;
  double path_cost = tree.node(from_id).path_cost;
  for (auto& p : pending) {
    TreeNode n;
    n.parent = parent;
    n.segment = std::move(p.leg);
    n.ref_end = n.segment.back();
    n.states = std::move(p.sparse);
    n.end_state = p.end;
    n.end_memory = p.memory;
    n.medium = model_for_z(p.end.pos.z());
    n.safe = safe;
    n.transition = crossing;
    n.cost_to_go = huauv::cost_to_go(p.end, goal);
    path_cost += polyline_length(n.states);
    n.path_cost = path_cost;
    parent = tree.add_node(std::move(n));
  }
  return static_cast<int>(pending.size());
}

}  // namespace detail

/// One expansion round: `budget` sample attempts, each trying the k nearest
/// live nodes in order until a connection sticks. Crossing legs go through
/// the vertical-transition builder; colliding legs are discarded whole;
/// collision-free legs whose endpoint cannot be verified stoppable are kept
/// but marked unsafe.
inline ExpandStats expand(Tree& tree, const World& w, const ReferenceCommand& goal, Rng& rng,
                          int budget, const VehicleParams& vp, const GainSet& g,
                          const PlannerConfig& cfg) {
  if (budget <= 0) throw std::invalid_argument("expand: budget must be positive");
  ExpandStats stats;
  int transition_budget = cfg.max_transition_builds;
  for (int attempt = 0; attempt < budget; ++attempt) {
    ++stats.attempts;
    const ReferenceCommand sample =
        sample_reference(w, goal, cfg.goal_bias, rng, cfg.sample_z_margin);
    for (int id : nearest_candidates(tree, sample.position(), cfg.k_nearest)) {
      const int added =
          detail::try_connect(tree, id, sample, goal, w, vp, g, cfg, transition_budget, stats);
      if (added > 0) {
        stats.nodes_added += added;
        break;
      }
    }
  }
  return stats;
}

}  // namespace huauv
