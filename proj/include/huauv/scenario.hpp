#pragma once

#include "huauv/executor.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace huauv {

using Json = nlohmann::json;

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Obstacle field description: either a seeded random layout or an explicit
/// list.
struct ObstacleSpec {
  bool generated{true};
  std::uint64_t seed{1};
  int count{20};
  double radius_min{0.5};
  double radius_max{1.5};
  double clearance{1.0};  // extra start/goal keep-out beyond the vehicle radius
  std::vector<Obstacle> explicit_list;
};

/// Complete mission description; every field has a default so a scenario file
/// only needs to name what it changes.
struct Scenario {
  std::uint64_t seed{1};
  Aabb bounds{Vec3(-10.0, -10.0, -5.0), Vec3(10.0, 10.0, 10.0)};
  double mu{0.8};
  double sense_radius{3.0};
  double vehicle_radius{0.4};
  ObstacleSpec obstacles;
  VehicleState start;
  ReferenceCommand goal;
  GainSet gains;
  VehicleConstants constants;
  DragFrame drag_frame{DragFrame::Body};
  double rotor_limit{1.0e4};
  PlannerConfig planner;
  ExecutorConfig executor;
};

namespace detail {

inline Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3_from(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw ScenarioError("expected a 3-element array");
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

inline Json to_json(const Mat3& m) {
  Json rows = Json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(Json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return rows;
}

inline Mat3 mat3_from(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw ScenarioError("expected a 3x3 array");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    const auto& row = j.at(r);
    if (!row.is_array() || row.size() != 3) throw ScenarioError("expected a 3x3 array");
    for (int c = 0; c < 3; ++c) m(r, c) = row.at(c).get<double>();
  }
  return m;
}

template <typename T>
void read_if(const Json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

inline void read_if_vec3(const Json& j, const char* key, Vec3& dst) {
  if (j.contains(key)) dst = vec3_from(j.at(key));
}

inline void read_if_mat3(const Json& j, const char* key, Mat3& dst) {
  if (j.contains(key)) dst = mat3_from(j.at(key));
}

inline Json gains_json(const GainSet& g) {
  return Json{{"altitude", {{"p", g.altitude.p}, {"i", g.altitude.i}, {"d", g.altitude.d}}},
              {"attitude", {{"p", g.attitude.p}, {"i", g.attitude.i}, {"d", g.attitude.d}}},
              {"position", {{"p", g.pos_p}, {"d", g.pos_d}}},
              {"surge", {{"dist", g.surge_dist}, {"align", g.surge_align}}}};
}

inline void gains_from(const Json& j, GainSet& g) {
  if (j.contains("altitude")) {
    const auto& a = j.at("altitude");
    read_if(a, "p", g.altitude.p);
    read_if(a, "i", g.altitude.i);
    read_if(a, "d", g.altitude.d);
  }
  if (j.contains("attitude")) {
    const auto& a = j.at("attitude");
    read_if(a, "p", g.attitude.p);
    read_if(a, "i", g.attitude.i);
    read_if(a, "d", g.attitude.d);
  }
  if (j.contains("position")) {
    const auto& a = j.at("position");
    read_if(a, "p", g.pos_p);
    read_if(a, "d", g.pos_d);
  }
  if (j.contains("surge")) {
    const auto& a = j.at("surge");
    read_if(a, "dist", g.surge_dist);
    read_if(a, "align", g.surge_align);
  }
}

}  // namespace detail

inline Json scenario_to_json(const Scenario& s) {
  Json j;
  j["seed"] = s.seed;
  j["world"] = {{"bounds_min", detail::to_json(s.bounds.lo)},
                {"bounds_max", detail::to_json(s.bounds.hi)},
                {"mu", s.mu},
                {"sense_radius", s.sense_radius},
                {"vehicle_radius", s.vehicle_radius}};

  Json ob;
  if (s.obstacles.generated) {
    ob = {{"mode", "generate"},
          {"seed", s.obstacles.seed},
          {"count", s.obstacles.count},
          {"radius_min", s.obstacles.radius_min},
          {"radius_max", s.obstacles.radius_max},
          {"clearance", s.obstacles.clearance}};
  } else {
    Json list = Json::array();
    for (const auto& o : s.obstacles.explicit_list)
      list.push_back({{"center", detail::to_json(o.center)}, {"radius", o.radius}});
    ob = {{"mode", "explicit"}, {"list", std::move(list)}};
  }
  j["obstacles"] = std::move(ob);

  j["start"] = {{"position", detail::to_json(s.start.pos)},
                {"attitude", detail::to_json(s.start.att)},
                {"velocity", detail::to_json(s.start.vel)},
                {"body_rates", detail::to_json(s.start.omega)}};
  j["goal"] = {{"position", detail::to_json(s.goal.position())}, {"psi", s.goal.psi}};
  j["gains"] = detail::gains_json(s.gains);

  const VehicleConstants& c = s.constants;
  j["physics"] = {{"mass", c.mass},
                  {"gravity", detail::to_json(c.gravity)},
                  {"arm", c.arm},
                  {"metacentric", c.metacentric},
                  {"volume", c.volume},
                  {"drag_lin_diag", detail::to_json(c.drag_lin_diag)},
                  {"drag_rot_diag", detail::to_json(c.drag_rot_diag)},
                  {"inertia", detail::to_json(c.inertia)},
                  {"air",
                   {{"rho", c.rho_air},
                    {"mass_eff", c.mass_eff_air},
                    {"inertia_eff", detail::to_json(c.inertia_eff_air)},
                    {"thrust_coeff", c.thrust_coeff_air},
                    {"counter_torque", c.counter_torque_air}}},
                  {"water",
                   {{"rho", c.rho_water},
                    {"mass_eff", c.mass_eff_water},
                    {"inertia_eff", detail::to_json(c.inertia_eff_water)},
                    {"thrust_coeff", c.thrust_coeff_water},
                    {"counter_torque", c.counter_torque_water}}},
                  {"drag_frame", s.drag_frame == DragFrame::World ? "world" : "body"},
                  {"rotor_limit", s.rotor_limit}};

  const PlannerConfig& p = s.planner;
  j["planner"] = {{"goal_bias", p.goal_bias},
                  {"v_ref_air", p.v_ref_air},
                  {"v_ref_water", p.v_ref_water},
                  {"v_vertical", p.v_vertical},
                  {"k_nearest", p.k_nearest},
                  {"sample_z_margin", p.sample_z_margin},
                  {"v_lat_max", p.v_lat_max},
                  {"tilt_max_band", p.tilt_max_band},
                  {"band_overshoot", p.band_overshoot},
                  {"settle_v_lat", p.settle_v_lat},
                  {"settle_tilt", p.settle_tilt},
                  {"settle_vz", p.settle_vz},
                  {"pin_radius", p.pin_radius},
                  {"settle_timeout", p.settle_timeout},
                  {"exit_timeout", p.exit_timeout},
                  {"max_transition_builds", p.max_transition_builds},
                  {"stop_check_time", p.stop_check_time},
                  {"state_stride", p.state_stride}};

  const ExecutorConfig& e = s.executor;
  j["executor"] = {{"period", e.period},
                   {"expansion_budget", e.expansion_budget},
                   {"goal_radius", e.goal_radius},
                   {"max_time", e.max_time},
                   {"perturb", e.perturb},
                   {"perturb_mass_scale", e.perturb_mass_scale},
                   {"perturb_drag_scale", e.perturb_drag_scale}};
  return j;
}

/// Names the violated invariant; used by both the parser and the CLI
/// `validate` subcommand.
inline void validate_scenario(const Scenario& s) {
  const auto fail = [](const std::string& what) { throw ScenarioError("invalid scenario: " + what); };
  if (!(s.bounds.lo.x() < s.bounds.hi.x() && s.bounds.lo.y() < s.bounds.hi.y() &&
        s.bounds.lo.z() < s.bounds.hi.z()))
    fail("bounds_min must be strictly below bounds_max");
  if (s.mu <= 0.0) fail("mu must be positive");
  if (s.vehicle_radius <= 0.0) fail("vehicle_radius must be positive");
  if (s.sense_radius <= s.vehicle_radius) fail("sense_radius must exceed vehicle_radius");
  if (!s.start.finite()) fail("start state must be finite");
  if (!s.bounds.contains(s.start.pos)) fail("start position outside bounds");
  if (!s.bounds.contains(s.goal.position())) fail("goal position outside bounds");
  if (std::abs(s.start.pos.z()) <= s.mu) fail("start position inside the transition band");
  if (std::abs(s.goal.z) <= s.mu) fail("goal position inside the transition band");
  if (s.obstacles.generated) {
    if (s.obstacles.count < 0) fail("obstacle count must be >= 0");
    if (s.obstacles.radius_min <= 0.0 || s.obstacles.radius_max < s.obstacles.radius_min)
      fail("obstacle radius range must satisfy 0 < min <= max");
  }
  for (const PidGains* g : {&s.gains.altitude, &s.gains.attitude})
    if (g->p < 0.0 || g->i < 0.0 || g->d < 0.0) fail("PID gains must be non-negative");
  if (s.gains.pos_p < 0.0 || s.gains.pos_d < 0.0 || s.gains.surge_dist < 0.0 ||
      s.gains.surge_align < 0.0)
    fail("gains must be non-negative");
  if (s.executor.period < kDt) fail("executor period shorter than the control step");
  if (s.executor.expansion_budget <= 0) fail("expansion_budget must be positive");
  if (s.executor.goal_radius <= 0.0) fail("goal_radius must be positive");
  if (s.executor.max_time < s.executor.period) fail("max_time shorter than one period");
  if (s.planner.goal_bias < 0.0 || s.planner.goal_bias > 1.0) fail("goal_bias outside [0,1]");
  if (s.planner.v_ref_air <= 0.0 || s.planner.v_ref_water <= 0.0 || s.planner.v_vertical <= 0.0)
    fail("reference speeds must be positive");
  // physical-consistency checks (throw on violation)
  make_vehicle_params(s.constants, s.drag_frame, s.rotor_limit);
}

inline Scenario parse_scenario(const Json& j) {
  Scenario s;
  detail::read_if(j, "seed", s.seed);
  if (j.contains("world")) {
    const auto& w = j.at("world");
    detail::read_if_vec3(w, "bounds_min", s.bounds.lo);
    detail::read_if_vec3(w, "bounds_max", s.bounds.hi);
    detail::read_if(w, "mu", s.mu);
    detail::read_if(w, "sense_radius", s.sense_radius);
    detail::read_if(w, "vehicle_radius", s.vehicle_radius);
  }
  if (j.contains("obstacles")) {
    const auto& ob = j.at("obstacles");
    std::string mode = ob.value("mode", std::string("generate"));
    if (mode == "generate") {
      s.obstacles.generated = true;
      detail::read_if(ob, "seed", s.obstacles.seed);
      detail::read_if(ob, "count", s.obstacles.count);
      detail::read_if(ob, "radius_min", s.obstacles.radius_min);
      detail::read_if(ob, "radius_max", s.obstacles.radius_max);
      detail::read_if(ob, "clearance", s.obstacles.clearance);
    } else if (mode == "explicit") {
      s.obstacles.generated = false;
      s.obstacles.explicit_list.clear();
      for (const auto& e : ob.at("list")) {
        Obstacle o;
        o.center = detail::vec3_from(e.at("center"));
        o.radius = e.at("radius").get<double>();
        if (o.radius <= 0.0) throw ScenarioError("invalid scenario: obstacle radius must be positive");
        s.obstacles.explicit_list.push_back(o);
      }
    } else {
      throw ScenarioError("invalid scenario: obstacles.mode must be 'generate' or 'explicit'");
    }
  }
  if (j.contains("start")) {
    const auto& st = j.at("start");
    detail::read_if_vec3(st, "position", s.start.pos);
    detail::read_if_vec3(st, "attitude", s.start.att);
    detail::read_if_vec3(st, "velocity", s.start.vel);
    detail::read_if_vec3(st, "body_rates", s.start.omega);
  }
  if (j.contains("goal")) {
    const auto& go = j.at("goal");
    if (go.contains("position")) {
      const Vec3 p = detail::vec3_from(go.at("position"));
      s.goal.x = p.x();
      s.goal.y = p.y();
      s.goal.z = p.z();
    }
    detail::read_if(go, "psi", s.goal.psi);
  }
  if (j.contains("gains")) detail::gains_from(j.at("gains"), s.gains);
  if (j.contains("physics")) {
    const auto& ph = j.at("physics");
    VehicleConstants& c = s.constants;
    detail::read_if(ph, "mass", c.mass);
    detail::read_if_vec3(ph, "gravity", c.gravity);
    detail::read_if(ph, "arm", c.arm);
    detail::read_if(ph, "metacentric", c.metacentric);
    detail::read_if(ph, "volume", c.volume);
    detail::read_if_vec3(ph, "drag_lin_diag", c.drag_lin_diag);
    detail::read_if_vec3(ph, "drag_rot_diag", c.drag_rot_diag);
    detail::read_if_mat3(ph, "inertia", c.inertia);
    if (ph.contains("air")) {
      const auto& a = ph.at("air");
      detail::read_if(a, "rho", c.rho_air);
      detail::read_if(a, "mass_eff", c.mass_eff_air);
      detail::read_if_mat3(a, "inertia_eff", c.inertia_eff_air);
      detail::read_if(a, "thrust_coeff", c.thrust_coeff_air);
      detail::read_if(a, "counter_torque", c.counter_torque_air);
    }
    if (ph.contains("water")) {
      const auto& wjson = ph.at("water");
      detail::read_if(wjson, "rho", c.rho_water);
      detail::read_if(wjson, "mass_eff", c.mass_eff_water);
      detail::read_if_mat3(wjson, "inertia_eff", c.inertia_eff_water);
      detail::read_if(wjson, "thrust_coeff", c.thrust_coeff_water);
      detail::read_if(wjson, "counter_torque", c.counter_torque_water);
    }
    if (ph.contains("drag_frame")) {
      const std::string f = ph.at("drag_frame").get<std::string>();
      if (f == "world") s.drag_frame = DragFrame::World;
      else if (f == "body") s.drag_frame = DragFrame::Body;
      else throw ScenarioError("invalid scenario: drag_frame must be 'world' or 'body'");
    }
    detail::read_if(ph, "rotor_limit", s.rotor_limit);
  }
  if (j.contains("planner")) {
    const auto& p = j.at("planner");
    PlannerConfig& c = s.planner;
    detail::read_if(p, "goal_bias", c.goal_bias);
    detail::read_if(p, "v_ref_air", c.v_ref_air);
    detail::read_if(p, "v_ref_water", c.v_ref_water);
    detail::read_if(p, "v_vertical", c.v_vertical);
    detail::read_if(p, "k_nearest", c.k_nearest);
    detail::read_if(p, "sample_z_margin", c.sample_z_margin);
    detail::read_if(p, "v_lat_max", c.v_lat_max);
    detail::read_if(p, "tilt_max_band", c.tilt_max_band);
    detail::read_if(p, "band_overshoot", c.band_overshoot);
    detail::read_if(p, "settle_v_lat", c.settle_v_lat);
    detail::read_if(p, "settle_tilt", c.settle_tilt);
    detail::read_if(p, "settle_vz", c.settle_vz);
    detail::read_if(p, "pin_radius", c.pin_radius);
    detail::read_if(p, "settle_timeout", c.settle_timeout);
    detail::read_if(p, "exit_timeout", c.exit_timeout);
    detail::read_if(p, "max_transition_builds", c.max_transition_builds);
    detail::read_if(p, "stop_check_time", c.stop_check_time);
    detail::read_if(p, "state_stride", c.state_stride);
  }
  if (j.contains("executor")) {
    const auto& e = j.at("executor");
    ExecutorConfig& c = s.executor;
    detail::read_if(e, "period", c.period);
    detail::read_if(e, "expansion_budget", c.expansion_budget);
    detail::read_if(e, "goal_radius", c.goal_radius);
    detail::read_if(e, "max_time", c.max_time);
    detail::read_if(e, "perturb", c.perturb);
    detail::read_if(e, "perturb_mass_scale", c.perturb_mass_scale);
    detail::read_if(e, "perturb_drag_scale", c.perturb_drag_scale);
  }
  validate_scenario(s);
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ScenarioError("parse error in " + path + ": " + e.what());
  }
  try {
    return parse_scenario(j);
  } catch (const Json::exception& e) {
    throw ScenarioError("malformed scenario " + path + ": " + e.what());
  }
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write scenario file: " + path);
  out << scenario_to_json(s).dump(2) << "\n";
}

/// Materializes the ground-truth world (generating obstacles when requested).
inline World build_world(const Scenario& s) {
  World w;
  w.bounds = s.bounds;
  w.mu = s.mu;
  w.sense_radius = s.sense_radius;
  w.vehicle_radius = s.vehicle_radius;
  if (s.obstacles.generated) {
    w.obstacles = generate_scenario(s.obstacles.seed, s.obstacles.count, s.bounds,
                                    s.obstacles.radius_min, s.obstacles.radius_max, s.start.pos,
                                    s.goal.position(), s.vehicle_radius, s.obstacles.clearance);
  } else {
    w.obstacles = s.obstacles.explicit_list;
  }
  w.known.assign(w.obstacles.size(), 0);
  return w;
}

inline MissionSetup make_setup(const Scenario& s) {
  MissionSetup ms;
  ms.world = build_world(s);
  ms.start = s.start;
  ms.goal = s.goal;
  ms.params = make_vehicle_params(s.constants, s.drag_frame, s.rotor_limit);
  ms.gains = s.gains;
  ms.planner = s.planner;
  ms.executor = s.executor;
  ms.seed = s.seed;
  return ms;
}

/// Packaged missions: `exp1` dives from an aerial start to an underwater
/// goal, `exp2` surfaces from an underwater start to an aerial goal. Obstacle
/// layouts are pinned by seed for reproducibility.
inline Scenario builtin_scenario(const std::string& name) {
  Scenario s;
  if (name == "exp1") {
    s.seed = 1;
    s.obstacles.seed = 11;
    s.start.pos = Vec3(-9.0, -9.0, 8.0);
    s.goal = {9.0, 9.0, -3.0, 0.0};
  } else if (name == "exp2") {
    s.seed = 2;
    s.obstacles.seed = 22;
    s.start.pos = Vec3(9.0, -9.0, -3.0);
    s.goal = {-9.0, 9.0, 7.0, 0.0};
  } else {
    throw ScenarioError("unknown builtin scenario: " + name);
  }
  return s;
}

}  // namespace huauv
