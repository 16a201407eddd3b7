#pragma once

#include "huauv/dynamics.hpp"

#include <algorithm>

namespace huauv {

inline constexpr double kIntegralClamp = 50.0;
inline constexpr double kTiltLimit = 0.35;        // [rad] position-law output clamp
inline constexpr double kBearingSwitch = 0.25;    // [m] water yaw target: bearing vs commanded psi
inline constexpr double kAttitudeChannelClamp = 2500.0;  // [rpm] bounds transient torque spikes
inline constexpr double kSurgeChannelClamp = 1200.0;     // [rpm] caps forward speed near 0.9 m/s

struct PidGains {
  double p{0.0}, i{0.0}, d{0.0};
};

/// Control gains for every channel. The defaults are tuned for the reference
/// vehicle's rpm-scale mixing and can be overridden per scenario.
struct GainSet {
  PidGains altitude{400.0, 20.0, 500.0};  // z channel, both media
  PidGains attitude{450.0, 5.0, 150.0};   // roll/pitch/yaw channels
  double pos_p{0.25};                     // planar error -> tilt reference
  double pos_d{0.4};
  double surge_dist{600.0};               // lambda_v
  double surge_align{10.0};               // lambda_alpha
};

struct PidChannel {
  double integral{0.0};
  double prev_error{0.0};
  bool primed{false};

  void reset() { *this = PidChannel{}; }
};

/// PID bookkeeping threaded through the closed loop by value. Channels reset
/// whenever the active medium model switches.
struct ControllerMemory {
  PidChannel altitude;
  PidChannel roll, pitch, yaw;
  ControlMode model{ControlMode::Air};
  bool model_set{false};
  double t{0.0};

  void reset_channels() {
    altitude.reset();
    roll.reset();
    pitch.reset();
    yaw.reset();
  }
};

/// One discrete PID update: clamped integral, finite-difference derivative
/// (angle channels difference through the wrap).
inline double pid_step(PidChannel& ch, const PidGains& g, double error, double dt,
                       bool angular = false) {
  ch.integral = std::clamp(ch.integral + error * dt, -kIntegralClamp, kIntegralClamp);
  double deriv = 0.0;
  if (ch.primed) {
    const double diff = angular ? wrap_angle(error - ch.prev_error) : error - ch.prev_error;
    deriv = diff / dt;
  }
  ch.prev_error = error;
  ch.primed = true;
  return g.p * error + g.i * ch.integral + g.d * deriv;
}

inline Mat4 aerial_mix_matrix() {
  Mat4 m;
  m << 1, 0, -1, 1,
       1, 1, 0, -1,
       1, 0, 1, 1,
       1, -1, 0, -1;
  return m;
}

inline Mat4 underwater_mix_matrix() {
  Mat4 m;
  m << 1, 0, -1, 0,
       0, 1, 0, 1,
       1, 0, 1, 0,
       0, 1, 0, -1;
  return m;
}

/// Air mixing: rotors are unidirectional, so speeds clamp to [0, limit].
inline RotorSpeeds aerial_mix(const ControlInput& u, double limit) {
  if (u.mode != ControlMode::Air) throw std::invalid_argument("aerial_mix: input is not air-mode");
  RotorSpeeds w = aerial_mix_matrix() * u.channels();
  return w.cwiseMax(0.0).cwiseMin(limit);
}

/// Water mixing: thrusters are signed, speeds clamp to [-limit, limit].
inline RotorSpeeds underwater_mix(const ControlInput& u, double limit) {
  if (u.mode != ControlMode::Water)
    throw std::invalid_argument("underwater_mix: input is not water-mode");
  RotorSpeeds w = underwater_mix_matrix() * u.channels();
  return w.cwiseMax(-limit).cwiseMin(limit);
}

namespace detail {

inline void check_attitude_regular(const VehicleState& x) {
  if (std::abs(x.att.x()) >= kPi / 2.0 || std::abs(x.att.y()) >= kPi / 2.0)
    throw SingularAttitudeError("thrust law undefined at |roll| or |pitch| >= pi/2");
}

}  // namespace detail

/// Altitude thrust law: PID on z error over cos(phi)cos(theta), plus the
/// analytic hover speed sqrt(m*g / (4*rho*zeta)) as bias.
inline double aerial_altitude_law(const VehicleState& x, const ReferenceCommand& ref,
                                  const GainSet& g, const MediumParams& air,
                                  ControllerMemory& mem, double dt) {
  detail::check_attitude_regular(x);
  const double e = ref.z - x.pos.z();
  const double pid = pid_step(mem.altitude, g.altitude, e, dt);
  const double bias =
      std::sqrt(air.mass * air.gravity.norm() / (4.0 * air.rho * air.thrust_coeff));
  return pid / (std::cos(x.att.x()) * std::cos(x.att.y())) + bias;
}

/// Three independent attitude PIDs; the yaw error wraps to (-pi, pi].
inline Vec3 aerial_attitude_law(const VehicleState& x, const Vec3& att_ref, const GainSet& g,
                                ControllerMemory& mem, double dt) {
  const auto clamp = [](double v) {
    return std::clamp(v, -kAttitudeChannelClamp, kAttitudeChannelClamp);
  };
  const double dphi = clamp(pid_step(mem.roll, g.attitude, att_ref.x() - x.att.x(), dt));
  const double dtheta = clamp(pid_step(mem.pitch, g.attitude, att_ref.y() - x.att.y(), dt));
  const double dpsi =
      clamp(pid_step(mem.yaw, g.attitude, wrap_angle(att_ref.z() - x.att.z()), dt, true));
  return {dphi, dtheta, dpsi};
}

/// PD map from planar position error to tilt references. The error and its
/// rate are resolved into the yaw frame; forward error commands pitch and
/// left error commands negative roll, both clamped to tilt_limit.
inline Eigen::Vector2d aerial_position_law(const VehicleState& x, const ReferenceCommand& ref,
                                           const GainSet& g, double tilt_limit = kTiltLimit) {
  const double ex = ref.x - x.pos.x();
  const double ey = ref.y - x.pos.y();
  const double c = std::cos(x.att.z()), s = std::sin(x.att.z());
  const double e_fwd = c * ex + s * ey;
  const double e_left = -s * ex + c * ey;
  const double v_fwd = c * x.vel.x() + s * x.vel.y();
  const double v_left = -s * x.vel.x() + c * x.vel.y();
  const double theta_ref = std::clamp(g.pos_p * e_fwd - g.pos_d * v_fwd, -tilt_limit, tilt_limit);
  const double phi_ref = std::clamp(-(g.pos_p * e_left - g.pos_d * v_left), -tilt_limit, tilt_limit);
  return {phi_ref, theta_ref};
}

/// Depth thrust law: PID over cos(phi)cos(theta) minus the buoyancy trim
/// -sqrt(|g_rho| / (2*rho*zeta)); negative bias pushes down against the
/// slightly positive net buoyancy.
inline double underwater_depth_law(const VehicleState& x, const ReferenceCommand& ref,
                                   const GainSet& g, const MediumParams& water,
                                   ControllerMemory& mem, double dt) {
  detail::check_attitude_regular(x);
  const double e = ref.z - x.pos.z();
  const double pid = pid_step(mem.altitude, g.altitude, e, dt);
  const double g_rho = std::abs(water.mass - water.rho * water.volume) * water.gravity.norm();
  const double bias = std::sqrt(g_rho / (2.0 * water.rho * water.thrust_coeff));
  return pid / (std::cos(x.att.x()) * std::cos(x.att.y())) - bias;
}

/// Pitch/yaw PIDs for the water mode; roll is left to the passive restoring
/// moment.
inline Eigen::Vector2d underwater_attitude_law(const VehicleState& x, double theta_ref,
                                               double psi_ref, const GainSet& g,
                                               ControllerMemory& mem, double dt) {
  const auto clamp = [](double v) {
    return std::clamp(v, -kAttitudeChannelClamp, kAttitudeChannelClamp);
  };
  const double dtheta = clamp(pid_step(mem.pitch, g.attitude, theta_ref - x.att.y(), dt));
  const double dpsi =
      clamp(pid_step(mem.yaw, g.attitude, wrap_angle(psi_ref - x.att.z()), dt, true));
  return {dtheta, dpsi};
}

/// Yaw setpoint used under water: bearing to the reference point while it is
/// meaningfully away, the commanded yaw once close enough to station-keep.
inline double water_yaw_target(const VehicleState& x, const ReferenceCommand& ref) {
  const double dx = ref.x - x.pos.x();
  const double dy = ref.y - x.pos.y();
  if (std::hypot(dx, dy) >= kBearingSwitch) return std::atan2(dy, dx);
  return ref.psi;
}

/// Kinematic surge law dV = lambda_v * d + lambda_alpha * e_psi^2, with two
/// saturations: the channel caps (thrust grows with the square of dV, so an
/// uncapped channel outruns the quadratic drag whenever heading lag lets the
/// distance build up), and the distance term is gated by heading alignment
/// (a nonholonomic hull that thrusts while facing away from the target walks
/// off instead of station-keeping). The gate is even in e_psi and unity when
/// aligned, so it leaves the law's fixed points untouched.
inline double underwater_surge_law(const VehicleState& x, const ReferenceCommand& ref,
                                   const GainSet& g) {
  const double dx = ref.x - x.pos.x();
  const double dy = ref.y - x.pos.y();
  const double d = std::hypot(dx, dy);
  const double e_psi = wrap_angle(water_yaw_target(x, ref) - x.att.z());
  const double alignment = std::max(std::cos(e_psi), 0.0);
  return std::min(g.surge_dist * d * alignment + g.surge_align * e_psi * e_psi,
                  kSurgeChannelClamp);
}

struct StepResult {
  VehicleState state;
  ControllerMemory memory;
};

/// One closed-loop period: select the medium model by the sign of z (resetting
/// PID memory on a switch), evaluate the control laws, mix to rotor speeds and
/// integrate one step. The same function serves planner prediction and
/// executed simulation; `plant` lets a perturbed plant be driven by controllers
/// that still believe `model`.
inline StepResult closed_loop_step(const VehicleState& x, const ReferenceCommand& ref,
                                   const VehicleParams& model, const VehicleParams& plant,
                                   const GainSet& g, ControllerMemory mem, double dt,
                                   int substeps = 1) {
  const ControlMode mode = model_for_z(x.pos.z());
  if (!mem.model_set || mem.model != mode) {
    mem.reset_channels();
    mem.model = mode;
    mem.model_set = true;
  }

  VehicleState next;
  if (mode == ControlMode::Air) {
    const Eigen::Vector2d tilt = aerial_position_law(x, ref, g);
    const double thrust = aerial_altitude_law(x, ref, g, model.air, mem, dt);
    const Vec3 att = aerial_attitude_law(x, Vec3(tilt[0], tilt[1], ref.psi), g, mem, dt);
    const ControlInput u{ControlMode::Air, thrust, att[0], att[1], att[2]};
    next = integrate_step(x, aerial_mix(u, model.rotor_limit), Medium::Air, plant, dt,
                          substeps * plant.substeps_for(mode));
  } else {
    const double thrust = underwater_depth_law(x, ref, g, model.water, mem, dt);
    const double psi_ref = water_yaw_target(x, ref);
    const Eigen::Vector2d att = underwater_attitude_law(x, 0.0, psi_ref, g, mem, dt);
    const double surge = underwater_surge_law(x, ref, g);
    const ControlInput u{ControlMode::Water, thrust, surge, att[0], att[1]};
    next = integrate_step(x, underwater_mix(u, model.rotor_limit), Medium::Water, plant, dt,
                          substeps * plant.substeps_for(mode));
  }
  mem.t += dt;
  return {next, mem};
}

inline StepResult closed_loop_step(const VehicleState& x, const ReferenceCommand& ref,
                                   const VehicleParams& vp, const GainSet& g, ControllerMemory mem,
                                   double dt, int substeps = 1) {
  return closed_loop_step(x, ref, vp, vp, g, std::move(mem), dt, substeps);
}

}  // namespace huauv
