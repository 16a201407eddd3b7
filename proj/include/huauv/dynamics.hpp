#pragma once

#include "huauv/params.hpp"
#include "huauv/types.hpp"

namespace huauv {

inline constexpr double kDivergenceLimit = 1.0e6;

/// f = rho * zeta * omega^2 for a unidirectional rotor [N].
inline double rotor_thrust(double omega_rpm, const MediumParams& medium) {
  if (omega_rpm < 0.0) throw std::domain_error("rotor speed must be non-negative");
  return medium.rho * medium.thrust_coeff * omega_rpm * omega_rpm;
}

/// Signed thruster force, f = rho * zeta * omega * |omega| [N]. Used by the
/// water model where reversed spin produces reverse thrust.
inline double signed_rotor_thrust(double omega_rpm, const MediumParams& medium) {
  return medium.rho * medium.thrust_coeff * omega_rpm * std::abs(omega_rpm);
}

/// Body-to-world rotation for roll/pitch/yaw (Z-Y-X composition).
inline Mat3 euler_rotation_matrix(const Vec3& att) {
  const double cf = std::cos(att.x()), sf = std::sin(att.x());
  const double ct = std::cos(att.y()), st = std::sin(att.y());
  const double cy = std::cos(att.z()), sy = std::sin(att.z());
  Mat3 r;
  r << cy * ct, cy * st * sf - sy * cf, cy * st * cf + sy * sf,
       sy * ct, sy * st * sf + cy * cf, sy * st * cf - cy * sf,
       -st,     ct * sf,                ct * cf;
  return r;
}

/// Maps body rates to attitude rates. Implemented exactly in the model's
/// printed form, which differs from the textbook Euler-rate matrix.
inline Mat3 attitude_rate_matrix(const Vec3& att) {
  const double cf = std::cos(att.x()), sf = std::sin(att.x());
  const double ct = std::cos(att.y()), st = std::sin(att.y());
  Mat3 b;
  b << ct, 0.0, -cf * st,
       0.0, 1.0, sf,
       st, 0.0, cf * ct;
  return b;
}

/// Component-wise |v| v, the per-axis quadratic drag kernel.
inline Vec3 quadratic_flow(const Vec3& v) { return v.cwiseProduct(v.cwiseAbs()); }

/// Drag force magnitude vector (caller negates). World frame keeps the
/// velocity as-is; body frame resolves it through R^T first.
inline Vec3 drag_force(const Mat3& r, const Mat3& drag, const Vec3& vel, DragFrame frame) {
  if (frame == DragFrame::World) return r * (drag * quadratic_flow(vel));
  return r * (drag * quadratic_flow(r.transpose() * vel));
}

struct StateDerivative {
  Vec3 pos{Vec3::Zero()};
  Vec3 att{Vec3::Zero()};
  Vec3 vel{Vec3::Zero()};
  Vec3 omega{Vec3::Zero()};
};

/// Quadrotor-mode rigid-body derivatives: collective thrust along body z,
/// quadratic drag, Coriolis coupling, weight, and the roll/pitch/yaw moments
/// produced by rotor imbalance.
inline StateDerivative aerial_derivatives(const VehicleState& x, const RotorSpeeds& rotors,
                                          const MediumParams& mp,
                                          DragFrame frame = DragFrame::Body) {
  if (!x.finite()) throw std::invalid_argument("aerial_derivatives: non-finite state");
  const Mat3 r = euler_rotation_matrix(x.att);
  Vec4 f;
  for (int i = 0; i < 4; ++i) f[i] = rotor_thrust(rotors[i], mp);

  StateDerivative d;
  d.pos = x.vel;
  const Vec3 thrust = r * Vec3(0.0, 0.0, f.sum());
  d.vel = (-drag_force(r, mp.drag_lin, x.vel, frame) - x.omega.cross(mp.mass * x.vel) -
           mp.mass * mp.gravity + thrust) /
          mp.mass_eff;
  d.att = attitude_rate_matrix(x.att) * x.omega;
  const Vec3 moment = mp.arm * Vec3(f[1] - f[3], f[2] - f[0], f[0] - f[1] + f[2] - f[3]);
  d.omega = mp.inertia_eff_inv * (-mp.drag_rot * quadratic_flow(x.omega) -
                                  x.omega.cross(mp.inertia * x.omega) + moment);
  return d;
}

/// ROV-mode derivatives: rotors 1,3 thrust along body z and rotors 2,4 along
/// body x, with net buoyancy and the passive metacentric restoring moment.
inline StateDerivative underwater_derivatives(const VehicleState& x, const RotorSpeeds& rotors,
                                              const MediumParams& mp,
                                              DragFrame frame = DragFrame::Body) {
  if (!x.finite()) throw std::invalid_argument("underwater_derivatives: non-finite state");
  const Mat3 r = euler_rotation_matrix(x.att);
  Vec4 f;
  for (int i = 0; i < 4; ++i) f[i] = signed_rotor_thrust(rotors[i], mp);

  StateDerivative d;
  d.pos = x.vel;
  const Vec3 thrust = r * Vec3(f[1] + f[3], 0.0, f[0] + f[2]);
  const Vec3 net_gravity = (mp.mass - mp.rho * mp.volume) * mp.gravity;
  d.vel = (-drag_force(r, mp.drag_lin, x.vel, frame) - x.omega.cross(mp.mass * x.vel) -
           net_gravity + thrust) /
          mp.mass_eff;
  d.att = attitude_rate_matrix(x.att) * x.omega;
  const Vec3 restoring = mp.metacentric * (mp.mass + mp.rho * mp.volume) * mp.gravity.norm() *
                         Vec3(std::sin(x.att.x()), std::sin(x.att.y()), 0.0);
  const Vec3 moment = mp.arm * Vec3(0.0, f[2] - f[0], f[1] - f[3]);
  d.omega = mp.inertia_eff_inv * (-mp.drag_rot * quadratic_flow(x.omega) -
                                  x.omega.cross(mp.inertia * x.omega) - restoring + moment);
  return d;
}

/// Classifies altitude against the transition band: Air above +mu, Water
/// below -mu, Transition inside the closed interval [-mu, mu].
inline Medium medium_of(double z, double mu) {
  if (mu <= 0.0) throw std::invalid_argument("medium_of: mu must be positive");
  if (z > mu) return Medium::Air;
  if (z < -mu) return Medium::Water;
  return Medium::Transition;
}

/// Dynamics/controller model selector: the hull centroid side of the surface.
inline ControlMode model_for_z(double z) { return z > 0.0 ? ControlMode::Air : ControlMode::Water; }

namespace detail {

inline VehicleState advance_state(const VehicleState& x, const StateDerivative& d, double h) {
  VehicleState n;
  n.pos = x.pos + h * d.pos;
  n.att = x.att + h * d.att;
  n.vel = x.vel + h * d.vel;
  n.omega = x.omega + h * d.omega;
  return n;
}

inline StateDerivative rk4_blend(const StateDerivative& k1, const StateDerivative& k2,
                                 const StateDerivative& k3, const StateDerivative& k4) {
  StateDerivative d;
  d.pos = (k1.pos + 2.0 * k2.pos + 2.0 * k3.pos + k4.pos) / 6.0;
  d.att = (k1.att + 2.0 * k2.att + 2.0 * k3.att + k4.att) / 6.0;
  d.vel = (k1.vel + 2.0 * k2.vel + 2.0 * k3.vel + k4.vel) / 6.0;
  d.omega = (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega) / 6.0;
  return d;
}

inline bool state_diverged(const VehicleState& x) {
  if (!x.finite()) return true;
  const auto big = [](const Vec3& v) { return v.cwiseAbs().maxCoeff() > kDivergenceLimit; };
  return big(x.pos) || big(x.att) || big(x.vel) || big(x.omega);
}

}  // namespace detail

/// One fixed-step RK4 update of the medium's rigid-body model with the rotor
/// speeds held constant. A Transition tag resolves to the model of the side
/// the hull centroid occupies. Attitude is re-wrapped after the step.
inline VehicleState integrate_step(const VehicleState& x0, const RotorSpeeds& rotors, Medium medium,
                                   const VehicleParams& vp, double dt, int substeps = 1) {
  if (dt <= 0.0) throw std::invalid_argument("integrate_step: dt must be positive");
  if (substeps < 1) throw std::invalid_argument("integrate_step: substeps must be >= 1");
  if (!x0.finite()) throw std::invalid_argument("integrate_step: non-finite state");

  ControlMode mode;
  switch (medium) {
    case Medium::Air: mode = ControlMode::Air; break;
    case Medium::Water: mode = ControlMode::Water; break;
    default: mode = model_for_z(x0.pos.z()); break;
  }
  const MediumParams& mp = vp.for_mode(mode);
  const auto deriv = [&](const VehicleState& x) {
    return mode == ControlMode::Air ? aerial_derivatives(x, rotors, mp, vp.drag_frame)
                                    : underwater_derivatives(x, rotors, mp, vp.drag_frame);
  };

  VehicleState x = x0;
  const double h = dt / substeps;
  for (int s = 0; s < substeps; ++s) {
    const StateDerivative k1 = deriv(x);
    const StateDerivative k2 = deriv(detail::advance_state(x, k1, 0.5 * h));
    const StateDerivative k3 = deriv(detail::advance_state(x, k2, 0.5 * h));
    const StateDerivative k4 = deriv(detail::advance_state(x, k3, h));
    x = detail::advance_state(x, detail::rk4_blend(k1, k2, k3, k4), h);
    if (detail::state_diverged(x)) throw IntegrationError("integrate_step: state diverged");
  }
  x.wrap_attitude();
  return x;
}

}  // namespace huauv
