#pragma once

#include "huauv/types.hpp"

namespace huauv {

/// Frame used to evaluate quadratic translational drag. `Body` resolves the
/// velocity into the body frame before applying the drag map; `World` applies
/// it to the raw world-frame velocity and then rotates the force, which
/// leaves the force misaligned with the velocity and can feed energy into the
/// motion once the heading strays past 90 degrees. Body is the default.
enum class DragFrame { World, Body };

inline Mat3 mat3_rows(double a00, double a01, double a02, double a10, double a11, double a12,
                      double a20, double a21, double a22) {
  Mat3 m;
  m << a00, a01, a02, a10, a11, a12, a20, a21, a22;
  return m;
}

/// Physical constants of the vehicle in one medium. The drag matrices are
/// stored with the rho/2 prefactor already folded in, so the derivative
/// functions apply them without any further density scaling.
struct MediumParams {
  double rho{0.0};            // fluid density [kg/m^3]
  double mass{0.0};           // dry mass [kg]
  double mass_eff{0.0};       // dry + added mass [kg]
  Mat3 inertia{Mat3::Zero()};       // dry inertia [kg m^2]
  Mat3 inertia_eff{Mat3::Zero()};   // dry + added inertia [kg m^2]
  Mat3 inertia_eff_inv{Mat3::Zero()};
  double thrust_coeff{0.0};   // propeller force per (density * rpm^2)
  double counter_torque{0.0}; // propeller counter-torque coefficient (unused by the moment law)
  Mat3 drag_lin{Mat3::Zero()};  // effective translational drag
  Mat3 drag_rot{Mat3::Zero()};  // effective rotational drag
  double arm{0.0};            // rotor arm length [m]
  double metacentric{0.0};    // center-of-mass to center-of-buoyancy offset [m]
  double volume{0.0};         // hull volume [m^3]
  Vec3 gravity{Vec3::Zero()}; // [m/s^2]
};

/// Vehicle parameter set for the simulated experiments; the defaults
/// reproduce the reference platform in both media.
struct VehicleConstants {
  double mass = 1.2860;                  // [kg]
  Vec3 gravity{0.0, 0.0, 9.78};          // [m/s^2]
  double arm = 0.27;                     // [m]
  double metacentric = 0.02;             // [m]
  double volume = 1.6e-3;                // [m^3]
  Vec3 drag_lin_diag{1.25e-2, 1.25e-2, 4.99e-2};
  Vec3 drag_rot_diag{1.25e-2, 1.25e-2, 4.99e-2};
  Mat3 inertia = 1e-2 * mat3_rows(1.4465, 0.020415, -0.078703,     // [kg m^2]
                                  0.020415, 2.8818, -0.011572,
                                  -0.078703, -0.011572, 1.5410);

  double rho_air = 1.293;                // [kg/m^3]
  double mass_eff_air = 1.2868;          // [kg]
  Mat3 inertia_eff_air = 1e-2 * mat3_rows(1.4466, 0.020566, -0.078552,
                                          0.020566, 2.8819, -0.011420,
                                          -0.078552, -0.011420, 1.5412);
  double thrust_coeff_air = 2.45e-7;
  double counter_torque_air = 5e-11;

  double rho_water = 1000.0;             // [kg/m^3]
  double mass_eff_water = 1.9301;        // [kg]
  Mat3 inertia_eff_water = 1e-2 * mat3_rows(1.5639, 0.13781, 0.038688,
                                            0.13781, 2.9992, 0.10582,
                                            0.038688, 0.10582, 1.6584);
  double thrust_coeff_water = 1.6230e-9;
  double counter_torque_water = 1e-11;
};

inline MediumParams make_medium_params(const VehicleConstants& c, Medium which) {
  if (which == Medium::Transition) throw std::invalid_argument("no parameter set for the transition band");
  MediumParams p;
  const bool air = which == Medium::Air;
  p.rho = air ? c.rho_air : c.rho_water;
  p.mass = c.mass;
  p.mass_eff = air ? c.mass_eff_air : c.mass_eff_water;
  p.inertia = c.inertia;
  p.inertia_eff = air ? c.inertia_eff_air : c.inertia_eff_water;
  p.inertia_eff_inv = p.inertia_eff.inverse();
  p.thrust_coeff = air ? c.thrust_coeff_air : c.thrust_coeff_water;
  p.counter_torque = air ? c.counter_torque_air : c.counter_torque_water;
  p.drag_lin = 0.5 * p.rho * Mat3(c.drag_lin_diag.asDiagonal());
  p.drag_rot = 0.5 * p.rho * Mat3(c.drag_rot_diag.asDiagonal());
  p.arm = c.arm;
  p.metacentric = c.metacentric;
  p.volume = c.volume;
  p.gravity = c.gravity;

  if (p.rho <= 0.0) throw std::invalid_argument("medium density must be positive");
  if (p.mass_eff < p.mass) throw std::invalid_argument("effective mass below dry mass");
  if (!air && p.rho * p.volume <= p.mass)
    throw std::invalid_argument("water parameters must keep buoyancy above weight (rho*V > m)");
  return p;
}

/// Both medium parameter sets plus model-wide options.
///
/// The water rotational drag is stiff relative to the tiny hull inertia
/// (drag/inertia ~ 1.5e3 per rad), which puts the 10 ms control period far
/// outside the explicit integrator's stability region once the hull rotates;
/// the water model therefore integrates with finer fixed substeps inside
/// each control period.
struct VehicleParams {
  MediumParams air;
  MediumParams water;
  DragFrame drag_frame{DragFrame::Body};
  double rotor_limit{1.0e4};  // saturation [rpm]
  int substeps_air{1};        // integrator substeps per control period
  int substeps_water{10};

  const MediumParams& for_mode(ControlMode m) const { return m == ControlMode::Air ? air : water; }
  int substeps_for(ControlMode m) const { return m == ControlMode::Air ? substeps_air : substeps_water; }
};

inline VehicleParams make_vehicle_params(const VehicleConstants& c,
                                         DragFrame frame = DragFrame::Body,
                                         double rotor_limit = 1.0e4) {
  VehicleParams vp;
  vp.air = make_medium_params(c, Medium::Air);
  vp.water = make_medium_params(c, Medium::Water);
  vp.drag_frame = frame;
  vp.rotor_limit = rotor_limit;
  return vp;
}

}  // namespace huauv
