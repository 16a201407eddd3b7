#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace huauv {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = 3.14159265358979323846;

/// Control/integration period of the whole stack [s].
inline constexpr double kDt = 0.01;

/// Wraps an angle to (-pi, pi]. In-range values pass through unchanged, so
/// wrapping is bit-stable under repetition.
inline double wrap_angle(double a) {
  if (a > -kPi && a <= kPi) return a;
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

/// 6-DOF rigid-body state. Position, attitude (roll, pitch, yaw) and linear
/// velocity are expressed in the world frame; angular velocity in the body
/// frame.
struct VehicleState {
  Vec3 pos{Vec3::Zero()};    // [m]
  Vec3 att{Vec3::Zero()};    // [rad], wrapped to (-pi, pi]
  Vec3 vel{Vec3::Zero()};    // [m/s]
  Vec3 omega{Vec3::Zero()};  // [rad/s]

  bool finite() const {
    return pos.allFinite() && att.allFinite() && vel.allFinite() && omega.allFinite();
  }

  void wrap_attitude() {
    att.x() = wrap_angle(att.x());
    att.y() = wrap_angle(att.y());
    att.z() = wrap_angle(att.z());
  }
};

/// Four rotor speeds [rpm]. Non-negative in air mode; water thrusters are
/// signed, negative meaning reverse thrust.
using RotorSpeeds = Vec4;

/// Planner-level setpoint consumed by the low-level controllers.
struct ReferenceCommand {
  double x{0.0}, y{0.0}, z{0.0};  // [m], world frame
  double psi{0.0};                // yaw [rad]

  Vec3 position() const { return {x, y, z}; }
};

enum class Medium { Air, Water, Transition };

enum class ControlMode { Air, Water };

/// Channel values produced by the control laws before rotor mixing.
/// ch2 carries the roll trim in air mode and the forward thrust in water mode.
struct ControlInput {
  ControlMode mode{ControlMode::Air};
  double thrust{0.0};  // dT [rpm]
  double ch2{0.0};     // dPhi (air) / dV (water) [rpm]
  double pitch{0.0};   // dTheta [rpm]
  double yaw{0.0};     // dPsi [rpm]

  Vec4 channels() const { return {thrust, ch2, pitch, yaw}; }
};

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularAttitudeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Deterministic RNG with a platform-independent uniform double mapping.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace huauv
