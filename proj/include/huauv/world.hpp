#pragma once

#include "huauv/types.hpp"

#include <cstdint>
#include <vector>

namespace huauv {

struct Obstacle {
  Vec3 center{Vec3::Zero()};  // [m]
  double radius{0.0};         // [m]
};

struct Aabb {
  Vec3 lo{Vec3::Zero()};
  Vec3 hi{Vec3::Zero()};

  bool contains(const Vec3& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y() &&
           p.z() >= lo.z() && p.z() <= hi.z();
  }
};

/// |z| <= mu, the closed band around the surface where only vertical motion
/// is planned.
inline bool in_transition_zone(double z, double mu) {
  if (mu <= 0.0) throw std::invalid_argument("in_transition_zone: mu must be positive");
  return std::abs(z) <= mu;
}

/// World geometry plus the robot's obstacle knowledge. `obstacles` is ground
/// truth; only entries flagged in `known` constrain free-space queries.
struct World {
  Aabb bounds;
  double mu{0.8};             // transition-band half width [m]
  double sense_radius{3.0};   // obstacle detection range (to the surface) [m]
  double vehicle_radius{0.4}; // collision inflation [m]
  std::vector<Obstacle> obstacles;
  std::vector<std::uint8_t> known;

  /// Marks every obstacle whose surface lies within sense_radius of the
  /// position as known. Knowledge is monotone; re-sensing is idempotent.
  void sense(const Vec3& position) {
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      if (known[i]) continue;
      const double surface = (obstacles[i].center - position).norm() - obstacles[i].radius;
      if (surface <= sense_radius) known[i] = 1;
    }
  }

  std::size_t known_count() const {
    std::size_t n = 0;
    for (auto k : known) n += k != 0;
    return n;
  }

  /// Reveals ground truth, for tests and tooling only.
  void sense_all() { known.assign(obstacles.size(), 1); }
};

/// Free iff inside the bounds and clear of every *known* obstacle inflated by
/// the vehicle radius.
inline bool is_free(const Vec3& point, const World& w) {
  if (!w.bounds.contains(point)) return false;
  for (std::size_t i = 0; i < w.obstacles.size(); ++i) {
    if (!w.known[i]) continue;
    const double keepout = w.obstacles[i].radius + w.vehicle_radius;
    if ((w.obstacles[i].center - point).squaredNorm() <= keepout * keepout) return false;
  }
  return true;
}

namespace detail {

inline bool segment_free(const Vec3& a, const Vec3& b, const World& w) {
  if ((b - a).norm() <= 0.5 * w.vehicle_radius) return true;
  const Vec3 mid = 0.5 * (a + b);
  if (!is_free(mid, w)) return false;
  return segment_free(a, mid, w) && segment_free(mid, b, w);
}

}  // namespace detail

/// Every sample must be free, and gaps wider than half the vehicle radius are
/// bisected down to that resolution.
inline bool trajectory_free(const std::vector<Vec3>& points, const World& w) {
  if (points.empty()) throw std::invalid_argument("trajectory_free: empty sequence");
  for (const auto& p : points)
    if (!is_free(p, w)) return false;
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    if (!detail::segment_free(points[i], points[i + 1], w)) return false;
  return true;
}

template <typename StateSeq>
bool trajectory_free_states(const StateSeq& states, const World& w) {
  std::vector<Vec3> pts;
  pts.reserve(states.size());
  for (const auto& s : states) pts.push_back(s.pos);
  return trajectory_free(pts, w);
}

/// Seeded uniform placement of spherical obstacles inside the bounds.
/// Spheres that would swallow the start or goal (inflated by the vehicle
/// radius plus a clearance) are resampled; exceeding 10*count attempts in
/// total is an error.
inline std::vector<Obstacle> generate_scenario(std::uint64_t seed, int count, const Aabb& bounds,
                                               double radius_min, double radius_max,
                                               const Vec3& start, const Vec3& goal,
                                               double vehicle_radius, double clearance = 1.0) {
  if (count < 0) throw std::invalid_argument("generate_scenario: count must be >= 0");
  if (radius_min <= 0.0 || radius_max < radius_min)
    throw std::invalid_argument("generate_scenario: bad radius range");

  std::vector<Obstacle> out;
  if (count == 0) return out;
  out.reserve(count);

  Rng rng(seed);
  const double keepout = vehicle_radius + clearance;
  long attempts = 0;
  const long max_attempts = 10L * count;
  while (static_cast<int>(out.size()) < count) {
    if (attempts >= max_attempts)
      throw std::runtime_error("generate_scenario: could not place obstacles within attempt budget");
    ++attempts;
    Obstacle ob;
    ob.center = Vec3(rng.uniform(bounds.lo.x(), bounds.hi.x()),
                     rng.uniform(bounds.lo.y(), bounds.hi.y()),
                     rng.uniform(bounds.lo.z(), bounds.hi.z()));
    ob.radius = rng.uniform(radius_min, radius_max);
    const double margin = ob.radius + keepout;
    if ((ob.center - start).norm() <= margin || (ob.center - goal).norm() <= margin) continue;
    out.push_back(ob);
  }
  return out;
}

}  // namespace huauv
