#pragma once

#include "huauv/types.hpp"

#include <vector>

namespace huauv {

/// Linear reference piece: position lerps from a to b over `steps` control
/// periods, yaw takes the shortest wrapped path.
struct RefPiece {
  ReferenceCommand a, b;
  int steps{0};
};

inline ReferenceCommand ref_lerp(const RefPiece& p, int local_step) {
  if (local_step <= 0) return p.a;
  if (local_step >= p.steps) return p.b;
  const double s = static_cast<double>(local_step) / static_cast<double>(p.steps);
  ReferenceCommand r;
  r.x = p.a.x + s * (p.b.x - p.a.x);
  r.y = p.a.y + s * (p.b.y - p.a.y);
  r.z = p.a.z + s * (p.b.z - p.a.z);
  r.psi = wrap_angle(p.a.psi + s * wrap_angle(p.b.psi - p.a.psi));
  return r;
}

/// Piecewise-linear reference trajectory addressed by integer control steps,
/// so that planner propagation and executor re-propagation sample the exact
/// same commands. Pieces need not be continuous; a discontinuity takes effect
/// on the first step into the new piece.
class RefSegment {
 public:
  RefSegment() = default;

  void append_line(const ReferenceCommand& a, const ReferenceCommand& b, int steps) {
    if (steps <= 0) throw std::invalid_argument("RefSegment: piece needs a positive step count");
    pieces_.push_back({a, b, steps});
    total_ += steps;
  }

  void append_hold(const ReferenceCommand& c, int steps) { append_line(c, c, steps); }

  void extend(const RefSegment& other) {
    for (const auto& p : other.pieces_) {
      pieces_.push_back(p);
      total_ += p.steps;
    }
  }

  bool empty() const { return pieces_.empty(); }
  int total_steps() const { return total_; }
  const std::vector<RefPiece>& pieces() const { return pieces_; }

  ReferenceCommand front() const {
    if (empty()) throw std::logic_error("RefSegment: empty");
    return pieces_.front().a;
  }

  ReferenceCommand back() const {
    if (empty()) throw std::logic_error("RefSegment: empty");
    return pieces_.back().b;
  }

  /// Command at global step k in [0, total_steps()]; boundary steps belong to
  /// the earlier piece.
  ReferenceCommand at_step(int k) const {
    if (empty()) throw std::logic_error("RefSegment: empty");
    if (k <= 0) return pieces_.front().a;
    if (k >= total_) return pieces_.back().b;
    int local = k;
    for (const auto& p : pieces_) {
      if (local <= p.steps) return ref_lerp(p, local);
      local -= p.steps;
    }
    return pieces_.back().b;
  }

  /// Sub-segment covering global steps [k0, k1].
  RefSegment slice(int k0, int k1) const {
    if (k0 < 0 || k1 > total_ || k0 >= k1)
      throw std::invalid_argument("RefSegment::slice: bad step range");
    RefSegment out;
    int offset = 0;
    for (const auto& p : pieces_) {
      const int lo = std::max(k0 - offset, 0);
      const int hi = std::min(k1 - offset, p.steps);
      if (lo < hi) out.append_line(ref_lerp(p, lo), ref_lerp(p, hi), hi - lo);
      offset += p.steps;
      if (offset >= k1) break;
    }
    return out;
  }

 private:
  std::vector<RefPiece> pieces_;
  int total_{0};
};

}  // namespace huauv
