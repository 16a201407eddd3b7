#include "huauv/reference.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace huauv;
using Catch::Matchers::WithinAbs;

TEST_CASE("reference piece interpolation") {
  RefSegment seg;
  seg.append_line({0.0, 0.0, 5.0, 0.0}, {1.0, 0.0, 5.0, 0.0}, 100);
  CHECK(seg.total_steps() == 100);
  CHECK_THAT(seg.at_step(50).x, WithinAbs(0.5, 1e-15));
  CHECK(seg.at_step(0).x == 0.0);
  CHECK(seg.at_step(100).x == 1.0);
  CHECK(seg.at_step(1000).x == 1.0);  // clamped past the end
}

TEST_CASE("yaw interpolates through the wrap") {
  RefSegment seg;
  seg.append_line({0.0, 0.0, 5.0, 3.0}, {0.0, 0.0, 5.0, -3.0}, 10);
  // shortest path from 3.0 to -3.0 goes through pi, not zero
  const double mid = seg.at_step(5).psi;
  CHECK(std::abs(mid) > 3.0);
}

TEST_CASE("slices reproduce the original commands") {
  RefSegment seg;
  seg.append_line({0.0, 0.0, 2.0, 0.0}, {1.0, 1.0, 2.0, 0.5}, 60);
  seg.append_hold({1.0, 1.0, 2.0, 0.5}, 40);
  seg.append_line({1.0, 1.0, 2.0, 0.5}, {1.0, 1.0, -2.0, 0.5}, 100);

  const RefSegment s1 = seg.slice(0, 100);
  const RefSegment s2 = seg.slice(100, 200);
  CHECK(s1.total_steps() == 100);
  CHECK(s2.total_steps() == 100);

  for (int k = 1; k <= 100; ++k) {
    const ReferenceCommand a = seg.at_step(k);
    const ReferenceCommand b = s1.at_step(k);
    CHECK_THAT(a.x, WithinAbs(b.x, 1e-12));
    CHECK_THAT(a.z, WithinAbs(b.z, 1e-12));
    CHECK_THAT(a.psi, WithinAbs(b.psi, 1e-12));
  }
  for (int k = 1; k <= 100; ++k) {
    const ReferenceCommand a = seg.at_step(100 + k);
    const ReferenceCommand b = s2.at_step(k);
    CHECK_THAT(a.x, WithinAbs(b.x, 1e-12));
    CHECK_THAT(a.z, WithinAbs(b.z, 1e-12));
  }
}

TEST_CASE("slice validation") {
  RefSegment seg;
  seg.append_hold({0.0, 0.0, 1.0, 0.0}, 10);
  CHECK_THROWS_AS(seg.slice(5, 5), std::invalid_argument);
  CHECK_THROWS_AS(seg.slice(-1, 5), std::invalid_argument);
  CHECK_THROWS_AS(seg.slice(0, 11), std::invalid_argument);
  CHECK_THROWS_AS(seg.append_hold({0.0, 0.0, 1.0, 0.0}, 0), std::invalid_argument);
}
