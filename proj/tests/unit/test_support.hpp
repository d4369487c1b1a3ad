#pragma once

#include <cmath>
#include <random>

#include "rangekin/model.hpp"

namespace rangekin::testing {

inline Vec2 uniform_vec(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  const double x = d(rng);
  return {x, d(rng)};
}

/// Target state drawn from the reference boxes.
inline TargetState random_state(std::mt19937_64& rng) {
  return {uniform_vec(rng, 0, 100), uniform_vec(rng, -20, 20), uniform_vec(rng, -10, 10)};
}

/// Target state at least `min_range` from every sensor of `sensors`.
inline TargetState random_state_clear_of(std::mt19937_64& rng, const SensorArray& sensors,
                                         double min_range) {
  for (;;) {
    TargetState s = random_state(rng);
    bool clear = true;
    for (const Vec2& p : sensors.positions()) clear = clear && range(s.position, p) >= min_range;
    if (clear) return s;
  }
}

inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

/// Range along the constant-acceleration trajectory, evaluated in closed form
/// without going through `propagate`.
inline double trajectory_range(const TargetState& s, const Vec2& sensor, double t) {
  const double x = s.position.x() + s.velocity.x() * t + 0.5 * s.acceleration.x() * t * t;
  const double y = s.position.y() + s.velocity.y() * t + 0.5 * s.acceleration.y() * t * t;
  return std::hypot(x - sensor.x(), y - sensor.y());
}

}  // namespace rangekin::testing
