#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rangekin/random.hpp"
#include "rangekin/vec2.hpp"

namespace rangekin {

/// Ordered, non-empty list of fixed sensor positions. Index i of every
/// measurement vector refers to sensor i.
class SensorArray {
 public:
  explicit SensorArray(std::vector<Vec2> positions);

  std::size_t size() const noexcept { return positions_.size(); }
  const Vec2& operator[](std::size_t i) const { return positions_[i]; }
  std::span<const Vec2> positions() const noexcept { return positions_; }

  /// The eight-sensor layout on [-100, 100]^2 used by the reference experiments.
  static SensorArray reference_layout();

 private:
  std::vector<Vec2> positions_;
};

struct TargetState {
  Vec2 position;      // m
  Vec2 velocity;      // m/s
  Vec2 acceleration;  // m/s^2
};

/// Standard deviations of the zero-mean Gaussian measurement noises.
struct NoiseSpec {
  double sigma_range = 1.0;       // m
  double sigma_range_rate = 1.0;  // m/s
  double sigma_drr = 1.0;         // m/s^2

  /// Throws InvalidInput unless all three are finite and nonnegative.
  void validate() const;

  static constexpr NoiseSpec noiseless() { return {0.0, 0.0, 0.0}; }
};

/// One snapshot of noisy range, range-rate and range-rate-derivative readings.
struct MeasurementSet {
  std::vector<double> ranges;       // m
  std::vector<double> range_rates;  // m/s
  std::vector<double> drrs;         // m/s^2
  NoiseSpec noise;

  std::size_t size() const noexcept { return ranges.size(); }

  /// Throws InvalidInput if the three lists differ in length from `sensor_count`
  /// or hold non-finite values.
  void validate(std::size_t sensor_count) const;
};

double range(const Vec2& target_position, const Vec2& sensor_position);

/// First time derivative of range: v^T u / |u| with u = p - sensor.
double range_rate(const TargetState& target, const Vec2& sensor_position);

/// Second time derivative of range for the instantaneous state:
/// (a^T u + |v|^2 - rdot^2) / |u|.
double range_accel(const TargetState& target, const Vec2& sensor_position);

/// Noisy measurements at every sensor. Noise for (sensor i, type t) is drawn
/// from `stream.child(i).child(t)`, so the output is a pure function of the
/// inputs.
MeasurementSet synthesize_measurements(const TargetState& target, const SensorArray& sensors,
                                       const NoiseSpec& noise, const RandomStream& stream);

/// Constant-acceleration kinematics over `dt` seconds.
TargetState propagate(const TargetState& target, double dt);

}  // namespace rangekin
