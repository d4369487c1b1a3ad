#include "rangekin/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rangekin {

namespace {

enum MeasurementType : std::uint64_t { kRange = 0, kRangeRate = 1, kDrr = 2 };

Vec2 line_of_sight(const Vec2& target_position, const Vec2& sensor_position) {
  const Vec2 u = target_position - sensor_position;
  if (u.x() == 0.0 && u.y() == 0.0) {
    throw Error(ErrorKind::ZeroRange, "target coincides with a sensor");
  }
  return u;
}

bool all_finite(const std::vector<double>& values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double gaussian(const RandomStream& stream, double sigma) {
  if (sigma == 0.0) return 0.0;
  auto engine = stream.engine();
  std::normal_distribution<double> dist(0.0, 1.0);
  return sigma * dist(engine);
}

}  // namespace

SensorArray::SensorArray(std::vector<Vec2> positions) : positions_(std::move(positions)) {
  if (positions_.empty()) {
    throw Error(ErrorKind::InvalidInput, "sensor array must contain at least one sensor");
  }
}

SensorArray SensorArray::reference_layout() {
  return SensorArray({{0, 0},
                      {100, 100},
                      {-100, 100},
                      {100, -100},
                      {-100, -100},
                      {-50, 50},
                      {50, 50},
                      {-50, -50}});
}

void NoiseSpec::validate() const {
  for (double s : {sigma_range, sigma_range_rate, sigma_drr}) {
    if (!std::isfinite(s) || s < 0.0) {
      throw Error(ErrorKind::InvalidInput, "noise standard deviations must be finite and >= 0");
    }
  }
}

void MeasurementSet::validate(std::size_t sensor_count) const {
  if (ranges.size() != sensor_count || range_rates.size() != sensor_count ||
      drrs.size() != sensor_count) {
    throw Error(ErrorKind::InvalidInput,
                "measurement lists must all have one entry per sensor (" +
                    std::to_string(sensor_count) + ")");
  }
  if (!all_finite(ranges) || !all_finite(range_rates) || !all_finite(drrs)) {
    throw Error(ErrorKind::InvalidInput, "measurements must be finite");
  }
}

double range(const Vec2& target_position, const Vec2& sensor_position) {
  return (target_position - sensor_position).norm();
}

double range_rate(const TargetState& target, const Vec2& sensor_position) {
  const Vec2 u = line_of_sight(target.position, sensor_position);
  return target.velocity.dot(u) / u.norm();
}

double range_accel(const TargetState& target, const Vec2& sensor_position) {
  const Vec2 u = line_of_sight(target.position, sensor_position);
  const double r = u.norm();
  const double rdot = target.velocity.dot(u) / r;
  return (target.acceleration.dot(u) + target.velocity.squared_norm() - rdot * rdot) / r;
}

MeasurementSet synthesize_measurements(const TargetState& target, const SensorArray& sensors,
                                       const NoiseSpec& noise, const RandomStream& stream) {
  noise.validate();
  const std::size_t n = sensors.size();
  MeasurementSet out;
  out.noise = noise;
  out.ranges.reserve(n);
  out.range_rates.reserve(n);
  out.drrs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const RandomStream sensor_stream = stream.child(i);
    out.ranges.push_back(range(target.position, sensors[i]) +
                         gaussian(sensor_stream.child(kRange), noise.sigma_range));
    out.range_rates.push_back(range_rate(target, sensors[i]) +
                              gaussian(sensor_stream.child(kRangeRate), noise.sigma_range_rate));
    out.drrs.push_back(range_accel(target, sensors[i]) +
                       gaussian(sensor_stream.child(kDrr), noise.sigma_drr));
  }
  return out;
}

TargetState propagate(const TargetState& target, double dt) {
  if (!std::isfinite(dt)) throw Error(ErrorKind::InvalidInput, "dt must be finite");
  return {target.position + dt * target.velocity + (0.5 * dt * dt) * target.acceleration,
          target.velocity + dt * target.acceleration, target.acceleration};
}

}  // namespace rangekin
