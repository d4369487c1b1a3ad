#include "rangekin/estim.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace rangekin {

namespace {

// Realization of r_i for sensor i: distance from the position estimate or the raw reading.
double realized_range(const MeasurementSet& m, const SensorArray& sensors, const Vec2& p_hat,
                      RangeSource source, std::size_t i) {
  const double r = source == RangeSource::EstimatedPosition ? range(p_hat, sensors[i]) : m.ranges[i];
  if (!(r > 0.0)) {
    throw Error(ErrorKind::ZeroRange, "non-positive range for sensor " + std::to_string(i));
  }
  return r;
}

std::vector<Vec2> stage_rows(const SensorArray& sensors, const Vec2& p_hat) {
  std::vector<Vec2> rows;
  rows.reserve(sensors.size());
  for (const Vec2& s : sensors.positions()) rows.push_back(p_hat - s);
  return rows;
}

Method method_for(const WeightRule& rule) {
  return rule.mode == WeightMode::Uniform ? Method::LS : Method::WLS;
}

}  // namespace

PositionSolution estimate_position(const MeasurementSet& measurements, const SensorArray& sensors,
                                   double condition_cap) {
  const std::size_t n = sensors.size();
  if (n < 3) throw Error(ErrorKind::TooFewSensors, "position stage needs at least 3 sensors");
  measurements.validate(n);

  Eigen::MatrixX3d a(n, 3);
  Eigen::VectorXd f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& s = sensors[i];
    const auto row = static_cast<Eigen::Index>(i);
    a(row, 0) = -2.0 * s.x();
    a(row, 1) = -2.0 * s.y();
    a(row, 2) = 1.0;
    f(row) = measurements.ranges[i] * measurements.ranges[i] - s.squared_norm();
  }

  // Equilibrate columns so the rank test is insensitive to coordinate units.
  const Eigen::Array3d col_norms = a.colwise().norm().transpose().array();
  if ((col_norms == 0.0).any()) {
    throw Error(ErrorKind::DegenerateGeometry, "sensor coordinates span less than two dimensions");
  }
  const Eigen::Matrix3d scale = col_norms.inverse().matrix().asDiagonal();
  const Eigen::MatrixX3d scaled = a * scale;
  const Eigen::Matrix3d gram = scaled.transpose() * scaled;

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(gram, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues()(0);
  const double lmax = eig.eigenvalues()(2);
  if (!(lmin > 0.0) || lmax / lmin > condition_cap) {
    throw Error(ErrorKind::DegenerateGeometry, "trilateration design matrix is rank deficient");
  }

  const Eigen::Vector3d theta = scale * gram.ldlt().solve(scaled.transpose() * f);

  PositionSolution out;
  out.position = Vec2(theta(0), theta(1));
  out.theta3 = theta(2);
  out.residual_norm = (a * theta - f).norm();
  out.condition = lmax / lmin;
  return out;
}

std::vector<double> stage_weights(const MeasurementSet& measurements, const SensorArray& sensors,
                                  const Vec2& p_hat, const WeightRule& rule) {
  const std::size_t n = sensors.size();
  std::vector<double> w(n, 1.0);
  if (rule.mode == WeightMode::Uniform) return w;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = realized_range(measurements, sensors, p_hat, rule.source, i);
    w[i] = rule.mode == WeightMode::InverseRange ? 1.0 / r : 1.0 / (r * r);
  }
  return w;
}

LinearSystem build_velocity_system(const MeasurementSet& measurements, const SensorArray& sensors,
                                   const Vec2& p_hat, const WeightRule& rule,
                                   RangeSource pseudo_range_source) {
  const std::size_t n = sensors.size();
  measurements.validate(n);
  LinearSystem sys;
  sys.rows = stage_rows(sensors, p_hat);
  sys.rhs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = realized_range(measurements, sensors, p_hat, pseudo_range_source, i);
    sys.rhs.push_back(measurements.range_rates[i] * r);
  }
  sys.weights = stage_weights(measurements, sensors, p_hat, rule);
  return sys;
}

KinematicEstimate solve_linear_stage(std::span<const Vec2> rows, std::span<const double> rhs,
                                     std::span<const double> weights, Method method,
                                     double condition_cap) {
  if (rows.size() != rhs.size() || rows.size() != weights.size()) {
    throw Error(ErrorKind::InvalidInput, "rows, rhs and weights must have equal length");
  }
  double g00 = 0.0, g01 = 0.0, g11 = 0.0, h0 = 0.0, h1 = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double w = weights[i];
    if (!std::isfinite(w) || w < 0.0 || !std::isfinite(rhs[i])) {
      throw Error(ErrorKind::InvalidInput, "weights must be finite and >= 0, rhs finite");
    }
    const double bx = rows[i].x();
    const double by = rows[i].y();
    g00 += w * bx * bx;
    g01 += w * bx * by;
    g11 += w * by * by;
    h0 += w * bx * rhs[i];
    h1 += w * by * rhs[i];
  }

  // Eigenvalues of the symmetric 2x2 Gram matrix; the small one via det / large
  // to avoid cancellation.
  const double det = g00 * g11 - g01 * g01;
  const double half_gap = 0.5 * (g00 - g11);
  const double lmax = 0.5 * (g00 + g11) + std::sqrt(half_gap * half_gap + g01 * g01);
  const double lmin = lmax > 0.0 ? det / lmax : 0.0;
  if (!(lmin > 0.0) || !(lmax / lmin <= condition_cap)) {
    throw Error(ErrorKind::SingularGeometry,
                "stage Gram matrix is singular or ill-conditioned (rows nearly parallel)");
  }

  KinematicEstimate out;
  out.value = Vec2((g11 * h0 - g01 * h1) / det, (g00 * h1 - g01 * h0) / det);
  out.method = method;
  out.gram_condition = lmax / lmin;
  double cost = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double e = rhs[i] - rows[i].dot(out.value);
    cost += weights[i] * e * e;
  }
  out.residual_norm = std::sqrt(cost);
  out.pseudo_measurements.assign(rhs.begin(), rhs.end());
  return out;
}

namespace {

int checked_passes(const EstimatorConfig& config) {
  if (config.reweight_passes < 1) {
    throw Error(ErrorKind::InvalidInput, "reweight_passes must be at least 1");
  }
  return config.reweight_passes;
}

}  // namespace

KinematicEstimate estimate_velocity(const MeasurementSet& measurements, const SensorArray& sensors,
                                    const Vec2& p_hat, const WeightRule& rule,
                                    const EstimatorConfig& config) {
  const int passes = checked_passes(config);
  KinematicEstimate est;
  for (int pass = 0; pass < passes; ++pass) {
    const LinearSystem sys =
        build_velocity_system(measurements, sensors, p_hat, rule, config.pseudo_range_source);
    est = solve_linear_stage(sys.rows, sys.rhs, sys.weights, method_for(rule), config.condition_cap);
  }
  return est;
}

std::vector<double> acceleration_pseudo_measurements(const MeasurementSet& measurements,
                                                     const SensorArray& sensors, const Vec2& p_hat,
                                                     const Vec2& v_hat,
                                                     RangeSource pseudo_range_source) {
  const std::size_t n = sensors.size();
  measurements.validate(n);
  const double speed_sq = v_hat.squared_norm();
  std::vector<double> k;
  k.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = realized_range(measurements, sensors, p_hat, pseudo_range_source, i);
    const double a = measurements.range_rates[i];
    k.push_back(measurements.drrs[i] * r - speed_sq + a * a);
  }
  return k;
}

KinematicEstimate estimate_acceleration(const MeasurementSet& measurements,
                                        const SensorArray& sensors, const Vec2& p_hat,
                                        const Vec2& v_hat, const WeightRule& rule,
                                        const EstimatorConfig& config) {
  const std::vector<double> k =
      acceleration_pseudo_measurements(measurements, sensors, p_hat, v_hat, config.pseudo_range_source);
  const std::vector<Vec2> rows = stage_rows(sensors, p_hat);
  const int passes = checked_passes(config);
  KinematicEstimate est;
  for (int pass = 0; pass < passes; ++pass) {
    const std::vector<double> w = stage_weights(measurements, sensors, p_hat, rule);
    est = solve_linear_stage(rows, k, w, method_for(rule), config.condition_cap);
  }
  return est;
}

EstimationResult estimate_all(const MeasurementSet& measurements, const SensorArray& sensors,
                              const EstimatorConfig& config) {
  EstimationResult out;
  out.position = estimate_position(measurements, sensors, config.condition_cap);
  const Vec2& p_hat = out.position.position;
  out.velocity_ls = estimate_velocity(measurements, sensors, p_hat, WeightRule::uniform(), config);
  out.velocity_wls = estimate_velocity(measurements, sensors, p_hat, config.wls_weights, config);
  out.accel_ls = estimate_acceleration(measurements, sensors, p_hat, out.velocity_ls.value,
                                       WeightRule::uniform(), config);
  out.accel_wls = estimate_acceleration(measurements, sensors, p_hat, out.velocity_wls.value,
                                        config.wls_weights, config);
  return out;
}

}  // namespace rangekin
