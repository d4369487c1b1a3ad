#pragma once

#include <span>
#include <vector>

#include "rangekin/model.hpp"

namespace rangekin {

inline constexpr double kDefaultConditionCap = 1e12;

enum class WeightMode { Uniform, InverseRange, InverseRangeSq };

/// Which realization of the unknown true range r_i is used.
enum class RangeSource { EstimatedPosition, MeasuredRange };

/// WLS weighting. The default (1/r with r taken from the position estimate)
/// is the reference rule; Uniform yields W = I and reduces WLS to LS.
struct WeightRule {
  WeightMode mode = WeightMode::InverseRange;
  RangeSource source = RangeSource::EstimatedPosition;

  static constexpr WeightRule uniform() { return {WeightMode::Uniform, RangeSource::EstimatedPosition}; }
};

enum class Method { LS, WLS };

struct PositionSolution {
  Vec2 position;               // (theta_1, theta_2)
  double theta3 = 0.0;         // unconstrained estimate of |p|^2, diagnostic only
  double residual_norm = 0.0;  // ||A theta - f||_2
  double condition = 1.0;      // condition number of the column-equilibrated normal matrix
};

struct KinematicEstimate {
  Vec2 value;
  Method method = Method::LS;
  double gram_condition = 1.0;
  double residual_norm = 0.0;  // sqrt of the weighted cost at the solution
  std::vector<double> pseudo_measurements;
};

/// Linear stage in the unknown x: rhs_i ~ rows_i . x, weighted by weights_i.
struct LinearSystem {
  std::vector<Vec2> rows;
  std::vector<double> rhs;
  std::vector<double> weights;
};

struct EstimatorConfig {
  WeightRule wls_weights{};
  /// Realization of r_i inside the pseudo-measurements d_i = a_i r_i and k_i.
  RangeSource pseudo_range_source = RangeSource::EstimatedPosition;
  double condition_cap = kDefaultConditionCap;
  /// Number of weight-then-solve passes per stage (>= 1). The weights depend
  /// only on the position estimate, so passes beyond the first reproduce it.
  int reweight_passes = 1;
};

struct EstimationResult {
  PositionSolution position;
  KinematicEstimate velocity_ls;
  KinematicEstimate velocity_wls;
  KinematicEstimate accel_ls;
  KinematicEstimate accel_wls;
};

/// Unconstrained TOA trilateration: theta = pinv(A) f with rows
/// A_i = [-2x_i, -2y_i, 1] and f_i = rbar_i^2 - x_i^2 - y_i^2.
/// Throws TooFewSensors (N < 3) or DegenerateGeometry (A rank deficient).
PositionSolution estimate_position(const MeasurementSet& measurements, const SensorArray& sensors,
                                   double condition_cap = kDefaultConditionCap);

/// Per-sensor weights under `rule`, evaluated at the position estimate.
std::vector<double> stage_weights(const MeasurementSet& measurements, const SensorArray& sensors,
                                  const Vec2& p_hat, const WeightRule& rule);

/// Rows (p_hat - p_i), pseudo-measurements d_i = a_i r_i and weights for the velocity stage.
LinearSystem build_velocity_system(const MeasurementSet& measurements, const SensorArray& sensors,
                                   const Vec2& p_hat, const WeightRule& rule,
                                   RangeSource pseudo_range_source = RangeSource::EstimatedPosition);

/// Exact minimizer of sum_i w_i (rhs_i - rows_i . x)^2 via the 2x2 normal equations.
/// Throws SingularGeometry when the Gram matrix is singular or its condition
/// number exceeds `condition_cap`.
KinematicEstimate solve_linear_stage(std::span<const Vec2> rows, std::span<const double> rhs,
                                     std::span<const double> weights, Method method = Method::LS,
                                     double condition_cap = kDefaultConditionCap);

KinematicEstimate estimate_velocity(const MeasurementSet& measurements, const SensorArray& sensors,
                                    const Vec2& p_hat, const WeightRule& rule,
                                    const EstimatorConfig& config = {});

/// k_i = b_i r_i - |v_hat|^2 + a_i^2, which equals a_s . (p_s - p_i) for exact inputs.
std::vector<double> acceleration_pseudo_measurements(
    const MeasurementSet& measurements, const SensorArray& sensors, const Vec2& p_hat,
    const Vec2& v_hat, RangeSource pseudo_range_source = RangeSource::EstimatedPosition);

KinematicEstimate estimate_acceleration(const MeasurementSet& measurements,
                                        const SensorArray& sensors, const Vec2& p_hat,
                                        const Vec2& v_hat, const WeightRule& rule,
                                        const EstimatorConfig& config = {});

/// Full sequential pipeline. The LS acceleration consumes the LS velocity and
/// the WLS acceleration consumes the WLS velocity.
EstimationResult estimate_all(const MeasurementSet& measurements, const SensorArray& sensors,
                              const EstimatorConfig& config = {});

}  // namespace rangekin
