#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

#include "rangekin/model.hpp"

namespace rangekin::oracle {

struct FdConfig {
  double step = 1e-4;       // s, in (0, 1]
  bool richardson = false;  // one Richardson extrapolation level (h and h/2)

  void validate() const;
};

inline constexpr FdConfig kFirstDerivativeDefaults{1e-4, false};
inline constexpr FdConfig kSecondDerivativeDefaults{1e-3, false};

/// (r(+h) - r(-h)) / 2h along the constant-acceleration trajectory.
double fd_range_rate(const TargetState& target, const Vec2& sensor_position,
                     const FdConfig& cfg = kFirstDerivativeDefaults);

/// (r(+h) - 2 r(0) + r(-h)) / h^2 along the constant-acceleration trajectory.
double fd_range_accel(const TargetState& target, const Vec2& sensor_position,
                      const FdConfig& cfg = kSecondDerivativeDefaults);

/// Reference weighted least squares through column-pivoted Householder QR of
/// diag(sqrt(w)) * rows. Throws SingularGeometry when the scaled matrix is rank
/// deficient.
Eigen::VectorXd dense_wls_solve(const Eigen::MatrixXd& rows, std::span<const double> rhs,
                                std::span<const double> weights);

struct VerifyOptions {
  std::size_t instances = 1000;
  std::uint64_t seed = 1;
  /// Flips the sign of the analytic range acceleration before comparison, to
  /// prove the suite detects a wrong formula.
  bool inject_range_accel_sign_error = false;
};

/// Tolerances that decide pass/fail in run_verification.
inline constexpr double kRangeRateTolerance = 1e-6;
inline constexpr double kRangeAccelTolerance = 1e-4;
inline constexpr double kSolverRelativeTolerance = 1e-9;
inline constexpr double kMinConvergenceOrder = 1.9;

struct VerifyReport {
  std::size_t instances = 0;
  double max_range_rate_error = 0.0;
  double max_range_accel_error = 0.0;
  double range_rate_order = 0.0;
  double range_accel_order = 0.0;
  double max_solver_relative_deviation = 0.0;

  bool range_rate_ok() const;
  bool range_accel_ok() const;
  bool solver_ok() const;
  bool passed() const { return range_rate_ok() && range_accel_ok() && solver_ok(); }
};

/// Random kinematic state inside the reference boxes with the target at least
/// 10 m from `sensor`.
TargetState random_verification_state(const RandomStream& stream, const Vec2& sensor);

/// Derivative oracles against the analytic formulas and the closed-form stage
/// solver against dense_wls_solve, on `instances` seeded random draws.
VerifyReport run_verification(const VerifyOptions& options = {});

}  // namespace rangekin::oracle
