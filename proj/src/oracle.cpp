#include "rangekin/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rangekin/estim.hpp"

namespace rangekin::oracle {

namespace {

constexpr double kMinVerificationRange = 10.0;  // m
constexpr double kOrderProbeStep = 1e-2;        // s
constexpr double kWellConditionedGram = 1e4;

double range_at(const TargetState& target, const Vec2& sensor, double t) {
  const double r = range(propagate(target, t).position, sensor);
  if (r == 0.0) throw Error(ErrorKind::ZeroRange, "trajectory passes through the sensor");
  return r;
}

double central_first(const TargetState& target, const Vec2& sensor, double h) {
  return (range_at(target, sensor, h) - range_at(target, sensor, -h)) / (2.0 * h);
}

double central_second(const TargetState& target, const Vec2& sensor, double h) {
  return (range_at(target, sensor, h) - 2.0 * range_at(target, sensor, 0.0) +
          range_at(target, sensor, -h)) /
         (h * h);
}

Vec2 uniform_vec(std::mt19937_64& engine, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  const double x = dist(engine);
  return {x, dist(engine)};
}

}  // namespace

void FdConfig::validate() const {
  if (!(step > 0.0 && step <= 1.0)) {
    throw Error(ErrorKind::InvalidInput, "finite-difference step must lie in (0, 1]");
  }
}

double fd_range_rate(const TargetState& target, const Vec2& sensor_position, const FdConfig& cfg) {
  cfg.validate();
  const double coarse = central_first(target, sensor_position, cfg.step);
  if (!cfg.richardson) return coarse;
  const double fine = central_first(target, sensor_position, 0.5 * cfg.step);
  return (4.0 * fine - coarse) / 3.0;
}

double fd_range_accel(const TargetState& target, const Vec2& sensor_position, const FdConfig& cfg) {
  cfg.validate();
  const double coarse = central_second(target, sensor_position, cfg.step);
  if (!cfg.richardson) return coarse;
  const double fine = central_second(target, sensor_position, 0.5 * cfg.step);
  return (4.0 * fine - coarse) / 3.0;
}

Eigen::VectorXd dense_wls_solve(const Eigen::MatrixXd& rows, std::span<const double> rhs,
                                std::span<const double> weights) {
  const auto n = rows.rows();
  if (static_cast<std::size_t>(n) != rhs.size() || rhs.size() != weights.size()) {
    throw Error(ErrorKind::InvalidInput, "rows, rhs and weights must have equal length");
  }
  if (rows.cols() < 1 || rows.cols() > n) {
    throw Error(ErrorKind::InvalidInput, "system must have 1 <= unknowns <= equations");
  }
  Eigen::MatrixXd scaled(rows);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = weights[static_cast<std::size_t>(i)];
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorKind::InvalidInput, "weights must be finite and >= 0");
    }
    const double sw = std::sqrt(w);
    scaled.row(i) *= sw;
    b(i) = sw * rhs[static_cast<std::size_t>(i)];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  if (qr.rank() < rows.cols()) {
    throw Error(ErrorKind::SingularGeometry, "weighted design matrix is rank deficient");
  }
  return qr.solve(b);
}

bool VerifyReport::range_rate_ok() const {
  return max_range_rate_error <= kRangeRateTolerance && range_rate_order >= kMinConvergenceOrder;
}

bool VerifyReport::range_accel_ok() const {
  return max_range_accel_error <= kRangeAccelTolerance &&
         range_accel_order >= kMinConvergenceOrder;
}

bool VerifyReport::solver_ok() const {
  return max_solver_relative_deviation <= kSolverRelativeTolerance;
}

TargetState random_verification_state(const RandomStream& stream, const Vec2& sensor) {
  auto engine = stream.engine();
  for (;;) {
    TargetState s{uniform_vec(engine, 0.0, 100.0), uniform_vec(engine, -20.0, 20.0),
                  uniform_vec(engine, -10.0, 10.0)};
    if (range(s.position, sensor) >= kMinVerificationRange) return s;
  }
}

VerifyReport run_verification(const VerifyOptions& options) {
  const SensorArray sensors = SensorArray::reference_layout();
  const RandomStream root(options.seed);
  const RandomStream derivative_root = root.child(0);
  const RandomStream solver_root = root.child(1);

  VerifyReport report;
  report.instances = options.instances;

  // Derivative oracles. Order is measured from the summed errors at h and h/2
  // with a step large enough that truncation dominates roundoff.
  double rate_err_h = 0.0, rate_err_h2 = 0.0, accel_err_h = 0.0, accel_err_h2 = 0.0;
  for (std::size_t k = 0; k < options.instances; ++k) {
    const RandomStream stream = derivative_root.child(k);
    auto pick = stream.child(0).engine();
    const Vec2& sensor = sensors[std::uniform_int_distribution<std::size_t>(0, sensors.size() - 1)(pick)];
    const TargetState state = random_verification_state(stream.child(1), sensor);

    const double rate = range_rate(state, sensor);
    double accel = range_accel(state, sensor);
    if (options.inject_range_accel_sign_error) accel = -accel;

    report.max_range_rate_error =
        std::max(report.max_range_rate_error, std::abs(fd_range_rate(state, sensor) - rate));
    report.max_range_accel_error =
        std::max(report.max_range_accel_error, std::abs(fd_range_accel(state, sensor) - accel));

    const FdConfig coarse{kOrderProbeStep, false};
    const FdConfig fine{0.5 * kOrderProbeStep, false};
    rate_err_h += std::abs(fd_range_rate(state, sensor, coarse) - rate);
    rate_err_h2 += std::abs(fd_range_rate(state, sensor, fine) - rate);
    accel_err_h += std::abs(fd_range_accel(state, sensor, coarse) - accel);
    accel_err_h2 += std::abs(fd_range_accel(state, sensor, fine) - accel);
  }
  if (options.instances > 0) {
    report.range_rate_order = std::log2(rate_err_h / rate_err_h2);
    report.range_accel_order = std::log2(accel_err_h / accel_err_h2);
  }

  // Closed-form 2x2 stage solver against the QR route.
  for (std::size_t k = 0; k < options.instances; ++k) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      auto engine = solver_root.child(k).child(attempt).engine();
      const std::size_t n = std::uniform_int_distribution<std::size_t>(3, 12)(engine);
      const Vec2 p_hat = uniform_vec(engine, 0.0, 100.0);
      std::vector<Vec2> rows;
      std::vector<double> rhs, weights;
      Eigen::MatrixXd dense(static_cast<Eigen::Index>(n), 2);
      std::uniform_real_distribution<double> rhs_dist(-1000.0, 1000.0);
      std::uniform_real_distribution<double> weight_dist(0.05, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 row = p_hat - uniform_vec(engine, -100.0, 100.0);
        rows.push_back(row);
        rhs.push_back(rhs_dist(engine));
        weights.push_back(weight_dist(engine));
        dense(static_cast<Eigen::Index>(i), 0) = row.x();
        dense(static_cast<Eigen::Index>(i), 1) = row.y();
      }
      KinematicEstimate closed;
      try {
        closed = solve_linear_stage(rows, rhs, weights, Method::WLS);
      } catch (const Error&) {
        continue;
      }
      if (closed.gram_condition > kWellConditionedGram) continue;
      const Eigen::VectorXd ref = dense_wls_solve(dense, rhs, weights);
      const Eigen::Vector2d mine(closed.value.x(), closed.value.y());
      const double dev = (mine - ref).norm() / ref.norm();
      report.max_solver_relative_deviation = std::max(report.max_solver_relative_deviation, dev);
      break;
    }
  }
  return report;
}

}  // namespace rangekin::oracle
