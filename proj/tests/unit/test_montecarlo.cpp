#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "rangekin/montecarlo.hpp"

using namespace rangekin;
using namespace rangekin::mc;

namespace {

std::size_t at(Stage s) { return static_cast<std::size_t>(s); }

TrialRecord record_with_error(double ex, double ey) {
  TrialRecord r;
  r.squared_errors.fill(ex * ex + ey * ey);
  return r;
}

Scenario small_scenario(int trials) {
  Scenario sc;
  sc.trials = trials;
  return sc;
}

TEST(Scenario, Validation) {
  Scenario sc;
  EXPECT_NO_THROW(sc.validate());
  sc.trials = 0;
  EXPECT_THROW(sc.validate(), Error);
  sc.trials = 10;
  sc.position_box = {{10, 0}, {0, 100}};
  EXPECT_THROW(sc.validate(), Error);
}

TEST(RunTrial, NoiselessTrialIsExact) {
  Scenario sc = small_scenario(50);
  sc.noise = NoiseSpec::noiseless();
  sc.motion = MotionMode::ConstantAcceleration;
  for (int i = 0; i < sc.trials; ++i) {
    const TrialRecord r = run_trial(sc, i);
    ASSERT_TRUE(r.ok());
    for (double e : r.squared_errors) EXPECT_LE(e, 1e-10);
  }
}

TEST(RunTrial, DeterministicPerIndex) {
  const Scenario sc = small_scenario(10);
  const TrialRecord a = run_trial(sc, 3);
  const TrialRecord b = run_trial(sc, 3);
  EXPECT_EQ(a.truth.position, b.truth.position);
  EXPECT_EQ(a.truth.velocity, b.truth.velocity);
  EXPECT_EQ(a.squared_errors, b.squared_errors);
  ASSERT_TRUE(a.estimates && b.estimates);
  EXPECT_EQ(a.estimates->accel_wls.value, b.estimates->accel_wls.value);
  EXPECT_NE(run_trial(sc, 4).truth.position, a.truth.position);
}

TEST(RunTrial, TruthInsideBoxes) {
  Scenario sc;
  sc.seed = 1;
  const TrialRecord r0 = run_trial(sc, 0);
  EXPECT_GE(r0.truth.position.x(), 0.0);
  EXPECT_LE(r0.truth.position.x(), 100.0);
  EXPECT_GE(r0.truth.position.y(), 0.0);
  EXPECT_LE(r0.truth.position.y(), 100.0);
  EXPECT_EQ(r0.truth.acceleration, Vec2(0, 0));  // constant velocity mode

  sc.motion = MotionMode::ConstantAcceleration;
  for (int i = 0; i < 200; ++i) {
    const TrialRecord r = run_trial(sc, i);
    EXPECT_LE(std::abs(r.truth.velocity.x()), 20.0);
    EXPECT_LE(std::abs(r.truth.acceleration.y()), 10.0);
  }
  // Acceleration is drawn in both modes, so position and velocity do not depend on the mode.
  EXPECT_EQ(run_trial(sc, 0).truth.velocity, r0.truth.velocity);
}

TEST(RunTrial, EstimatorErrorsAreCaptured) {
  Scenario sc = small_scenario(5);
  sc.sensors = SensorArray({{0, 0}, {50, 0}, {100, 0}});
  const TrialRecord r = run_trial(sc, 0);
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.failure, ErrorKind::DegenerateGeometry);
  EXPECT_FALSE(r.estimates.has_value());
}

TEST(Rmse, Examples) {
  const std::vector<TrialRecord> zeros(3, record_with_error(0, 0));
  EXPECT_EQ(rmse(zeros, Stage::Position), 0.0);

  const std::vector<TrialRecord> single{record_with_error(3, 4)};
  EXPECT_DOUBLE_EQ(rmse(single, Stage::VelocityLs), 5.0);

  const std::vector<TrialRecord> two{record_with_error(1, 0), record_with_error(0, 1)};
  EXPECT_DOUBLE_EQ(rmse(two, Stage::AccelWls), 1.0);
}

TEST(Rmse, SkipsFailuresAndRejectsEmptyEnsembles) {
  std::vector<TrialRecord> recs{record_with_error(3, 4), record_with_error(100, 0)};
  recs[1].failure = ErrorKind::SingularGeometry;
  EXPECT_DOUBLE_EQ(rmse(recs, Stage::Position), 5.0);

  recs[0].failure = ErrorKind::DegenerateGeometry;
  try {
    rmse(recs, Stage::Position);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyEnsemble);
  }
  EXPECT_THROW(rmse(std::vector<TrialRecord>{}, Stage::Position), Error);
}

TEST(RunTrials, ThreadCountDoesNotChangeResults) {
  const Scenario sc = small_scenario(301);
  const auto one = run_trials(sc, 1);
  const auto many = run_trials(sc, 4);
  ASSERT_EQ(one.size(), many.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].index, static_cast<int>(i));
    EXPECT_EQ(one[i].squared_errors, many[i].squared_errors);
  }
}

TEST(RunTrials, FailureAccountingAddsUpToK) {
  // A tight condition cap rejects the worst random geometries but not all of them.
  Scenario sc = small_scenario(1000);
  sc.estimator.condition_cap = 3.0;
  const SweepResult sweep = sweep_velocity_experiment(sc, std::vector<double>{1.0});
  const SweepPoint& p = sweep.points.at(0);
  EXPECT_EQ(p.attempted, 1000);
  EXPECT_GT(p.failures, 0);
  EXPECT_LT(p.failures, 1000);
  const auto recs = run_trials([&] {
    Scenario s = sc;
    s.noise.sigma_range_rate = 1.0;
    return s;
  }());
  const auto ok = std::count_if(recs.begin(), recs.end(), [](const TrialRecord& r) { return r.ok(); });
  EXPECT_EQ(ok + p.failures, 1000);
}

TEST(Sweep, GridValidation) {
  const Scenario sc = small_scenario(5);
  EXPECT_THROW(sweep_velocity_experiment(sc, std::vector<double>{}), Error);
  EXPECT_THROW(sweep_velocity_experiment(sc, std::vector<double>{1.0, 1.0}), Error);
  EXPECT_THROW(sweep_velocity_experiment(sc, std::vector<double>{-1.0}), Error);
}

TEST(Sweep, AllFailuresPropagateEmptyEnsemble) {
  Scenario sc = small_scenario(5);
  sc.sensors = SensorArray({{0, 0}, {50, 0}, {100, 0}});
  try {
    sweep_acceleration_experiment(sc, std::vector<double>{0.1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyEnsemble);
  }
}

TEST(Sweep, VelocityExperimentIsDeterministic) {
  Scenario sc = small_scenario(1000);
  const std::vector<double> grid{0.1};
  const SweepResult a = sweep_velocity_experiment(sc, grid);
  const SweepResult b = sweep_velocity_experiment(sc, grid, {4});
  ASSERT_EQ(a.points.size(), 1u);
  EXPECT_EQ(a.parameter, "sigma_range_rate");
  EXPECT_EQ(a.points[0].rmse, b.points[0].rmse);
  EXPECT_EQ(a.points[0].attempted, 1000);
}

TEST(Sweep, AccelerationExperimentIsDeterministic) {
  const Scenario sc = small_scenario(1000);
  const std::vector<double> grid{0.01};
  const SweepResult a = sweep_acceleration_experiment(sc, grid);
  const SweepResult b = sweep_acceleration_experiment(sc, grid);
  EXPECT_EQ(a.parameter, "sigma_drr");
  EXPECT_EQ(a.points[0].rmse, b.points[0].rmse);
}

TEST(Sweep, VelocityExperimentShape) {
  const SweepResult s = sweep_velocity_experiment(Scenario{}, kVelocityGrid);
  const SweepPoint& lo = s.points.front();
  const SweepPoint& hi = s.points.back();
  EXPECT_GT(hi.rmse[at(Stage::VelocityLs)], lo.rmse[at(Stage::VelocityLs)]);
  EXPECT_GT(hi.rmse[at(Stage::VelocityWls)], lo.rmse[at(Stage::VelocityWls)]);
  double pmin = 1e300, pmax = 0;
  for (const SweepPoint& p : s.points) {
    pmin = std::min(pmin, p.rmse[at(Stage::Position)]);
    pmax = std::max(pmax, p.rmse[at(Stage::Position)]);
  }
  EXPECT_LT((pmax - pmin) / pmin, 0.05);
}

TEST(Sweep, AccelerationExperimentEndpointsIncrease) {
  const SweepResult s = sweep_acceleration_experiment(Scenario{}, kAccelerationGrid);
  EXPECT_GT(s.points.back().rmse[at(Stage::AccelLs)], s.points.front().rmse[at(Stage::AccelLs)]);
  EXPECT_GT(s.points.back().rmse[at(Stage::AccelWls)], s.points.front().rmse[at(Stage::AccelWls)]);
}

// LS/WLS ordering claims. Each compares WLS against LS with a 2% sampling allowance.

TEST(StatisticalOrdering, VelocityWlsNotWorseThanLs) {
  const SweepResult s = sweep_velocity_experiment(Scenario{}, std::vector<double>{1.0});
  const SweepPoint& p = s.points[0];
  EXPECT_LE(p.rmse[at(Stage::VelocityWls)], 1.02 * p.rmse[at(Stage::VelocityLs)]);
}

TEST(StatisticalOrdering, AccelerationWlsNotWorseThanLsAtDrrNoise0p1) {
  const SweepResult s = sweep_acceleration_experiment(Scenario{}, std::vector<double>{0.1});
  const SweepPoint& p = s.points[0];
  EXPECT_LE(p.rmse[at(Stage::AccelWls)], 1.02 * p.rmse[at(Stage::AccelLs)])
      << "accel RMSE LS " << p.rmse[at(Stage::AccelLs)] << ", WLS " << p.rmse[at(Stage::AccelWls)];
}

TEST(StatisticalOrdering, FreshSeedWithDoubledKAgreesWithinThreeStandardErrors) {
  Scenario a;
  a.motion = MotionMode::ConstantAcceleration;
  a.trials = 1000;
  a.seed = 11;
  Scenario b = a;
  b.trials = 2000;
  b.seed = 12;
  const auto ra = run_trials(a);
  const auto rb = run_trials(b);
  // Delta-method standard error of an RMSE: sd(e^2) / (2 rmse sqrt(K)).
  auto se = [](const std::vector<TrialRecord>& recs, Stage st) {
    double m = 0, m2 = 0;
    for (const auto& r : recs) {
      m += r.squared_errors[at(st)];
      m2 += r.squared_errors[at(st)] * r.squared_errors[at(st)];
    }
    const double k = static_cast<double>(recs.size());
    m /= k;
    const double var = m2 / k - m * m;
    return std::sqrt(var) / (2 * std::sqrt(m) * std::sqrt(k));
  };
  for (Stage st : kStages) {
    const double diff = std::abs(rmse(ra, st) - rmse(rb, st));
    const double bound = 3 * std::hypot(se(ra, st), se(rb, st));
    EXPECT_LT(diff, bound) << to_string(st);
  }
}

TEST(TimingReport, ListsFiveMethods) {
  SweepResult empty;
  empty.points.push_back({});
  empty.points[0].attempted = 10;
  const auto zeros = timing_report(empty);
  ASSERT_EQ(zeros.size(), kStageCount);
  for (const TimingRow& row : zeros) EXPECT_EQ(row.mean_seconds, 0.0);

  const SweepResult s = sweep_velocity_experiment(small_scenario(1000), std::vector<double>{1.0});
  const auto rows = timing_report(s);
  ASSERT_EQ(rows.size(), kStageCount);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].stage, kStages[i]);
    EXPECT_GE(rows[i].mean_seconds, 0.0);
    EXPECT_LT(rows[i].mean_seconds, 1e-3);
  }
}

}  // namespace
