#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rangekin/estim.hpp"
#include "rangekin/model.hpp"

namespace rangekin::mc {

enum class MotionMode { ConstantVelocity, ConstantAcceleration };

struct Box {
  Vec2 min;
  Vec2 max;
};

struct Scenario {
  SensorArray sensors = SensorArray::reference_layout();
  Box position_box{{0, 0}, {100, 100}};
  Box velocity_box{{-20, -20}, {20, 20}};
  Box acceleration_box{{-10, -10}, {10, 10}};
  NoiseSpec noise{};
  int trials = 1000;
  std::uint64_t seed = 1;
  MotionMode motion = MotionMode::ConstantVelocity;
  EstimatorConfig estimator{};

  /// Throws InvalidInput on inverted boxes, K < 1 or invalid noise.
  void validate() const;
};

/// The five estimators, in reporting order.
enum class Stage { Position, VelocityLs, VelocityWls, AccelLs, AccelWls };
inline constexpr std::size_t kStageCount = 5;
inline constexpr std::array<Stage, kStageCount> kStages{Stage::Position, Stage::VelocityLs,
                                                        Stage::VelocityWls, Stage::AccelLs,
                                                        Stage::AccelWls};
std::string_view to_string(Stage stage) noexcept;

using StageValues = std::array<double, kStageCount>;

struct TrialRecord {
  int index = 0;
  TargetState truth;
  std::optional<EstimationResult> estimates;  // empty when the trial failed
  std::optional<ErrorKind> failure;
  StageValues squared_errors{};  // |m - m_hat|^2 per stage
  StageValues wall_times{};      // seconds per stage

  bool ok() const noexcept { return !failure.has_value(); }
};

/// Samples the truth from stream (seed, trial_index), synthesizes measurements
/// and runs every estimator. Estimator errors are captured in the record.
TrialRecord run_trial(const Scenario& scenario, int trial_index);

/// All K trials, optionally on several threads. Output is in index order and
/// independent of the thread count. threads == 0 means hardware concurrency.
std::vector<TrialRecord> run_trials(const Scenario& scenario, unsigned threads = 1);

/// sqrt(mean |m - m_hat|^2) over successful records. Throws EmptyEnsemble if none.
double rmse(std::span<const TrialRecord> records, Stage stage);

struct SweepPoint {
  double sigma = 0.0;
  StageValues rmse{};
  StageValues mean_runtime{};  // seconds per successful trial
  int attempted = 0;
  int failures = 0;
};

struct SweepResult {
  std::string parameter;  // "sigma_range_rate" or "sigma_drr"
  std::vector<SweepPoint> points;
};

struct SweepOptions {
  unsigned threads = 1;
};

/// Reference velocity experiment: constant velocity, sigma_range = 1, sweep
/// sigma_range_rate over `grid`. Other fields of `base` are kept.
SweepResult sweep_velocity_experiment(const Scenario& base, std::span<const double> sigma_rr_grid,
                                      const SweepOptions& options = {});

/// Reference acceleration experiment: constant acceleration,
/// sigma_range = sigma_range_rate = 1, sweep sigma_drr over `grid`.
SweepResult sweep_acceleration_experiment(const Scenario& base,
                                          std::span<const double> sigma_drr_grid,
                                          const SweepOptions& options = {});

struct TimingRow {
  Stage stage;
  double mean_seconds;
};

/// Mean per-trial wall time of each estimator over every successful trial in the sweep.
std::vector<TimingRow> timing_report(const SweepResult& sweep);

inline constexpr std::array<double, 5> kVelocityGrid{0.1, 0.3, 1.0, 3.0, 10.0};
inline constexpr std::array<double, 5> kAccelerationGrid{0.01, 0.03, 0.1, 0.3, 1.0};

}  // namespace rangekin::mc
