#include "rangekin/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace rangekin::mc {

namespace {

enum TrialStream : std::uint64_t { kTruthStream = 0, kMeasurementStream = 1 };

void validate_box(const Box& box, const char* name) {
  if (box.min.x() > box.max.x() || box.min.y() > box.max.y()) {
    throw Error(ErrorKind::InvalidInput, std::string(name) + " box has min > max");
  }
}

Vec2 sample_box(std::mt19937_64& engine, const Box& box) {
  std::uniform_real_distribution<double> ux(box.min.x(), box.max.x());
  std::uniform_real_distribution<double> uy(box.min.y(), box.max.y());
  const double x = ux(engine);
  return {x, uy(engine)};
}

TargetState sample_truth(const Scenario& scenario, const RandomStream& stream) {
  auto engine = stream.engine();
  TargetState truth;
  truth.position = sample_box(engine, scenario.position_box);
  truth.velocity = sample_box(engine, scenario.velocity_box);
  // Always drawn so position/velocity match across motion modes for a given seed.
  const Vec2 accel = sample_box(engine, scenario.acceleration_box);
  truth.acceleration = scenario.motion == MotionMode::ConstantAcceleration ? accel : Vec2{};
  return truth;
}

template <typename F>
auto timed(double& seconds, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  auto result = f();
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorKind::InvalidInput, "sweep grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
      throw Error(ErrorKind::InvalidInput, "sweep grid values must be finite and > 0");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error(ErrorKind::InvalidInput, "sweep grid must be strictly increasing");
    }
  }
}

SweepPoint aggregate(double sigma, const std::vector<TrialRecord>& records) {
  SweepPoint point;
  point.sigma = sigma;
  point.attempted = static_cast<int>(records.size());
  int successes = 0;
  for (const TrialRecord& rec : records) {
    if (!rec.ok()) {
      ++point.failures;
      continue;
    }
    ++successes;
    for (std::size_t s = 0; s < kStageCount; ++s) point.mean_runtime[s] += rec.wall_times[s];
  }
  for (std::size_t s = 0; s < kStageCount; ++s) {
    point.rmse[s] = rmse(records, kStages[s]);
    point.mean_runtime[s] /= successes;
  }
  return point;
}

SweepResult run_sweep(Scenario scenario, std::span<const double> grid, double NoiseSpec::*swept,
                      std::string parameter, const SweepOptions& options) {
  check_grid(grid);
  SweepResult out;
  out.parameter = std::move(parameter);
  for (double sigma : grid) {
    scenario.noise.*swept = sigma;
    scenario.validate();
    out.points.push_back(aggregate(sigma, run_trials(scenario, options.threads)));
  }
  return out;
}

}  // namespace

void Scenario::validate() const {
  validate_box(position_box, "position");
  validate_box(velocity_box, "velocity");
  validate_box(acceleration_box, "acceleration");
  noise.validate();
  if (trials < 1) throw Error(ErrorKind::InvalidInput, "trials must be >= 1");
}

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::Position:
      return "position";
    case Stage::VelocityLs:
      return "velocity_ls";
    case Stage::VelocityWls:
      return "velocity_wls";
    case Stage::AccelLs:
      return "accel_ls";
    case Stage::AccelWls:
      return "accel_wls";
  }
  return "unknown";
}

TrialRecord run_trial(const Scenario& scenario, int trial_index) {
  const RandomStream stream =
      RandomStream(scenario.seed).child(static_cast<std::uint64_t>(trial_index));
  TrialRecord rec;
  rec.index = trial_index;
  rec.truth = sample_truth(scenario, stream.child(kTruthStream));

  const SensorArray& sensors = scenario.sensors;
  const EstimatorConfig& cfg = scenario.estimator;
  auto& t = rec.wall_times;
  try {
    const MeasurementSet m = synthesize_measurements(rec.truth, sensors, scenario.noise,
                                                     stream.child(kMeasurementStream));
    EstimationResult est;
    est.position = timed(t[0], [&] { return estimate_position(m, sensors, cfg.condition_cap); });
    const Vec2 p_hat = est.position.position;
    est.velocity_ls = timed(t[1], [&] {
      return estimate_velocity(m, sensors, p_hat, WeightRule::uniform(), cfg);
    });
    est.velocity_wls =
        timed(t[2], [&] { return estimate_velocity(m, sensors, p_hat, cfg.wls_weights, cfg); });
    est.accel_ls = timed(t[3], [&] {
      return estimate_acceleration(m, sensors, p_hat, est.velocity_ls.value, WeightRule::uniform(),
                                   cfg);
    });
    est.accel_wls = timed(t[4], [&] {
      return estimate_acceleration(m, sensors, p_hat, est.velocity_wls.value, cfg.wls_weights, cfg);
    });

    const std::array<Vec2, kStageCount> truth{rec.truth.position, rec.truth.velocity,
                                              rec.truth.velocity, rec.truth.acceleration,
                                              rec.truth.acceleration};
    const std::array<Vec2, kStageCount> estimate{est.position.position, est.velocity_ls.value,
                                                 est.velocity_wls.value, est.accel_ls.value,
                                                 est.accel_wls.value};
    for (std::size_t s = 0; s < kStageCount; ++s) {
      rec.squared_errors[s] = (truth[s] - estimate[s]).squared_norm();
    }
    rec.estimates = std::move(est);
  } catch (const Error& e) {
    rec.failure = e.kind();
    rec.squared_errors = {};
    rec.wall_times = {};
  }
  return rec;
}

std::vector<TrialRecord> run_trials(const Scenario& scenario, unsigned threads) {
  scenario.validate();
  const auto k = static_cast<std::size_t>(scenario.trials);
  std::vector<TrialRecord> records(k);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, k));

  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < k; i += threads) {
      records[i] = run_trial(scenario, static_cast<int>(i));
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  return records;
}

double rmse(std::span<const TrialRecord> records, Stage stage) {
  const auto s = static_cast<std::size_t>(stage);
  double sum = 0.0;
  std::size_t count = 0;
  for (const TrialRecord& rec : records) {
    if (!rec.ok()) continue;
    sum += rec.squared_errors[s];
    ++count;
  }
  if (count == 0) throw Error(ErrorKind::EmptyEnsemble, "no successful trials to aggregate");
  return std::sqrt(sum / static_cast<double>(count));
}

SweepResult sweep_velocity_experiment(const Scenario& base, std::span<const double> sigma_rr_grid,
                                      const SweepOptions& options) {
  Scenario scenario = base;
  scenario.motion = MotionMode::ConstantVelocity;
  scenario.noise.sigma_range = 1.0;
  return run_sweep(scenario, sigma_rr_grid, &NoiseSpec::sigma_range_rate, "sigma_range_rate",
                   options);
}

SweepResult sweep_acceleration_experiment(const Scenario& base,
                                          std::span<const double> sigma_drr_grid,
                                          const SweepOptions& options) {
  Scenario scenario = base;
  scenario.motion = MotionMode::ConstantAcceleration;
  scenario.noise.sigma_range = 1.0;
  scenario.noise.sigma_range_rate = 1.0;
  return run_sweep(scenario, sigma_drr_grid, &NoiseSpec::sigma_drr, "sigma_drr", options);
}

std::vector<TimingRow> timing_report(const SweepResult& sweep) {
  StageValues total{};
  double successes = 0.0;
  for (const SweepPoint& p : sweep.points) {
    const double n = p.attempted - p.failures;
    for (std::size_t s = 0; s < kStageCount; ++s) total[s] += p.mean_runtime[s] * n;
    successes += n;
  }
  std::vector<TimingRow> rows;
  for (std::size_t s = 0; s < kStageCount; ++s) {
    rows.push_back({kStages[s], successes > 0.0 ? total[s] / successes : 0.0});
  }
  return rows;
}

}  // namespace rangekin::mc
