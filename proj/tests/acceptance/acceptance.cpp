// Acceptance suite: one line per criterion, nonzero exit if any criterion fails.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "rangekin/estim.hpp"
#include "rangekin/montecarlo.hpp"
#include "rangekin/oracle.hpp"

using namespace rangekin;
using mc::Stage;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::size_t at(Stage s) { return static_cast<std::size_t>(s); }

// 1. Noiseless consistency over 100 random scenarios.
Outcome noiseless_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  mc::Scenario sc;
  sc.noise = NoiseSpec::noiseless();
  sc.motion = mc::MotionMode::ConstantAcceleration;
  sc.trials = 100;
  sc.seed = 2025;
  double worst = 0;
  int failures = 0;
  for (const mc::TrialRecord& r : mc::run_trials(sc)) {
    if (!r.ok()) {
      ++failures;
      continue;
    }
    for (double e : r.squared_errors) worst = std::max(worst, std::sqrt(e));
  }
  const double elapsed = seconds_since(t0);
  return {failures == 0 && worst <= 1e-6 && elapsed < 1.0,
          fmt::format("max error {:.3e} (tol 1e-6), failures {}, {:.3f} s (limit 1 s)", worst,
                      failures, elapsed)};
}

// 2 and 3 share one verification run.
const oracle::VerifyReport& verification() {
  static const oracle::VerifyReport report = oracle::run_verification();
  return report;
}

Outcome solver_equivalence() {
  const auto& r = verification();
  return {r.max_solver_relative_deviation <= 1e-9,
          fmt::format("{} instances, max relative deviation {:.3e} (tol 1e-9)", r.instances,
                      r.max_solver_relative_deviation)};
}

Outcome derivative_oracle() {
  const auto& r = verification();
  const bool ok = r.max_range_rate_error <= 1e-6 && r.max_range_accel_error <= 1e-4 &&
                  r.range_rate_order >= 1.9 && r.range_accel_order >= 1.9;
  return {ok, fmt::format("{} states, range_rate {:.3e} (tol 1e-6) order {:.3f}; range_accel "
                          "{:.3e} (tol 1e-4) order {:.3f} (min 1.9)",
                          r.instances, r.max_range_rate_error, r.range_rate_order,
                          r.max_range_accel_error, r.range_accel_order)};
}

mc::SweepResult velocity_sweep;
mc::SweepResult acceleration_sweep;

Outcome experiment_velocity() {
  const auto t0 = std::chrono::steady_clock::now();
  velocity_sweep = mc::sweep_velocity_experiment(mc::Scenario{}, mc::kVelocityGrid);
  const double elapsed = seconds_since(t0);
  const auto& pts = velocity_sweep.points;

  const bool grows = pts.back().rmse[at(Stage::VelocityLs)] > pts.front().rmse[at(Stage::VelocityLs)] &&
                     pts.back().rmse[at(Stage::VelocityWls)] > pts.front().rmse[at(Stage::VelocityWls)];
  double worst_ratio = 0, pmin = 1e300, pmax = 0;
  for (const auto& p : pts) {
    worst_ratio = std::max(worst_ratio, p.rmse[at(Stage::VelocityWls)] / p.rmse[at(Stage::VelocityLs)]);
    pmin = std::min(pmin, p.rmse[at(Stage::Position)]);
    pmax = std::max(pmax, p.rmse[at(Stage::Position)]);
  }
  const double spread = (pmax - pmin) / pmin;
  const bool ok = grows && worst_ratio <= 1.02 && spread < 0.05 && elapsed < 60.0;
  return {ok, fmt::format("(a) RMSE grows LS {:.4f}->{:.4f}, WLS {:.4f}->{:.4f}; (b) max WLS/LS "
                          "{:.4f} (limit 1.02); (c) position spread {:.2f}% (limit 5%); {:.2f} s",
                          pts.front().rmse[at(Stage::VelocityLs)], pts.back().rmse[at(Stage::VelocityLs)],
                          pts.front().rmse[at(Stage::VelocityWls)], pts.back().rmse[at(Stage::VelocityWls)],
                          worst_ratio, 100 * spread, elapsed)};
}

Outcome experiment_acceleration() {
  const auto t0 = std::chrono::steady_clock::now();
  acceleration_sweep = mc::sweep_acceleration_experiment(mc::Scenario{}, mc::kAccelerationGrid);
  const double elapsed = seconds_since(t0);
  const auto& pts = acceleration_sweep.points;

  const bool grows = pts.back().rmse[at(Stage::AccelLs)] > pts.front().rmse[at(Stage::AccelLs)] &&
                     pts.back().rmse[at(Stage::AccelWls)] > pts.front().rmse[at(Stage::AccelWls)];
  bool ordered = true;
  std::string ratios;
  for (const auto& p : pts) {
    const double ratio = p.rmse[at(Stage::AccelWls)] / p.rmse[at(Stage::AccelLs)];
    ordered = ordered && ratio <= 1.02;
    ratios += fmt::format(" {}:{:.4f}", p.sigma, ratio);
  }
  return {grows && ordered && elapsed < 60.0,
          fmt::format("RMSE grows LS {:.4f}->{:.4f}, WLS {:.4f}->{:.4f}; WLS/LS per sigma{} "
                      "(limit 1.02); {:.2f} s",
                      pts.front().rmse[at(Stage::AccelLs)], pts.back().rmse[at(Stage::AccelLs)],
                      pts.front().rmse[at(Stage::AccelWls)], pts.back().rmse[at(Stage::AccelWls)],
                      ratios, elapsed)};
}

Outcome timing() {
  const auto vel = mc::timing_report(velocity_sweep);
  const auto acc = mc::timing_report(acceleration_sweep);
  const double v_ls = vel[at(Stage::VelocityLs)].mean_seconds;
  const double v_wls = vel[at(Stage::VelocityWls)].mean_seconds;
  const double a_ls = acc[at(Stage::AccelLs)].mean_seconds;
  const double a_wls = acc[at(Stage::AccelWls)].mean_seconds;
  const bool listed = vel.size() == mc::kStageCount && acc.size() == mc::kStageCount;
  const double worst = std::max({v_ls, v_wls, a_ls, a_wls});
  return {listed && worst < 1e-3,
          fmt::format("mean per trial: velocity LS {:.2f} us, WLS {:.2f} us; acceleration LS {:.2f} "
                      "us, WLS {:.2f} us (limit 1000 us)",
                      v_ls * 1e6, v_wls * 1e6, a_ls * 1e6, a_wls * 1e6)};
}

std::string cli_sweep(std::vector<std::string> args) {
  args.insert(args.begin(), "rangekin");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return code == 0 ? out.str() : "exit " + std::to_string(code) + ": " + err.str();
}

Outcome determinism() {
  const unsigned max_threads = std::max(4u, std::thread::hardware_concurrency());
  bool ok = true;
  for (const char* exp : {"velocity", "acceleration"}) {
    const std::vector<std::string> base{"sweep", "--experiment", exp, "--seed", "7"};
    auto with = [&](std::vector<std::string> extra) {
      std::vector<std::string> a = base;
      a.insert(a.end(), extra.begin(), extra.end());
      return cli_sweep(a);
    };
    const std::string first = with({});
    ok = ok && first.starts_with("sigma,") && first == with({}) &&
         first == with({"--threads", "1"}) &&
         first == with({"--threads", std::to_string(max_threads)});
  }
  return {ok, fmt::format("both experiments, seed 7: rerun and 1 vs {} threads byte-identical",
                          max_threads)};
}

template <typename F>
std::string error_name(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return std::string(to_string(e.kind()));
  }
  return "no error";
}

Outcome degeneracy() {
  const SensorArray collinear({{0, 0}, {50, 0}, {100, 0}});
  const TargetState truth{{30, 40}, {10, -5}, {1, 1}};
  const MeasurementSet m = synthesize_measurements(truth, collinear, {}, RandomStream(1));
  const std::string pos = error_name([&] { estimate_position(m, collinear); });

  // Sensors on a line through the position estimate: every stage row is parallel.
  const SensorArray on_line({{0, 0}, {10, 10}, {-40, -40}, {80, 80}});
  const MeasurementSet m2{{1, 2, 3, 4}, {1, 2, 3, 4}, {0, 0, 0, 0}, {}};
  const std::string vel = error_name([&] {
    estimate_velocity(m2, on_line, {30, 30}, WeightRule{});
  });
  const std::string acc = error_name([&] {
    estimate_acceleration(m2, on_line, {30, 30}, {1, 1}, WeightRule::uniform());
  });

  mc::Scenario sc;
  sc.sensors = collinear;
  sc.trials = 20;
  bool no_nan = true;
  for (const auto& r : mc::run_trials(sc)) {
    no_nan = no_nan && !r.ok() && r.failure == ErrorKind::DegenerateGeometry;
    for (double e : r.squared_errors) no_nan = no_nan && std::isfinite(e);
  }
  const bool ok = pos == "DegenerateGeometry" && vel == "SingularGeometry" &&
                  acc == "SingularGeometry" && no_nan;
  return {ok, fmt::format("collinear position -> {}; parallel velocity -> {}; parallel "
                          "acceleration -> {}; failed trials NaN-free: {}",
                          pos, vel, acc, no_nan ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"C1 noiseless consistency", noiseless_consistency},
      {"C2 stage solver vs dense WLS oracle", solver_equivalence},
      {"C3 derivative oracle", derivative_oracle},
      {"C4 velocity experiment shape", experiment_velocity},
      {"C5 acceleration experiment shape", experiment_acceleration},
      {"C6 timing report", timing},
      {"C7 determinism", determinism},
      {"C8 degeneracy handling", degeneracy},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    fmt::print("[{}] {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
