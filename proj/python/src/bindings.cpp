#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rangekin/error.hpp"
#include "rangekin/estim.hpp"
#include "rangekin/model.hpp"
#include "rangekin/montecarlo.hpp"
#include "rangekin/oracle.hpp"

namespace py = pybind11;
using namespace rangekin;

namespace {

using Pair = std::array<double, 2>;

Vec2 vec(const Pair& p) { return {p[0], p[1]}; }
Pair pair(const Vec2& v) { return {v.x(), v.y()}; }

SensorArray sensor_array(const std::optional<std::vector<Pair>>& sensors) {
  if (!sensors) return SensorArray::reference_layout();
  std::vector<Vec2> out;
  out.reserve(sensors->size());
  for (const Pair& p : *sensors) out.push_back(vec(p));
  return SensorArray(std::move(out));
}

WeightRule weight_rule(const std::string& weights, const std::string& source) {
  WeightRule rule;
  if (weights == "uniform") {
    rule.mode = WeightMode::Uniform;
  } else if (weights == "inverse-range") {
    rule.mode = WeightMode::InverseRange;
  } else if (weights == "inverse-range-sq") {
    rule.mode = WeightMode::InverseRangeSq;
  } else {
    throw Error(ErrorKind::InvalidInput, "unknown weights '" + weights + "'");
  }
  if (source == "estimated-position") {
    rule.source = RangeSource::EstimatedPosition;
  } else if (source == "measured-range") {
    rule.source = RangeSource::MeasuredRange;
  } else {
    throw Error(ErrorKind::InvalidInput, "unknown range source '" + source + "'");
  }
  return rule;
}

MeasurementSet measurements(std::vector<double> ranges, std::vector<double> range_rates,
                            std::vector<double> drrs) {
  MeasurementSet m;
  m.ranges = std::move(ranges);
  m.range_rates = std::move(range_rates);
  m.drrs = std::move(drrs);
  return m;
}

py::dict kinematic(const KinematicEstimate& k) {
  py::dict d;
  d["value"] = pair(k.value);
  d["method"] = k.method == Method::LS ? "LS" : "WLS";
  d["gram_condition"] = k.gram_condition;
  d["residual_norm"] = k.residual_norm;
  d["pseudo_measurements"] = k.pseudo_measurements;
  return d;
}

py::dict position(const PositionSolution& p) {
  py::dict d;
  d["value"] = pair(p.position);
  d["theta3"] = p.theta3;
  d["residual_norm"] = p.residual_norm;
  d["condition"] = p.condition;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Range-based kinematic state estimation";

  static py::exception<Error> error(m, "RangekinError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("reference_layout", [] {
    const SensorArray layout = SensorArray::reference_layout();
    std::vector<Pair> out;
    for (const Vec2& s : layout.positions()) out.push_back(pair(s));
    return out;
  });

  m.def("range", [](const Pair& target, const Pair& sensor) { return range(vec(target), vec(sensor)); },
        py::arg("target"), py::arg("sensor"));
  m.def(
      "range_rate",
      [](const Pair& p, const Pair& v, const Pair& sensor) {
        return range_rate(TargetState{vec(p), vec(v), {}}, vec(sensor));
      },
      py::arg("position"), py::arg("velocity"), py::arg("sensor"));
  m.def(
      "range_accel",
      [](const Pair& p, const Pair& v, const Pair& a, const Pair& sensor) {
        return range_accel(TargetState{vec(p), vec(v), vec(a)}, vec(sensor));
      },
      py::arg("position"), py::arg("velocity"), py::arg("acceleration"), py::arg("sensor"));

  m.def(
      "synthesize",
      [](const Pair& p, const Pair& v, const Pair& a, std::optional<std::vector<Pair>> sensors,
         double sigma_range, double sigma_range_rate, double sigma_drr, std::uint64_t seed) {
        const NoiseSpec noise{sigma_range, sigma_range_rate, sigma_drr};
        const MeasurementSet ms = synthesize_measurements(
            TargetState{vec(p), vec(v), vec(a)}, sensor_array(sensors), noise, RandomStream(seed));
        py::dict d;
        d["ranges"] = ms.ranges;
        d["range_rates"] = ms.range_rates;
        d["drrs"] = ms.drrs;
        return d;
      },
      py::arg("position"), py::arg("velocity"), py::arg("acceleration") = Pair{0, 0},
      py::arg("sensors") = py::none(), py::arg("sigma_range") = 1.0,
      py::arg("sigma_range_rate") = 1.0, py::arg("sigma_drr") = 1.0, py::arg("seed") = 1);

  m.def(
      "estimate_position",
      [](std::vector<double> ranges, std::optional<std::vector<Pair>> sensors, double cap) {
        const MeasurementSet ms = measurements(ranges, std::vector<double>(ranges.size()),
                                               std::vector<double>(ranges.size()));
        return position(estimate_position(ms, sensor_array(sensors), cap));
      },
      py::arg("ranges"), py::arg("sensors") = py::none(), py::arg("condition_cap") = kDefaultConditionCap);

  m.def(
      "estimate_velocity",
      [](std::vector<double> ranges, std::vector<double> range_rates, const Pair& p_hat,
         std::optional<std::vector<Pair>> sensors, const std::string& weights,
         const std::string& range_source) {
        const MeasurementSet ms =
            measurements(ranges, std::move(range_rates), std::vector<double>(ranges.size()));
        return kinematic(estimate_velocity(ms, sensor_array(sensors), vec(p_hat),
                                           weight_rule(weights, range_source)));
      },
      py::arg("ranges"), py::arg("range_rates"), py::arg("position"),
      py::arg("sensors") = py::none(), py::arg("weights") = "uniform",
      py::arg("range_source") = "estimated-position");

  m.def(
      "estimate_acceleration",
      [](std::vector<double> ranges, std::vector<double> range_rates, std::vector<double> drrs,
         const Pair& p_hat, const Pair& v_hat, std::optional<std::vector<Pair>> sensors,
         const std::string& weights, const std::string& range_source) {
        const MeasurementSet ms = measurements(std::move(ranges), std::move(range_rates), std::move(drrs));
        return kinematic(estimate_acceleration(ms, sensor_array(sensors), vec(p_hat), vec(v_hat),
                                               weight_rule(weights, range_source)));
      },
      py::arg("ranges"), py::arg("range_rates"), py::arg("drrs"), py::arg("position"),
      py::arg("velocity"), py::arg("sensors") = py::none(), py::arg("weights") = "uniform",
      py::arg("range_source") = "estimated-position");

  m.def(
      "estimate",
      [](std::vector<double> ranges, std::vector<double> range_rates, std::vector<double> drrs,
         std::optional<std::vector<Pair>> sensors, const std::string& weights,
         const std::string& range_source, double cap) {
        EstimatorConfig config;
        config.wls_weights = weight_rule(weights, range_source);
        config.condition_cap = cap;
        const EstimationResult r = estimate_all(
            measurements(std::move(ranges), std::move(range_rates), std::move(drrs)),
            sensor_array(sensors), config);
        py::dict d;
        d["position"] = position(r.position);
        d["velocity_ls"] = kinematic(r.velocity_ls);
        d["velocity_wls"] = kinematic(r.velocity_wls);
        d["accel_ls"] = kinematic(r.accel_ls);
        d["accel_wls"] = kinematic(r.accel_wls);
        return d;
      },
      py::arg("ranges"), py::arg("range_rates"), py::arg("drrs"), py::arg("sensors") = py::none(),
      py::arg("weights") = "inverse-range", py::arg("range_source") = "estimated-position",
      py::arg("condition_cap") = kDefaultConditionCap);

  m.def(
      "sweep",
      [](const std::string& experiment, std::optional<std::vector<double>> grid, int trials,
         std::uint64_t seed, unsigned threads, const std::string& weights) {
        mc::Scenario sc;
        sc.trials = trials;
        sc.seed = seed;
        sc.estimator.wls_weights = weight_rule(weights, "estimated-position");
        mc::SweepResult result;
        {
          py::gil_scoped_release release;
          if (experiment == "velocity") {
            const std::vector<double> g =
                grid ? *grid : std::vector<double>(mc::kVelocityGrid.begin(), mc::kVelocityGrid.end());
            result = mc::sweep_velocity_experiment(sc, g, {threads});
          } else if (experiment == "acceleration") {
            const std::vector<double> g = grid ? *grid
                                               : std::vector<double>(mc::kAccelerationGrid.begin(),
                                                                     mc::kAccelerationGrid.end());
            result = mc::sweep_acceleration_experiment(sc, g, {threads});
          } else {
            throw Error(ErrorKind::InvalidInput, "unknown experiment '" + experiment + "'");
          }
        }
        py::dict d;
        d["parameter"] = result.parameter;
        std::vector<double> sigma;
        std::vector<int> failures;
        py::dict rmse, runtime;
        for (const mc::Stage s : mc::kStages) {
          std::vector<double> r, t;
          for (const auto& p : result.points) {
            r.push_back(p.rmse[static_cast<std::size_t>(s)]);
            t.push_back(p.mean_runtime[static_cast<std::size_t>(s)]);
          }
          rmse[py::str(std::string(mc::to_string(s)))] = r;
          runtime[py::str(std::string(mc::to_string(s)))] = t;
        }
        for (const auto& p : result.points) {
          sigma.push_back(p.sigma);
          failures.push_back(p.failures);
        }
        d["sigma"] = sigma;
        d["rmse"] = rmse;
        d["mean_runtime_s"] = runtime;
        d["failures"] = failures;
        return d;
      },
      py::arg("experiment"), py::arg("grid") = py::none(), py::arg("trials") = 1000,
      py::arg("seed") = 1, py::arg("threads") = 1, py::arg("weights") = "inverse-range");

  m.def(
      "verify",
      [](std::size_t instances, std::uint64_t seed) {
        oracle::VerifyOptions o;
        o.instances = instances;
        o.seed = seed;
        oracle::VerifyReport r;
        {
          py::gil_scoped_release release;
          r = oracle::run_verification(o);
        }
        py::dict d;
        d["instances"] = r.instances;
        d["max_range_rate_error"] = r.max_range_rate_error;
        d["max_range_accel_error"] = r.max_range_accel_error;
        d["range_rate_order"] = r.range_rate_order;
        d["range_accel_order"] = r.range_accel_order;
        d["max_solver_relative_deviation"] = r.max_solver_relative_deviation;
        d["passed"] = r.passed();
        return d;
      },
      py::arg("instances") = 1000, py::arg("seed") = 1);
}
