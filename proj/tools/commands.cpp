#include <fmt/format.h>
#include <fmt/ostream.h>

#include <CLI11.hpp>
#include <ostream>

#include "cli.hpp"
#include "rangekin/oracle.hpp"

namespace rangekin::cli {

namespace {

using nlohmann::json;

// Flags shared by every subcommand. Unset flags leave the config value alone.
struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> grid;
  std::optional<std::string> weights;
  std::optional<std::string> out;
  std::optional<std::string> svg;
  std::optional<std::string> format;
  std::optional<std::string> experiment;
  std::optional<unsigned> threads;
  std::optional<std::size_t> instances;
  bool timing = false;
  std::string inject_fault;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file (flat key set)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "64-bit RNG seed (default 1)");
  cmd->add_option("--out", o.out, "Output path (stdout when omitted)");
  cmd->add_option("--format", o.format, "text|json")->check(CLI::IsMember({"text", "json"}));
}

std::string fixed(double v) { return fmt::format("{:.17g}", v); }

RunConfig resolve(const Overrides& o) {
  RunConfig cfg;
  cfg.scenario.seed = kDefaultSeed;
  if (!o.config.empty()) apply_config_file(cfg, o.config);
  if (o.seed) cfg.scenario.seed = *o.seed;
  if (o.trials) {
    if (*o.trials < 1) throw ConfigError("--trials must be >= 1");
    cfg.scenario.trials = *o.trials;
  }
  if (o.grid) cfg.grid = parse_grid(*o.grid);
  if (o.weights) cfg.scenario.estimator.wls_weights.mode = parse_weight_mode(*o.weights);
  if (o.out) cfg.out = *o.out;
  if (o.svg) cfg.svg = *o.svg;
  if (o.format) cfg.format = *o.format == "json" ? OutputFormat::Json : OutputFormat::Text;
  if (o.experiment) cfg.experiment = parse_experiment(*o.experiment);
  if (o.threads) cfg.threads = *o.threads;
  if (o.instances) cfg.instances = *o.instances;
  if (o.timing) cfg.timing = true;
  return cfg;
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out) {
    write_atomically(*cfg.out, text);
  } else {
    out << text;
  }
}

MeasurementSet measurements_for(const RunConfig& cfg) {
  const SensorArray& sensors = cfg.scenario.sensors;
  const int given = int{cfg.ranges.has_value()} + int{cfg.range_rates.has_value()} +
                    int{cfg.drrs.has_value()};
  if (given == 3) {
    MeasurementSet m{*cfg.ranges, *cfg.range_rates, *cfg.drrs, cfg.scenario.noise};
    try {
      m.validate(sensors.size());
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    return m;
  }
  if (given != 0) throw ConfigError("ranges, range_rates and drrs must be given together");
  if (!cfg.target_position || !cfg.target_velocity) {
    throw ConfigError(
        "estimate needs either explicit measurements (ranges, range_rates, drrs) or a truth "
        "state (target_position, target_velocity[, target_acceleration])");
  }
  const TargetState truth{*cfg.target_position, *cfg.target_velocity,
                          cfg.target_acceleration.value_or(Vec2{})};
  return synthesize_measurements(truth, sensors, cfg.scenario.noise,
                                 RandomStream(cfg.scenario.seed));
}

std::string estimate_text(const EstimationResult& r) {
  std::string s;
  const auto& p = r.position;
  s += fmt::format("position      {} {}  residual_norm={} condition={}\n", fixed(p.position.x()),
                   fixed(p.position.y()), fixed(p.residual_norm), fixed(p.condition));
  const std::array<std::pair<const char*, const KinematicEstimate*>, 4> rows{
      {{"velocity_ls ", &r.velocity_ls},
       {"velocity_wls", &r.velocity_wls},
       {"accel_ls    ", &r.accel_ls},
       {"accel_wls   ", &r.accel_wls}}};
  for (const auto& [name, k] : rows) {
    s += fmt::format("{}  {} {}  residual_norm={} gram_condition={}\n", name, fixed(k->value.x()),
                     fixed(k->value.y()), fixed(k->residual_norm), fixed(k->gram_condition));
  }
  return s;
}

int cmd_estimate(const RunConfig& cfg, std::ostream& out) {
  const MeasurementSet m = measurements_for(cfg);
  const EstimationResult result = estimate_all(m, cfg.scenario.sensors, cfg.scenario.estimator);
  if (cfg.format == OutputFormat::Json) {
    json doc = estimation_json(result);
    doc["seed"] = cfg.scenario.seed;
    emit(cfg, doc.dump(2) + "\n", out);
  } else {
    emit(cfg, estimate_text(result), out);
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.experiment) throw ConfigError("sweep needs --experiment velocity|acceleration");
  const Experiment exp = *cfg.experiment;
  std::vector<double> grid;
  if (cfg.grid) {
    grid = *cfg.grid;
  } else if (exp == Experiment::Velocity) {
    grid.assign(mc::kVelocityGrid.begin(), mc::kVelocityGrid.end());
  } else {
    grid.assign(mc::kAccelerationGrid.begin(), mc::kAccelerationGrid.end());
  }
  const mc::SweepOptions options{cfg.threads};
  const mc::SweepResult sweep =
      exp == Experiment::Velocity
          ? mc::sweep_velocity_experiment(cfg.scenario, grid, options)
          : mc::sweep_acceleration_experiment(cfg.scenario, grid, options);

  if (cfg.format == OutputFormat::Json) {
    emit(cfg, sweep_json(sweep, cfg.timing).dump(2) + "\n", out);
  } else {
    emit(cfg, sweep_csv(sweep, exp, cfg.timing), out);
  }
  if (cfg.svg) write_atomically(*cfg.svg, sweep_svg(sweep, exp));

  if (cfg.timing) {
    std::ostream& report = cfg.out ? out : err;
    report << "mean wall time per trial (us)\n";
    for (const mc::TimingRow& row : mc::timing_report(sweep)) {
      report << fmt::format("  {:<13}{:.3f}\n", mc::to_string(row.stage), row.mean_seconds * 1e6);
    }
  }
  return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& inject_fault, std::ostream& out) {
  oracle::VerifyOptions options;
  options.instances = cfg.instances;
  options.seed = cfg.scenario.seed;
  if (inject_fault == "range-accel-sign") {
    options.inject_range_accel_sign_error = true;
  } else if (!inject_fault.empty()) {
    throw ConfigError("unknown fault '" + inject_fault + "'");
  }
  const oracle::VerifyReport r = oracle::run_verification(options);
  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };

  if (cfg.format == OutputFormat::Json) {
    json doc{{"instances", r.instances},
             {"seed", options.seed},
             {"max_range_rate_error", r.max_range_rate_error},
             {"max_range_accel_error", r.max_range_accel_error},
             {"range_rate_order", r.range_rate_order},
             {"range_accel_order", r.range_accel_order},
             {"max_solver_relative_deviation", r.max_solver_relative_deviation},
             {"passed", r.passed()}};
    emit(cfg, doc.dump(2) + "\n", out);
  } else {
    std::string s = fmt::format("instances {}  seed {}\n", r.instances, options.seed);
    s += fmt::format("range_rate   max |fd - analytic| = {:.3e} (tol {:.0e})  order = {:.3f}  {}\n",
                     r.max_range_rate_error, oracle::kRangeRateTolerance, r.range_rate_order,
                     verdict(r.range_rate_ok()));
    s += fmt::format("range_accel  max |fd - analytic| = {:.3e} (tol {:.0e})  order = {:.3f}  {}\n",
                     r.max_range_accel_error, oracle::kRangeAccelTolerance, r.range_accel_order,
                     verdict(r.range_accel_ok()));
    s += fmt::format("stage solver max relative deviation vs QR = {:.3e} (tol {:.0e})  {}\n",
                     r.max_solver_relative_deviation, oracle::kSolverRelativeTolerance,
                     verdict(r.solver_ok()));
    s += fmt::format("overall {}\n", verdict(r.passed()));
    emit(cfg, s, out);
  }
  return r.passed() ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Position, velocity and acceleration estimation from range measurements"};
  app.require_subcommand(1);
  Overrides o;

  CLI::App* estimate = app.add_subcommand("estimate", "Run the estimation pipeline once");
  add_common(estimate, o);
  estimate->add_option("--weights", o.weights, "uniform|inverse-range|inverse-range-sq");

  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo noise sweep, CSV output");
  add_common(sweep, o);
  sweep->add_option("--experiment", o.experiment, "velocity|acceleration");
  sweep->add_option("--trials", o.trials, "Monte Carlo trials per grid point (default 1000)");
  sweep->add_option("--grid", o.grid, "Comma-separated noise levels, strictly increasing");
  sweep->add_option("--weights", o.weights, "uniform|inverse-range|inverse-range-sq");
  sweep->add_option("--svg", o.svg, "Also write a log-log SVG plot");
  sweep->add_option("--threads", o.threads, "Worker threads, 0 = all cores (default 1)");
  sweep->add_flag("--timing", o.timing, "Fill the t_ls_us/t_wls_us columns with measured times");

  CLI::App* verify = app.add_subcommand("verify", "Check analytics against independent oracles");
  add_common(verify, o);
  verify->add_option("--instances", o.instances, "Random instances per suite (default 1000)");
  verify->add_option("--inject-fault", o.inject_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const RunConfig cfg = resolve(o);
    if (*estimate) return cmd_estimate(cfg, out);
    if (*sweep) return cmd_sweep(cfg, out, err);
    return cmd_verify(cfg, o.inject_fault, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace rangekin::cli
