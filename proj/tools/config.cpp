#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace rangekin::cli {

namespace {

using nlohmann::json;

Vec2 to_vec2(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError("'" + key + "' must be a two-element numeric array");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<double> to_numbers(const json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError("'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const json& v : j) {
    if (!v.is_number()) throw ConfigError("'" + key + "' must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

double to_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("'" + key + "' must be a number");
  return j.get<double>();
}

std::uint64_t to_unsigned(const json& j, const std::string& key) {
  if (!j.is_number_unsigned()) throw ConfigError("'" + key + "' must be a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::string to_string_value(const json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError("'" + key + "' must be a string");
  return j.get<std::string>();
}

RangeSource parse_range_source(const std::string& name) {
  if (name == "estimated-position") return RangeSource::EstimatedPosition;
  if (name == "measured-range") return RangeSource::MeasuredRange;
  throw ConfigError("unknown range source '" + name + "' (estimated-position|measured-range)");
}

OutputFormat parse_format(const std::string& name) {
  if (name == "text") return OutputFormat::Text;
  if (name == "json") return OutputFormat::Json;
  throw ConfigError("unknown format '" + name + "' (text|json)");
}

}  // namespace

WeightMode parse_weight_mode(const std::string& name) {
  if (name == "uniform") return WeightMode::Uniform;
  if (name == "inverse-range") return WeightMode::InverseRange;
  if (name == "inverse-range-sq") return WeightMode::InverseRangeSq;
  throw ConfigError("unknown weight rule '" + name + "' (uniform|inverse-range|inverse-range-sq)");
}

Experiment parse_experiment(const std::string& name) {
  if (name == "velocity") return Experiment::Velocity;
  if (name == "acceleration") return Experiment::Acceleration;
  throw ConfigError("unknown experiment '" + name + "' (velocity|acceleration)");
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError("grid entry '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError("grid is empty");
  return out;
}

void apply_json(RunConfig& cfg, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  mc::Scenario& sc = cfg.scenario;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "sensors") {
        if (!value.is_array()) throw ConfigError("'sensors' must be an array of [x, y] pairs");
        std::vector<Vec2> sensors;
        for (const json& s : value) sensors.push_back(to_vec2(s, key));
        sc.sensors = SensorArray(std::move(sensors));
      } else if (key == "target_position") {
        cfg.target_position = to_vec2(value, key);
      } else if (key == "target_velocity") {
        cfg.target_velocity = to_vec2(value, key);
      } else if (key == "target_acceleration") {
        cfg.target_acceleration = to_vec2(value, key);
      } else if (key == "ranges") {
        cfg.ranges = to_numbers(value, key);
      } else if (key == "range_rates") {
        cfg.range_rates = to_numbers(value, key);
      } else if (key == "drrs") {
        cfg.drrs = to_numbers(value, key);
      } else if (key == "sigma_range") {
        sc.noise.sigma_range = to_number(value, key);
      } else if (key == "sigma_range_rate") {
        sc.noise.sigma_range_rate = to_number(value, key);
      } else if (key == "sigma_drr") {
        sc.noise.sigma_drr = to_number(value, key);
      } else if (key == "seed") {
        sc.seed = to_unsigned(value, key);
      } else if (key == "trials") {
        sc.trials = static_cast<int>(to_unsigned(value, key));
      } else if (key == "threads") {
        cfg.threads = static_cast<unsigned>(to_unsigned(value, key));
      } else if (key == "timing") {
        if (!value.is_boolean()) throw ConfigError("'timing' must be a boolean");
        cfg.timing = value.get<bool>();
      } else if (key == "instances") {
        cfg.instances = to_unsigned(value, key);
      } else if (key == "experiment") {
        cfg.experiment = parse_experiment(to_string_value(value, key));
      } else if (key == "grid") {
        cfg.grid = to_numbers(value, key);
      } else if (key == "weights") {
        sc.estimator.wls_weights.mode = parse_weight_mode(to_string_value(value, key));
      } else if (key == "weight_source") {
        sc.estimator.wls_weights.source = parse_range_source(to_string_value(value, key));
      } else if (key == "range_source") {
        sc.estimator.pseudo_range_source = parse_range_source(to_string_value(value, key));
      } else if (key == "condition_cap") {
        sc.estimator.condition_cap = to_number(value, key);
      } else if (key == "reweight_passes") {
        const auto passes = to_unsigned(value, key);
        if (passes < 1 || passes > 1000) throw ConfigError("'reweight_passes' must be in [1, 1000]");
        sc.estimator.reweight_passes = static_cast<int>(passes);
      } else if (key == "position_min") {
        sc.position_box.min = to_vec2(value, key);
      } else if (key == "position_max") {
        sc.position_box.max = to_vec2(value, key);
      } else if (key == "velocity_min") {
        sc.velocity_box.min = to_vec2(value, key);
      } else if (key == "velocity_max") {
        sc.velocity_box.max = to_vec2(value, key);
      } else if (key == "acceleration_min") {
        sc.acceleration_box.min = to_vec2(value, key);
      } else if (key == "acceleration_max") {
        sc.acceleration_box.max = to_vec2(value, key);
      } else if (key == "out") {
        cfg.out = to_string_value(value, key);
      } else if (key == "svg") {
        cfg.svg = to_string_value(value, key);
      } else if (key == "format") {
        cfg.format = parse_format(to_string_value(value, key));
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  apply_json(cfg, doc);
}

}  // namespace rangekin::cli
