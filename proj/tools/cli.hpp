#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rangekin/estim.hpp"
#include "rangekin/montecarlo.hpp"

namespace rangekin::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { Velocity, Acceleration };
enum class OutputFormat { Text, Json };

inline constexpr std::uint64_t kDefaultSeed = 1;

/// Flat run configuration. Every field has a default equal to the reference
/// experiment setup; JSON config files and command-line flags override it.
struct RunConfig {
  mc::Scenario scenario{};

  // estimate
  std::optional<Vec2> target_position;
  std::optional<Vec2> target_velocity;
  std::optional<Vec2> target_acceleration;
  std::optional<std::vector<double>> ranges;
  std::optional<std::vector<double>> range_rates;
  std::optional<std::vector<double>> drrs;

  // sweep
  std::optional<Experiment> experiment;
  std::optional<std::vector<double>> grid;  // defaults per experiment
  unsigned threads = 1;
  bool timing = false;

  // verify
  std::size_t instances = 1000;

  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> svg;
  OutputFormat format = OutputFormat::Text;
};

/// Applies the keys of a flat JSON object to `cfg`. Unknown keys and
/// ill-typed values throw ConfigError.
void apply_json(RunConfig& cfg, const nlohmann::json& doc);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

WeightMode parse_weight_mode(const std::string& name);
Experiment parse_experiment(const std::string& name);
std::vector<double> parse_grid(const std::string& csv);

/// Header: sigma,rmse_pos,rmse_vel_ls,rmse_vel_wls,rmse_acc_ls,rmse_acc_wls,failures,t_ls_us,t_wls_us
/// Timing columns hold the LS/WLS stage mean for the swept quantity (velocity
/// or acceleration) in microseconds, and are left empty unless `with_timing`.
std::string sweep_csv(const mc::SweepResult& sweep, Experiment experiment, bool with_timing);

/// The same table as nested JSON; per-stage mean times only when `with_timing`.
nlohmann::json sweep_json(const mc::SweepResult& sweep, bool with_timing);

/// Log-log RMSE curves (LS and WLS of the swept stage) against sigma.
std::string sweep_svg(const mc::SweepResult& sweep, Experiment experiment);

nlohmann::json estimation_json(const EstimationResult& result);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

/// Entry point shared by the executable and the tests. Returns the process exit code:
/// 0 success, 1 verification failure, 2 configuration or estimator error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rangekin::cli
