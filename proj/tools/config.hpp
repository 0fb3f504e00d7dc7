#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fcsmpc_cli {

using Json = nlohmann::json;
using MatrixData = std::vector<std::vector<double>>;

/// Raised on malformed configs; `path` is the dotted field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct AmplifierConfig {
  double bus_voltage = 0.0;
  double stage_inductance = 0.0;
  double stage_capacitance = 0.0;
  double stage_resistance = 0.0;
  double load_inductance = 0.0;
  double load_resistance = 0.0;

  bool operator==(const AmplifierConfig&) const = default;
};

struct PlantConfig {
  enum class Kind { amplifier, continuous, discrete };
  Kind kind = Kind::amplifier;
  std::optional<AmplifierConfig> amplifier;
  MatrixData A, B, C;              // continuous or discrete matrices
  double sample_period = 0.0;      // discrete plants only

  bool operator==(const PlantConfig&) const = default;
};

struct BoundsConfig {
  std::vector<double> lower;
  std::vector<double> upper;

  bool operator==(const BoundsConfig&) const = default;
};

struct CycleSearchConfig {
  int period = 1;
  MatrixData gamma;
  std::string norm = "two_norm";
  std::uint64_t budget = 0;  // 0 = library default

  bool operator==(const CycleSearchConfig&) const = default;
};

struct MpcConfig {
  std::string name;                 // used by compare variants
  std::string controller = "standard";  // standard | limit_cycle
  int horizon = 1;
  MatrixData Q, R;
  std::optional<MatrixData> P;      // absent = "auto" (Lyapunov synthesis)
  std::optional<double> epsilon;    // auto-P shift; absent = default
  std::string solver = "bnb";       // bnb | exhaustive
  std::optional<BoundsConfig> state_bounds;
  std::optional<BoundsConfig> output_bounds;

  bool operator==(const MpcConfig&) const = default;
};

struct SimConfig {
  std::vector<double> x0;
  int steps = 2000;
  double convergence_tol = 1e-3;
  int ripple_window = 0;  // 0 = ten cycle periods
  int mode_period_max = 16;

  bool operator==(const SimConfig&) const = default;
};

struct OutputConfig {
  std::string dir = ".";
  std::string prefix = "run";

  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  PlantConfig plant;
  std::optional<double> sampling_hz;     // required for non-discrete plants
  std::optional<std::vector<double>> y_ref;
  std::optional<std::string> cycle_file;
  std::optional<CycleSearchConfig> cycle_search;
  std::optional<MpcConfig> mpc;
  SimConfig sim;
  OutputConfig output;
  std::vector<MpcConfig> compare_variants;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const Json& j);
Json serialize_config(const RunConfig& config);

RunConfig load_config_file(const std::string& path);

}  // namespace fcsmpc_cli
