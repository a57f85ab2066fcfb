#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gfdiff/oracle.hpp"
#include "gfdiff/solution.hpp"

namespace gfdiff {

/// Textual scenario description shared by config files and command-line flags.
///
/// Files are either flat `key = value` lines ('#' starts a comment) or a JSON
/// object whose nested objects flatten to dotted keys, so
/// {"clock": {"family": "power_law", "beta": 2}} sets clock.family and
/// clock.beta. Unknown keys are rejected. See docs/config.md for the key list.
struct ScenarioConfig {
  int dim = 1;
  std::vector<double> lengths{1.0};
  double diffusion = 1.0;
  double alpha = 1.0;

  std::string clock_family = "identity";  // identity | power_law | dodson
  double clock_beta = 1.0;

  std::string ic_type = "delta";  // delta | gaussian
  std::optional<Point> x0;        // defaults to the box centre
  double ic_sigma = 0.1;

  SeriesPolicy policy;

  std::optional<double> t_max;
  int t_points = 200;
  std::string t_spacing = "log";  // log | linear

  std::string format = "csv";  // csv | json

  std::optional<double> field_t;
  int field_points = 21;

  oracle::GridSpec validate_grid;
  double validate_sigma = 0.1;
  std::string validate_norm = "max";

  /// Sets one dotted key from its textual value; throws InvalidArgument.
  void set(const std::string& key, const std::string& value);
  /// Cross-field checks (lengths vs dim, x0 size, enum values).
  void finalize();
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Keys accepted by ScenarioConfig::set, in documentation order.
const std::vector<std::string>& config_keys();

Scenario to_scenario(const ScenarioConfig& config);

/// Evaluation times: t_min to t_max (default 1e4 * t_peak), log or linear.
/// t_peak = g^{-1}((lambda_1 D)^{-1/alpha}) is where the slowest mode turns over.
std::vector<double> time_grid(const ScenarioConfig& config, const Scenario& scenario);

/// Flat echo of the effective configuration, for reports.
std::vector<std::pair<std::string, std::string>> describe(const ScenarioConfig& config);

}  // namespace gfdiff
