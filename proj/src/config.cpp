#include "gfdiff/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gfdiff/error.hpp"

namespace gfdiff {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size() || !std::isfinite(value)) {
    throw InvalidArgument("config key '" + key + "': expected a number, got '" + text + "'");
  }
  return value;
}

long parse_integer(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  long value = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw InvalidArgument("config key '" + key + "': expected an integer, got '" + text + "'");
  }
  return value;
}

int parse_int(const std::string& key, const std::string& text) {
  const long v = parse_integer(key, text);
  if (v < -1'000'000'000L || v > 1'000'000'000L) {
    throw InvalidArgument("config key '" + key + "': value out of range");
  }
  return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '[' && s.back() == ']') {
    s = s.substr(1, s.size() - 2);
  }
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) {
    throw InvalidArgument("config key '" + key + "': expected a comma-separated list");
  }
  return out;
}

std::string parse_choice(const std::string& key, const std::string& text,
                         std::initializer_list<const char*> allowed) {
  const std::string s = trim(text);
  for (const char* a : allowed) {
    if (s == a) {
      return s;
    }
  }
  std::string msg = "config key '" + key + "': '" + s + "' is not one of";
  for (const char* a : allowed) {
    msg += std::string(" ") + a;
  }
  throw InvalidArgument(msg);
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += (i ? "," : "") + format_number(v[i]);
  }
  return out;
}

void flatten(const nlohmann::json& node, const std::string& prefix, ScenarioConfig& config) {
  if (node.is_object()) {
    for (const auto& [k, v] : node.items()) {
      flatten(v, prefix.empty() ? k : prefix + "." + k, config);
    }
    return;
  }
  if (prefix.empty()) {
    throw InvalidArgument("JSON config must be an object");
  }
  if (node.is_array()) {
    std::string joined;
    for (const auto& item : node) {
      if (!item.is_number()) {
        throw InvalidArgument("config key '" + prefix + "': list entries must be numbers");
      }
      joined += (joined.empty() ? "" : ",") + format_number(item.get<double>());
    }
    config.set(prefix, joined);
  } else if (node.is_string()) {
    config.set(prefix, node.get<std::string>());
  } else if (node.is_number_integer()) {
    config.set(prefix, std::to_string(node.get<long>()));
  } else if (node.is_number()) {
    config.set(prefix, format_number(node.get<double>()));
  } else {
    throw InvalidArgument("config key '" + prefix + "': unsupported JSON value");
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "dim",          "lengths",          "diffusion",
      "alpha",        "clock.family",     "clock.beta",
      "ic.type",      "ic.x0",            "ic.sigma",
      "time.t_min",   "time.t_max",       "time.points",
      "time.spacing", "policy.lambda_max", "policy.min_modes_per_axis",
      "policy.rel_tol", "policy.truncation_tol", "policy.max_modes",
      "output.format", "field.t",          "field.points",
      "validate.points_per_axis", "validate.s_steps", "validate.s_final",
      "validate.snapshots", "validate.sigma", "validate.norm"};
  return keys;
}

void ScenarioConfig::set(const std::string& key, const std::string& value) {
  if (key == "dim") {
    dim = parse_int(key, value);
  } else if (key == "lengths") {
    lengths = parse_list(key, value);
  } else if (key == "diffusion") {
    diffusion = parse_double(key, value);
  } else if (key == "alpha") {
    alpha = parse_double(key, value);
  } else if (key == "clock.family") {
    clock_family = parse_choice(key, value, {"identity", "power_law", "dodson"});
  } else if (key == "clock.beta") {
    clock_beta = parse_double(key, value);
  } else if (key == "ic.type") {
    ic_type = parse_choice(key, value, {"delta", "gaussian"});
  } else if (key == "ic.x0") {
    x0 = parse_list(key, value);
  } else if (key == "ic.sigma") {
    ic_sigma = parse_double(key, value);
  } else if (key == "time.t_min") {
    policy.t_min = parse_double(key, value);
  } else if (key == "time.t_max") {
    t_max = parse_double(key, value);
  } else if (key == "time.points") {
    t_points = parse_int(key, value);
  } else if (key == "time.spacing") {
    t_spacing = parse_choice(key, value, {"log", "linear"});
  } else if (key == "policy.lambda_max") {
    policy.lambda_max = parse_double(key, value);
  } else if (key == "policy.min_modes_per_axis") {
    policy.min_modes_per_axis = parse_int(key, value);
  } else if (key == "policy.rel_tol") {
    policy.rel_tol = parse_double(key, value);
  } else if (key == "policy.truncation_tol") {
    policy.truncation_tol = parse_double(key, value);
  } else if (key == "policy.max_modes") {
    const long v = parse_integer(key, value);
    if (v < 1) {
      throw InvalidArgument("config key 'policy.max_modes' must be positive");
    }
    policy.max_modes = static_cast<std::size_t>(v);
  } else if (key == "output.format") {
    format = parse_choice(key, value, {"csv", "json"});
  } else if (key == "field.t") {
    field_t = parse_double(key, value);
  } else if (key == "field.points") {
    field_points = parse_int(key, value);
  } else if (key == "validate.points_per_axis") {
    validate_grid.points_per_axis = parse_int(key, value);
  } else if (key == "validate.s_steps") {
    validate_grid.s_steps = parse_int(key, value);
  } else if (key == "validate.s_final") {
    validate_grid.s_final = parse_double(key, value);
  } else if (key == "validate.snapshots") {
    validate_grid.snapshots = parse_int(key, value);
  } else if (key == "validate.sigma") {
    validate_sigma = parse_double(key, value);
  } else if (key == "validate.norm") {
    validate_norm = parse_choice(key, value, {"max", "l2"});
  } else {
    throw InvalidArgument("unknown config key '" + key + "'");
  }
}

void ScenarioConfig::finalize() {
  if (dim < 1 || dim > 8) {
    throw InvalidArgument("dim must lie in [1, 8]");
  }
  if (lengths.size() == 1 && dim > 1) {
    lengths.assign(static_cast<std::size_t>(dim), lengths.front());
  }
  if (lengths.size() != static_cast<std::size_t>(dim)) {
    throw InvalidArgument("lengths has " + std::to_string(lengths.size()) + " entries but dim is " +
                          std::to_string(dim));
  }
  if (x0 && x0->size() != lengths.size()) {
    throw InvalidArgument("ic.x0 must have one coordinate per dimension");
  }
  if (t_points < 1) {
    throw InvalidArgument("time grid is empty (time.points must be >= 1)");
  }
  if (t_max && !(*t_max > policy.t_min)) {
    throw InvalidArgument("time grid is empty (time.t_max must exceed time.t_min)");
  }
  if (field_points < 2) {
    throw InvalidArgument("field.points must be at least 2");
  }
  if (!(ic_sigma > 0.0) || !(validate_sigma > 0.0)) {
    throw InvalidArgument("Gaussian widths must be positive");
  }
}

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig config;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidArgument(std::string("malformed JSON config: ") + e.what());
    }
    flatten(doc, "", config);
  } else {
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (const auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      line = trim(line);
      if (line.empty()) {
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw InvalidArgument("config line " + std::to_string(number) + ": expected key = value");
      }
      try {
        config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
      } catch (const InvalidArgument& e) {
        throw InvalidArgument("config line " + std::to_string(number) + ": " + e.what());
      }
    }
  }
  config.finalize();
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument("cannot open config file '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

Scenario to_scenario(const ScenarioConfig& config) {
  BoxDomain domain(config.lengths, config.diffusion);
  ClockFamily family;
  if (config.clock_family == "identity") {
    family = IdentityClock{};
  } else if (config.clock_family == "power_law") {
    family = PowerLawClock{config.clock_beta};
  } else {
    family = DodsonClock{config.clock_beta};
  }
  const Point r0 = config.x0.value_or(domain.center());
  InitialCondition ic;
  if (config.ic_type == "delta") {
    ic = DeltaPeak{r0};
  } else {
    ic = gaussian_peak(domain, r0, config.ic_sigma);
  }
  Scenario scenario{std::move(domain), make_clock(std::move(family)), config.alpha, std::move(ic),
                    config.policy};
  scenario.validate();
  return scenario;
}

std::vector<double> time_grid(const ScenarioConfig& config, const Scenario& scenario) {
  const double t_min = scenario.policy.t_min;
  double t_max = 0.0;
  if (config.t_max) {
    t_max = *config.t_max;
  } else {
    double lambda1 = 0.0;
    for (double L : scenario.domain.lengths()) {
      lambda1 += std::numbers::pi * std::numbers::pi / (L * L);
    }
    const double s_peak = std::pow(lambda1 * scenario.domain.diffusion(), -1.0 / scenario.alpha);
    const auto g_inf = scenario.clock.limit();
    if (g_inf && s_peak >= *g_inf) {
      // The clock stops before the slowest mode turns over; stop once g has saturated.
      t_max = scenario.clock.inverse(*g_inf * (1.0 - 1e-6));
    } else {
      t_max = 1e4 * scenario.clock.inverse(s_peak);
      if (g_inf) {
        t_max = std::min(t_max, scenario.clock.inverse(*g_inf * (1.0 - 1e-6)));
      }
    }
  }
  if (!(t_max > t_min)) {
    throw InvalidArgument("time grid is empty: t_max must exceed t_min");
  }
  const int n = config.t_points;
  std::vector<double> times(static_cast<std::size_t>(n));
  if (n == 1) {
    times[0] = t_min;
    return times;
  }
  for (int i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / (n - 1);
    times[static_cast<std::size_t>(i)] =
        config.t_spacing == "log" ? t_min * std::pow(t_max / t_min, f) : t_min + f * (t_max - t_min);
  }
  times.back() = t_max;
  return times;
}

std::vector<std::pair<std::string, std::string>> describe(const ScenarioConfig& config) {
  std::vector<std::pair<std::string, std::string>> out{
      {"dim", std::to_string(config.dim)},
      {"lengths", format_list(config.lengths)},
      {"diffusion", format_number(config.diffusion)},
      {"alpha", format_number(config.alpha)},
      {"clock.family", config.clock_family},
      {"clock.beta", format_number(config.clock_beta)},
      {"ic.type", config.ic_type},
      {"ic.x0", config.x0 ? format_list(*config.x0) : "center"},
      {"time.t_min", format_number(config.policy.t_min)},
      {"policy.lambda_max", format_number(config.policy.lambda_max)},
      {"policy.truncation_tol", format_number(config.policy.truncation_tol)},
  };
  if (config.ic_type == "gaussian") {
    out.emplace_back("ic.sigma", format_number(config.ic_sigma));
  }
  return out;
}

}  // namespace gfdiff
