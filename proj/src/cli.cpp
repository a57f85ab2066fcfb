#include "gfdiff/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gfdiff/config.hpp"
#include "gfdiff/error.hpp"
#include "gfdiff/oracle.hpp"
#include "gfdiff/solution.hpp"

namespace gfdiff::cli {
namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";
// Acceptance threshold for the oracle comparison.
constexpr double kValidationTolerance = 5e-2;

std::string number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      os << (i ? "," : "") << columns[i];
    }
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        os << (i ? "," : "") << number(row[i]);
      }
      os << '\n';
    }
  }

  [[nodiscard]] json to_json() const {
    json rows_json = json::array();
    for (const auto& row : rows) {
      json r = json::array();
      for (double v : row) {
        r.push_back(json_number(v));
      }
      rows_json.push_back(std::move(r));
    }
    return {{"columns", columns}, {"rows", std::move(rows_json)}};
  }
};

void write_key_values(std::ostream& os, const json& report) {
  os << "key,value\n";
  for (const auto& [k, v] : report.items()) {
    if (k == "config") {
      continue;
    }
    if (v.is_number()) {
      os << k << ',' << number(v.get<double>()) << '\n';
    } else if (v.is_null()) {
      os << k << ",nan\n";
    } else if (v.is_string()) {
      os << k << ',' << v.get<std::string>() << '\n';
    } else if (v.is_boolean()) {
      os << k << ',' << (v.get<bool>() ? "true" : "false") << '\n';
    }
  }
}

json base_report(const std::string& command, const ScenarioConfig& config) {
  json cfg = json::object();
  for (const auto& [k, v] : describe(config)) {
    cfg[k] = v;
  }
  return {{"command", command}, {"version", kVersion}, {"config", std::move(cfg)}};
}

/// Evenly spaced nodes, boundary included, row-major with the last axis fastest.
std::vector<Point> grid_points(const BoxDomain& domain, int per_axis) {
  const std::size_t d = domain.dim();
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    total *= static_cast<std::size_t>(per_axis);
  }
  std::vector<Point> out(total, Point(d));
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rest = k;
    for (std::size_t i = d; i-- > 0;) {
      const std::size_t j = rest % static_cast<std::size_t>(per_axis);
      rest /= static_cast<std::size_t>(per_axis);
      out[k][i] = domain.length(i) * static_cast<double>(j) / (per_axis - 1);
    }
  }
  return out;
}

Table field_table(const std::vector<Point>& points, const std::vector<double>& values,
                  const std::string& value_column) {
  Table table;
  const std::size_t d = points.empty() ? 0 : points.front().size();
  for (std::size_t i = 0; i < d; ++i) {
    table.columns.push_back("x" + std::to_string(i + 1));
  }
  table.columns.push_back(value_column);
  for (std::size_t k = 0; k < points.size(); ++k) {
    auto row = points[k];
    row.push_back(values[k]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

struct Output {
  std::ostream* stream;
  std::unique_ptr<std::ofstream> file;
};

Output open_output(const std::string& path, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    return {&fallback, nullptr};
  }
  auto file = std::make_unique<std::ofstream>(path);
  if (!*file) {
    throw InvalidArgument("cannot open output file '" + path + "'");
  }
  Output o{file.get(), nullptr};
  o.file = std::move(file);
  return o;
}

struct Command {
  std::string name;
  std::string description;
  std::function<void(const ScenarioConfig&, std::ostream&, std::ostream&)> action;
};

void emit(const ScenarioConfig& config, std::ostream& os, const std::string& command,
          const Table& table, json extra) {
  if (config.format == "csv") {
    table.write_csv(os);
    return;
  }
  json report = base_report(command, config);
  report.update(extra);
  report["table"] = table.to_json();
  os << report.dump(2) << '\n';
}

void emit_report(const ScenarioConfig& config, std::ostream& os, const json& report) {
  if (config.format == "csv") {
    write_key_values(os, report);
  } else {
    os << report.dump(2) << '\n';
  }
}

void cmd_fptd(const ScenarioConfig& config, std::ostream& os, std::ostream&) {
  const SpectralSolution sol(to_scenario(config));
  const auto times = time_grid(config, sol.scenario());
  const auto curve = sol.fptd_curve(times);
  Table table{{"t", "phi", "phi_asymptotic"}, {}};
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double asym = curve.asymptotic.empty() ? std::nan("") : curve.asymptotic[i];
    table.rows.push_back({times[i], curve.density[i], asym});
  }
  const auto delta = sol.scenario().clock.bounded()
                         ? std::nullopt
                         : tail_exponent(sol.scenario().clock, sol.scenario().alpha);
  emit(config, os, "fptd", table,
       {{"tail_constant", curve.tail_constant ? json(*curve.tail_constant) : json(nullptr)},
        {"tail_exponent", delta ? json(*delta) : json(nullptr)},
        {"modes", sol.modes().size()},
        {"lambda_max", sol.lambda_max()}});
}

void cmd_survival(const ScenarioConfig& config, std::ostream& os, std::ostream&) {
  const SpectralSolution sol(to_scenario(config));
  const auto times = time_grid(config, sol.scenario());
  const auto p = sol.survival_curve(times);
  Table table{{"t", "survival"}, {}};
  for (std::size_t i = 0; i < times.size(); ++i) {
    table.rows.push_back({times[i], p[i]});
  }
  emit(config, os, "survival", table, {{"modes", sol.modes().size()}, {"lambda_max", sol.lambda_max()}});
}

void cmd_field(const ScenarioConfig& config, std::ostream& os, std::ostream&) {
  if (!config.field_t) {
    throw InvalidArgument("field needs an evaluation time (--t or field.t)");
  }
  const SpectralSolution sol(to_scenario(config));
  const auto points = grid_points(sol.scenario().domain, config.field_points);
  const auto values = sol.field_at(points, *config.field_t);
  emit(config, os, "field", field_table(points, values, "u"), {{"t", *config.field_t}});
}

void cmd_stationary(const ScenarioConfig& config, std::ostream& os, std::ostream& err,
                    const std::string& report_path) {
  const SpectralSolution sol(to_scenario(config));
  if (!sol.scenario().clock.bounded()) {
    throw InvalidArgument("stationary solution needs a bounded clock (use clock.family = dodson); "
                          "'" + config.clock_family + "' grows without bound and the field decays to zero");
  }
  const auto points = grid_points(sol.scenario().domain, config.field_points);
  const auto values = sol.stationary_field_at(points);
  const double p_inf = sol.asymptotic_survival();
  const json extra{{"p_infinity", p_inf}, {"g_infinity", *sol.scenario().clock.limit()}};
  emit(config, os, "stationary", field_table(points, values, "u_stationary"), extra);
  if (config.format == "csv") {
    json report = base_report("stationary", config);
    report.update(extra);
    if (!report_path.empty()) {
      auto rep = open_output(report_path, err);
      *rep.stream << report.dump(2) << '\n';
    } else {
      err << "p_infinity = " << number(p_inf) << '\n';
    }
  }
}

void cmd_mfpt(const ScenarioConfig& config, std::ostream& os, std::ostream&) {
  const SpectralSolution sol(to_scenario(config));
  json report = base_report("mfpt", config);
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, FiniteMfpt>) {
          report["result"] = "finite";
          report["tau"] = r.tau;
          report["error"] = r.error;
        } else if constexpr (std::is_same_v<T, InfiniteMfpt>) {
          report["result"] = "infinite";
          report["tail_exponent"] = r.tail_exponent ? json(*r.tail_exponent) : json(nullptr);
        } else {
          report["result"] = "undefined";
          report["p_infinity"] = r.p_infinity;
        }
      },
      sol.mfpt());
  emit_report(config, os, report);
}

void cmd_classify(const ScenarioConfig& config, std::ostream& os, std::ostream&) {
  const Scenario scenario = to_scenario(config);
  json report = base_report("classify", config);
  const auto regime = classify_mfpt(scenario.clock, scenario.alpha);
  report["regime"] = to_string(regime);
  if (regime == MfptRegime::NeverAbsorbed) {
    report["p_infinity"] = SpectralSolution(scenario).asymptotic_survival();
    report["tail_exponent"] = nullptr;
  } else {
    report["p_infinity"] = nullptr;
    const auto delta = tail_exponent(scenario.clock, scenario.alpha);
    report["tail_exponent"] = delta ? json(*delta) : json(nullptr);
  }
  emit_report(config, os, report);
}

json error_json(const oracle::ValidationReport& rep, bool refined) {
  const auto& grid = refined ? rep.refined_grid : rep.base_grid;
  const auto& errors = refined ? rep.refined : rep.base;
  json slices = json::array();
  for (std::size_t k = 0; k < errors.s_values.size(); ++k) {
    slices.push_back({{"s", errors.s_values[k]}, {"error", errors.errors[k]}});
  }
  return {{"points_per_axis", grid.points_per_axis},
          {"s_steps", grid.s_steps},
          {"s_final", grid.s_final},
          {"worst", errors.worst()},
          {"slices", std::move(slices)}};
}

void cmd_validate(const ScenarioConfig& config, std::ostream& os, std::ostream&) {
  Scenario scenario = to_scenario(config);
  const auto grid = config.validate_grid;
  grid.validate();
  const double sigma = config.ic_type == "gaussian" ? config.ic_sigma : config.validate_sigma;
  Scenario smooth = oracle::mollify(scenario, sigma);
  if (!(smooth.policy.lambda_max > 0.0)) {
    // Gaussian projections fall off like exp(-lambda sigma^2 / 2).
    smooth.policy.lambda_max = 60.0 / (sigma * sigma);
  }
  const auto& clock = smooth.clock;
  const double s_first = grid.s_final / grid.snapshots;
  if (const auto g_inf = clock.limit(); g_inf && grid.s_final >= *g_inf) {
    throw InvalidArgument("validate.s_final must stay below the clock limit g(infinity)");
  }
  smooth.policy.t_min = std::min(smooth.policy.t_min, 0.5 * clock.inverse(s_first));
  const SpectralSolution sol(smooth);
  const oracle::FieldAtClockValue reference = [&](const std::vector<Point>& points, double s) {
    return sol.field_at(points, clock.inverse(s));
  };
  const auto norm = oracle::parse_norm(config.validate_norm);
  const auto rep = oracle::refinement_study(smooth, grid, reference, norm);
  const bool passed = rep.base.worst() < kValidationTolerance && rep.decreasing();
  if (config.format == "csv") {
    Table table{{"level", "points_per_axis", "s_steps", "s", "error"}, {}};
    for (int level = 0; level < 2; ++level) {
      const auto& g = level ? rep.refined_grid : rep.base_grid;
      const auto& e = level ? rep.refined : rep.base;
      for (std::size_t k = 0; k < e.s_values.size(); ++k) {
        table.rows.push_back({static_cast<double>(level), static_cast<double>(g.points_per_axis),
                              static_cast<double>(g.s_steps), e.s_values[k], e.errors[k]});
      }
    }
    table.write_csv(os);
    return;
  }
  json report = base_report("validate", config);
  report["norm"] = oracle::to_string(norm);
  report["sigma"] = sigma;
  report["base"] = error_json(rep, false);
  report["refined"] = error_json(rep, true);
  report["decreasing"] = rep.decreasing();
  report["tolerance"] = kValidationTolerance;
  report["passed"] = passed;
  os << report.dump(2) << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"g-fractional diffusion on boxes: survival, first-passage densities and MFPT"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // Flag name -> config key. Values are kept as text and pushed through
  // ScenarioConfig::set so files and flags share one parser.
  const std::vector<std::pair<std::string, std::string>> flag_keys{
      {"--alpha", "alpha"},         {"--clock", "clock.family"},   {"--beta", "clock.beta"},
      {"--dim", "dim"},             {"--lengths", "lengths"},      {"--diffusion", "diffusion"},
      {"--x0", "ic.x0"},            {"--ic", "ic.type"},           {"--sigma", "ic.sigma"},
      {"--tmin", "time.t_min"},     {"--tmax", "time.t_max"},      {"--tpoints", "time.points"},
      {"--spacing", "time.spacing"}, {"--lambda-max", "policy.lambda_max"},
      {"--truncation-tol", "policy.truncation_tol"}, {"--format", "output.format"},
      {"--t", "field.t"},           {"--points", "field.points"},  {"--norm", "validate.norm"},
      {"--grid-points", "validate.points_per_axis"}, {"--s-steps", "validate.s_steps"},
      {"--s-final", "validate.s_final"}};

  std::string config_path;
  std::string out_path;
  std::string report_path;
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_options;
  std::string selected;

  const std::vector<Command> commands{
      {"fptd", "first-passage-time density curve (t, phi, phi_asymptotic)", cmd_fptd},
      {"survival", "survival probability curve", cmd_survival},
      {"field", "field u(r, t) on a regular grid at one time", cmd_field},
      {"mfpt", "mean first-passage time report", cmd_mfpt},
      {"classify", "MFPT regime of the clock (finite, infinite, never absorbed)", cmd_classify},
      {"stationary", "stationary field and asymptotic survival for bounded clocks",
       [&](const ScenarioConfig& c, std::ostream& o, std::ostream& e) { cmd_stationary(c, o, e, report_path); }},
      {"validate", "compare against the finite-difference oracle with one refinement", cmd_validate},
  };

  for (const auto& command : commands) {
    CLI::App* sub = app.add_subcommand(command.name, command.description);
    sub->add_option("--config", config_path, "scenario file (key = value lines or JSON)");
    sub->add_option("--out", out_path, "output path (default stdout)");
    if (command.name == "stationary") {
      sub->add_option("--report", report_path, "JSON report path for p_infinity in CSV mode");
    }
    for (const auto& [flag, key] : flag_keys) {
      flag_options[command.name + flag] = sub->add_option(flag, flag_values[command.name + flag], "sets " + key);
    }
    sub->callback([&selected, name = command.name] { selected = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    ScenarioConfig config = config_path.empty() ? ScenarioConfig{} : load_config(config_path);
    for (const auto& [flag, key] : flag_keys) {
      if (flag_options[selected + flag]->count() > 0) {
        config.set(key, flag_values[selected + flag]);
      }
    }
    config.finalize();
    // Build into a buffer so a failing command leaves no partial output file.
    std::ostringstream buffer;
    for (const auto& command : commands) {
      if (command.name == selected) {
        command.action(config, buffer, err);
      }
    }
    auto sink = open_output(out_path, out);
    *sink.stream << buffer.str();
    sink.stream->flush();
    return kExitOk;
  } catch (const NumericError& e) {
    err << "gfdiff " << selected << ": numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const InvalidArgument& e) {
    err << "gfdiff " << selected << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "gfdiff " << selected << ": internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace gfdiff::cli
