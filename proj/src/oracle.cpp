#include "gfdiff/oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

#include "gfdiff/error.hpp"

namespace gfdiff::oracle {
namespace {

// Row-major strides over the full node grid.
std::vector<std::size_t> strides(std::size_t d, std::size_t n) {
  std::vector<std::size_t> out(d, 1);
  for (std::size_t i = d - 1; i-- > 0;) {
    out[i] = out[i + 1] * n;
  }
  return out;
}

}  // namespace

void GridSpec::validate() const {
  if (points_per_axis < 16) {
    throw InvalidArgument("oracle grid: points_per_axis must be >= 16");
  }
  if (s_steps < 64) {
    throw InvalidArgument("oracle grid: s_steps must be >= 64");
  }
  if (!(s_final > 0.0) || !std::isfinite(s_final)) {
    throw InvalidArgument("oracle grid: s_final must be positive");
  }
  if (snapshots < 1 || snapshots > s_steps) {
    throw InvalidArgument("oracle grid: snapshots must lie in [1, s_steps]");
  }
}

GridSpec GridSpec::refined() const {
  GridSpec g = *this;
  g.points_per_axis = 2 * points_per_axis - 1;
  g.s_steps = 2 * s_steps;
  return g;
}

std::size_t OracleSolution::node_count() const {
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim(); ++i) {
    total *= static_cast<std::size_t>(points_per_axis);
  }
  return total;
}

std::vector<Point> OracleSolution::nodes() const {
  const std::size_t d = dim();
  const auto n = static_cast<std::size_t>(points_per_axis);
  const auto stride = strides(d, n);
  std::vector<Point> out(node_count(), Point(d));
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t j = (k / stride[i]) % n;
      out[k][i] = lengths[i] * static_cast<double>(j) / static_cast<double>(n - 1);
    }
  }
  return out;
}

Scenario mollify(const Scenario& scenario, double sigma) {
  Scenario out = scenario;
  if (const auto* peak = std::get_if<DeltaPeak>(&scenario.ic)) {
    out.ic = gaussian_peak(scenario.domain, peak->r0, sigma);
  }
  return out;
}

OracleSolution solve_l1(const Scenario& scenario, const GridSpec& grid) {
  grid.validate();
  const auto* density = std::get_if<Density>(&scenario.ic);
  if (density == nullptr) {
    throw InvalidArgument("the finite-difference oracle needs a density initial condition (mollify a delta peak)");
  }
  const auto& domain = scenario.domain;
  const std::size_t d = domain.dim();
  if (d > 3) {
    throw InvalidArgument("the finite-difference oracle supports d <= 3");
  }
  if (!(scenario.alpha > 0.0 && scenario.alpha <= 1.0)) {
    throw InvalidArgument("alpha must lie in (0, 1]");
  }
  if (const auto g_inf = scenario.clock.limit(); g_inf && grid.s_final >= *g_inf) {
    throw InvalidArgument("oracle horizon s_final must stay below the clock limit");
  }

  OracleSolution sol;
  sol.lengths = domain.lengths();
  sol.points_per_axis = grid.points_per_axis;
  const auto n = static_cast<std::size_t>(grid.points_per_axis);
  const auto stride = strides(d, n);
  const std::size_t total = sol.node_count();
  const auto nodes = sol.nodes();

  // Interior unknowns only; boundary nodes stay zero.
  std::vector<long> unknown(total, -1);
  std::vector<std::size_t> node_of;
  for (std::size_t k = 0; k < total; ++k) {
    bool interior = true;
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t j = (k / stride[i]) % n;
      interior = interior && j > 0 && j + 1 < n;
    }
    if (interior) {
      unknown[k] = static_cast<long>(node_of.size());
      node_of.push_back(k);
    }
  }
  const auto m = static_cast<Eigen::Index>(node_of.size());

  const double alpha = scenario.alpha;
  const double ds = grid.s_final / grid.s_steps;
  const double mu = std::tgamma(2.0 - alpha) * std::pow(ds, alpha);
  const double D = domain.diffusion();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(node_of.size() * (2 * d + 1));
  for (Eigen::Index row = 0; row < m; ++row) {
    const std::size_t k = node_of[static_cast<std::size_t>(row)];
    double diag = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double h = domain.length(i) / static_cast<double>(n - 1);
      const double c = mu * D / (h * h);
      diag += 2.0 * c;
      for (long shift : {-1L, 1L}) {
        const long neighbour = unknown[static_cast<std::size_t>(static_cast<long>(k) + shift * static_cast<long>(stride[i]))];
        if (neighbour >= 0) {
          triplets.emplace_back(row, neighbour, -c);
        }
      }
    }
    triplets.emplace_back(row, row, diag);
  }
  Eigen::SparseMatrix<double> system(m, m);
  system.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(system);
  if (solver.info() != Eigen::Success) {
    throw NumericError("oracle: factorization of the implicit step matrix failed");
  }

  // L1 weights b_j = (j+1)^{1-alpha} - j^{1-alpha}; alpha = 1 is backward Euler.
  const auto steps = static_cast<std::size_t>(grid.s_steps);
  std::vector<double> b(steps + 1, 0.0);
  for (std::size_t j = 0; j <= steps; ++j) {
    b[j] = alpha == 1.0 ? (j == 0 ? 1.0 : 0.0)
                        : std::pow(static_cast<double>(j + 1), 1.0 - alpha) -
                              std::pow(static_cast<double>(j), 1.0 - alpha);
  }

  std::vector<Eigen::VectorXd> history;
  history.reserve(steps + 1);
  Eigen::VectorXd v0(m);
  for (Eigen::Index row = 0; row < m; ++row) {
    v0[row] = density->f(nodes[node_of[static_cast<std::size_t>(row)]]);
  }
  history.push_back(std::move(v0));

  const std::size_t every = steps / static_cast<std::size_t>(grid.snapshots);
  auto store = [&](const Eigen::VectorXd& v, double s) {
    std::vector<double> full(total, 0.0);
    for (Eigen::Index row = 0; row < m; ++row) {
      full[node_of[static_cast<std::size_t>(row)]] = v[row];
    }
    sol.s_values.push_back(s);
    sol.snapshots.push_back(std::move(full));
  };

  Eigen::VectorXd rhs(m);
  for (std::size_t step = 1; step <= steps; ++step) {
    rhs = history[step - 1];
    if (alpha < 1.0) {
      for (std::size_t j = 1; j < step; ++j) {
        rhs -= b[j] * (history[step - j] - history[step - j - 1]);
      }
    }
    Eigen::VectorXd next = solver.solve(rhs);
    if (solver.info() != Eigen::Success) {
      throw NumericError("oracle: linear solve failed at step " + std::to_string(step));
    }
    history.push_back(std::move(next));
    const bool last = step == steps;
    if ((step % every == 0 && sol.s_values.size() + 1 < static_cast<std::size_t>(grid.snapshots)) || last) {
      store(history.back(), last ? grid.s_final : static_cast<double>(step) * ds);
    }
  }
  return sol;
}

std::string to_string(Norm norm) { return norm == Norm::Max ? "max" : "l2"; }

Norm parse_norm(const std::string& name) {
  if (name == "max") {
    return Norm::Max;
  }
  if (name == "l2") {
    return Norm::L2;
  }
  throw InvalidArgument("unknown norm '" + name + "' (expected max or l2)");
}

double ErrorReport::worst() const {
  return errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());
}

namespace {

double norm_of(const std::vector<double>& a, const std::vector<double>& b, Norm norm,
               double cell_volume) {
  if (a.size() != b.size()) {
    throw InvalidArgument("compared fields have different sizes");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double e = std::fabs(a[k] - b[k]);
    acc = norm == Norm::Max ? std::max(acc, e) : acc + e * e;
  }
  return norm == Norm::Max ? acc : std::sqrt(acc * cell_volume);
}

double cell_volume(const OracleSolution& s) {
  double v = 1.0;
  for (double L : s.lengths) {
    v *= L / (s.points_per_axis - 1);
  }
  return v;
}

}  // namespace

ErrorReport compare(const FieldAtClockValue& reference, const OracleSolution& solution, Norm norm) {
  ErrorReport report;
  report.norm = norm;
  const auto nodes = solution.nodes();
  const double vol = cell_volume(solution);
  for (std::size_t k = 0; k < solution.s_values.size(); ++k) {
    const double s = solution.s_values[k];
    const auto expected = reference(nodes, s);
    report.s_values.push_back(s);
    report.errors.push_back(norm_of(expected, solution.snapshots[k], norm, vol));
  }
  return report;
}

ErrorReport compare(const OracleSolution& a, const OracleSolution& b, Norm norm) {
  if (a.lengths != b.lengths || a.points_per_axis != b.points_per_axis || a.s_values != b.s_values) {
    throw InvalidArgument("oracle solutions live on different grids");
  }
  ErrorReport report;
  report.norm = norm;
  report.s_values = a.s_values;
  const double vol = cell_volume(a);
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    report.errors.push_back(norm_of(a.snapshots[k], b.snapshots[k], norm, vol));
  }
  return report;
}

ValidationReport refinement_study(const Scenario& scenario, const GridSpec& base,
                                  const FieldAtClockValue& reference, Norm norm) {
  ValidationReport report;
  report.base_grid = base;
  report.refined_grid = base.refined();
  report.base = compare(reference, solve_l1(scenario, report.base_grid), norm);
  report.refined = compare(reference, solve_l1(scenario, report.refined_grid), norm);
  return report;
}

}  // namespace gfdiff::oracle
