#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gfdiff/solution.hpp"
#include "gfdiff/spectral_domain.hpp"

// Finite-difference reference solver for validating the spectral series.
//
// Works in the transformed time s = g(t), where the g-Caputo derivative is the
// ordinary Caputo derivative, so one L1 scheme covers every clock. Nothing in
// here touches the Mittag-Leffler code.
namespace gfdiff::oracle {

struct GridSpec {
  /// Nodes per axis including both boundary nodes.
  int points_per_axis = 33;
  int s_steps = 128;
  /// Transformed-time horizon; must stay below g(infinity) for bounded clocks.
  double s_final = 0.1;
  /// Stored slices, evenly spaced in s and ending at s_final.
  int snapshots = 4;

  void validate() const;
  /// Halve h and ds. Node count goes to 2N - 1 so the coarse grid nests.
  [[nodiscard]] GridSpec refined() const;
};

struct OracleSolution {
  std::vector<double> lengths;
  int points_per_axis = 0;
  std::vector<double> s_values;
  /// One vector per snapshot, nodes in row-major order (last axis fastest),
  /// boundary nodes included (always zero).
  std::vector<std::vector<double>> snapshots;

  [[nodiscard]] std::size_t dim() const { return lengths.size(); }
  [[nodiscard]] std::size_t node_count() const;
  [[nodiscard]] std::vector<Point> nodes() const;
};

/// Implicit L1 scheme with a second-order Laplacian. The initial condition
/// must be a Density; use mollify() for a delta start.
OracleSolution solve_l1(const Scenario& scenario, const GridSpec& grid);

/// Same scenario with a delta peak replaced by a box-normalized Gaussian of
/// width sigma. Densities pass through unchanged.
Scenario mollify(const Scenario& scenario, double sigma);

enum class Norm { Max, L2 };
std::string to_string(Norm norm);
Norm parse_norm(const std::string& name);

/// Field values at the given points for clock value s.
using FieldAtClockValue = std::function<std::vector<double>(const std::vector<Point>&, double)>;

struct ErrorReport {
  Norm norm = Norm::Max;
  std::vector<double> s_values;
  std::vector<double> errors;
  [[nodiscard]] double worst() const;
};

/// Evaluates `reference` on the oracle grid at every snapshot.
/// L2 is the discrete norm sqrt(sum e^2 * cell volume).
ErrorReport compare(const FieldAtClockValue& reference, const OracleSolution& solution, Norm norm);
/// Two oracle runs on identical grids; throws InvalidArgument otherwise.
ErrorReport compare(const OracleSolution& a, const OracleSolution& b, Norm norm);

struct ValidationReport {
  GridSpec base_grid;
  GridSpec refined_grid;
  ErrorReport base;
  ErrorReport refined;
  [[nodiscard]] bool decreasing() const { return refined.worst() < base.worst(); }
};

/// Base run plus one refinement, both compared against `reference`.
ValidationReport refinement_study(const Scenario& scenario, const GridSpec& base,
                                  const FieldAtClockValue& reference, Norm norm = Norm::Max);

}  // namespace gfdiff::oracle
