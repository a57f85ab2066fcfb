#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "gfdiff/clocks.hpp"
#include "gfdiff/mittag_leffler.hpp"
#include "gfdiff/spectral_domain.hpp"

namespace gfdiff {

/// Truncation and accuracy controls shared by every mode sum.
struct SeriesPolicy {
  /// Eigenvalue cutoff; 0 derives it from t_min and truncation_tol.
  double lambda_max = 0.0;
  int min_modes_per_axis = 3;
  double rel_tol = 1e-8;
  /// Smallest admissible evaluation time.
  double t_min = 1e-3;
  /// Automatic cutoff: E_alpha(-lambda_max D g(t_min)^alpha) <= truncation_tol.
  double truncation_tol = 1e-5;
  std::size_t max_modes = 2'000'000;

  void validate() const;
};

/// Modes inside the eigenvalue ball of `policy.lambda_max` (which must be set),
/// widened so that every axis carries at least `policy.min_modes_per_axis` modes.
SpectralCoefficients enumerate_modes(const BoxDomain& domain, const SeriesPolicy& policy);

struct Scenario {
  BoxDomain domain;
  Clock clock;
  double alpha;
  InitialCondition ic;
  SeriesPolicy policy;

  void validate() const;
};

/// Eigenvalue cutoff actually used for `scenario`.
double resolve_lambda_max(const Scenario& scenario);

struct FPTDCurve {
  std::vector<double> times;
  std::vector<double> density;
  /// C in phi ~ C g' g^{-(alpha+1)}; absent for bounded clocks.
  std::optional<double> tail_constant;
  /// C g'(t) g(t)^{-(alpha+1)} at each time; empty without a tail constant.
  std::vector<double> asymptotic;
};

struct FiniteMfpt {
  double tau;
  double error;
};
struct InfiniteMfpt {
  std::optional<double> tail_exponent;
};
/// Bounded clocks: the first-passage density is defective (mass 1 - P_inf).
struct UndefinedMfpt {
  double p_infinity;
};
using MfptResult = std::variant<FiniteMfpt, InfiniteMfpt, UndefinedMfpt>;

/// Series solution of the g-fractional diffusion problem on a box:
///
///   u(r,t) = sum_n u_{0,n} phi_n(r) E_alpha(-lambda_n D g(t)^alpha)
///   P(t)   = sum_n u_{0,n} Phi_n E_alpha(-lambda_n D g(t)^alpha)
///   phi(t) = D g' g^{alpha-1} sum_n lambda_n u_{0,n} Phi_n E_{alpha,alpha}(-lambda_n D g^alpha)
///
/// Modes are enumerated and projected once at construction; every sum runs in
/// ascending eigenvalue order so results are bitwise reproducible. Evaluation
/// before policy.t_min is refused.
class SpectralSolution {
public:
  /// P(0+); the delta initial datum makes the series diverge at t = 0 itself.
  static constexpr double kSurvivalAtZero = 1.0;

  explicit SpectralSolution(Scenario scenario);

  [[nodiscard]] const Scenario& scenario() const { return scenario_; }
  [[nodiscard]] const SpectralCoefficients& modes() const { return modes_; }
  [[nodiscard]] double lambda_max() const { return lambda_max_; }
  [[nodiscard]] double t_min() const { return scenario_.policy.t_min; }

  [[nodiscard]] double field(std::span<const double> r, double t) const;
  /// Field at many points for one time; the Mittag-Leffler factors are shared.
  [[nodiscard]] std::vector<double> field_at(const std::vector<Point>& points, double t) const;
  /// Field with g(t) replaced by an explicit clock value s (s = g(t)).
  [[nodiscard]] std::vector<double> field_at_clock_value(const std::vector<Point>& points,
                                                         double s) const;

  [[nodiscard]] double survival(double t) const;
  [[nodiscard]] std::vector<double> survival_curve(std::span<const double> times) const;

  /// First-passage density via the generic mode sum.
  [[nodiscard]] double fptd(double t) const;
  /// Same density via the odd-mode closed form for a delta start,
  /// 4^d D g' g^{alpha-1} / pi^d sum lambda prod_i sin(pi m_i x_i0 / L_i) / m_i E_{alpha,alpha}.
  [[nodiscard]] double fptd_rectangular(double t) const;
  [[nodiscard]] FPTDCurve fptd_curve(std::span<const double> times) const;

  /// -(1 / (D Gamma(-alpha))) sum_n u_{0,n} Phi_n / lambda_n.
  [[nodiscard]] double fptd_tail_constant() const;
  /// C g'(t) g(t)^{-(alpha+1)}.
  [[nodiscard]] double fptd_asymptotic(double t) const;

  [[nodiscard]] MfptResult mfpt() const;

  [[nodiscard]] double stationary_field(std::span<const double> r) const;
  [[nodiscard]] std::vector<double> stationary_field_at(const std::vector<Point>& points) const;
  [[nodiscard]] double asymptotic_survival() const;

private:
  void check_time(double t) const;
  [[nodiscard]] double operational_time(double t) const;
  [[nodiscard]] double survival_at_operational(double y) const;
  [[nodiscard]] double fptd_sum(double y) const;
  [[nodiscard]] std::vector<double> field_from_argument(const std::vector<Point>& points,
                                                        double y) const;
  [[nodiscard]] double clamp_nonnegative(double value, const char* what) const;
  [[nodiscard]] double bounded_limit(const char* what) const;
  [[nodiscard]] double mode_moment(int power) const;

  Scenario scenario_;
  double lambda_max_;
  SpectralCoefficients modes_;
  MittagLeffler relaxation_;  // E_alpha
  MittagLeffler density_;     // E_{alpha,alpha}
  // Modes with u_{0,n} Phi_n != 0, ascending lambda.
  std::vector<double> absorbing_lambda_;
  std::vector<double> absorbing_weight_;
  // All-odd modes for the closed-form density (delta start only).
  std::vector<double> odd_lambda_;
  std::vector<double> odd_weight_;
};

// Free-function forms. Each builds a SpectralSolution, so prefer the class
// when evaluating more than once.
double field(const Scenario& scenario, std::span<const double> r, double t);
double survival(const Scenario& scenario, double t);
double fptd(const Scenario& scenario, double t);
double fptd_tail_constant(const Scenario& scenario);
MfptResult mfpt(const Scenario& scenario);
double stationary_field(const Scenario& scenario, std::span<const double> r);
double asymptotic_survival(const Scenario& scenario);

}  // namespace gfdiff
