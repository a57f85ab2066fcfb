#include "gfdiff/solution.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gfdiff/error.hpp"
#include "gfdiff/gamma.hpp"
#include "gfdiff/summation.hpp"

namespace gfdiff {
namespace {

constexpr double kPi = std::numbers::pi;
// Negative densities above this floor are rounding noise of alternating sums.
constexpr double kNegativeFloor = -1e-12;
// lambda_1 D g^alpha at which the three-term algebraic expansion takes over
// the survival integral.
constexpr double kTailOperationalTime = 1e3;

MLAccuracy accuracy_for(const SeriesPolicy& policy) {
  MLAccuracy acc;
  acc.rel_tol = std::min(1e-10, policy.rel_tol);
  return acc;
}

// Smallest y with E_alpha(-y) <= tol.
double decay_argument(double alpha, double tol, const MLAccuracy& acc) {
  if (alpha == 1.0) {
    return std::log(1.0 / tol);
  }
  const MittagLeffler e(alpha, 1.0, acc);
  double lo = 0.0;
  double hi = 1.0;
  while (e(-hi) > tol) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) {
      throw NumericError("cutoff search for the Mittag-Leffler decay diverged");
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-10 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (e(-mid) > tol ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

void SeriesPolicy::validate() const {
  if (!(lambda_max >= 0.0) || !std::isfinite(lambda_max)) {
    throw InvalidArgument("series policy: lambda_max must be >= 0 (0 selects the automatic cutoff)");
  }
  if (min_modes_per_axis < 3) {
    throw InvalidArgument("series policy: min_modes_per_axis must be at least 3");
  }
  if (!(rel_tol > 0.0 && rel_tol <= 1e-4)) {
    throw InvalidArgument("series policy: rel_tol must lie in (0, 1e-4]");
  }
  if (!(t_min > 0.0) || !std::isfinite(t_min)) {
    throw InvalidArgument("series policy: t_min must be positive");
  }
  if (!(truncation_tol > 0.0 && truncation_tol < 1.0)) {
    throw InvalidArgument("series policy: truncation_tol must lie in (0, 1)");
  }
  if (max_modes < 1) {
    throw InvalidArgument("series policy: max_modes must be positive");
  }
}

SpectralCoefficients enumerate_modes(const BoxDomain& domain, const SeriesPolicy& policy) {
  policy.validate();
  if (!(policy.lambda_max > 0.0)) {
    throw InvalidArgument("enumerate_modes: the policy cutoff is unresolved (lambda_max = 0)");
  }
  const double cutoff = std::max(policy.lambda_max, min_modes_cutoff(domain, policy.min_modes_per_axis));
  return enumerate_modes(domain, cutoff, policy.max_modes);
}

void Scenario::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("fractional order alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
  policy.validate();
  validate_initial_condition(domain, ic);
}

double resolve_lambda_max(const Scenario& scenario) {
  scenario.validate();
  const auto& policy = scenario.policy;
  const double floor = min_modes_cutoff(scenario.domain, policy.min_modes_per_axis);
  if (policy.lambda_max > 0.0) {
    return std::max(policy.lambda_max, floor);
  }
  const double y_min =
      scenario.domain.diffusion() * std::pow(scenario.clock(policy.t_min), scenario.alpha);
  if (!(y_min > 0.0)) {
    throw InvalidArgument("automatic cutoff needs g(t_min) > 0");
  }
  const double y_star = decay_argument(scenario.alpha, policy.truncation_tol, accuracy_for(policy));
  return std::max(y_star / y_min, floor);
}

SpectralSolution::SpectralSolution(Scenario scenario)
    : scenario_(std::move(scenario)),
      lambda_max_(resolve_lambda_max(scenario_)),
      relaxation_(scenario_.alpha, 1.0, accuracy_for(scenario_.policy)),
      density_(scenario_.alpha, scenario_.alpha, accuracy_for(scenario_.policy)) {
  SeriesPolicy resolved = scenario_.policy;
  resolved.lambda_max = lambda_max_;
  modes_ = project_modes(scenario_.domain, scenario_.ic, enumerate_modes(scenario_.domain, resolved));

  const auto& lambdas = modes_.lambdas();
  const auto& phis = modes_.phi_integrals();
  const auto& u0 = modes_.projections();
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    const double w = u0[m] * phis[m];
    if (w != 0.0) {
      absorbing_lambda_.push_back(lambdas[m]);
      absorbing_weight_.push_back(w);
    }
  }
  if (const auto* peak = std::get_if<DeltaPeak>(&scenario_.ic)) {
    const auto& domain = scenario_.domain;
    for (std::size_t m = 0; m < modes_.size(); ++m) {
      const auto idx = modes_.index(m);
      if (!std::all_of(idx.begin(), idx.end(), [](int v) { return v % 2 == 1; })) {
        continue;
      }
      double w = 1.0;
      for (std::size_t i = 0; i < domain.dim(); ++i) {
        w *= std::sin(kPi * idx[i] * peak->r0[i] / domain.length(i)) / idx[i];
      }
      odd_lambda_.push_back(lambdas[m]);
      odd_weight_.push_back(w);
    }
  }
}

void SpectralSolution::check_time(double t) const {
  if (!(t >= scenario_.policy.t_min)) {
    throw InvalidArgument("evaluation time " + std::to_string(t) + " is below t_min = " +
                          std::to_string(scenario_.policy.t_min) +
                          " (the truncated series is not converged there)");
  }
}

double SpectralSolution::operational_time(double t) const {
  return scenario_.domain.diffusion() * std::pow(scenario_.clock(t), scenario_.alpha);
}

double SpectralSolution::clamp_nonnegative(double value, const char* what) const {
  if (value >= 0.0) {
    return value;
  }
  if (value >= kNegativeFloor) {
    return 0.0;
  }
  throw NumericError(std::string(what) + " came out negative (" + std::to_string(value) +
                     "): series truncation too coarse, raise t_min or lambda_max");
}

std::vector<double> SpectralSolution::field_from_argument(const std::vector<Point>& points,
                                                          double y) const {
  const auto& domain = scenario_.domain;
  const std::size_t d = domain.dim();
  const auto& lambdas = modes_.lambdas();
  const auto& u0 = modes_.projections();
  std::vector<double> amplitude(modes_.size());
  std::vector<int> max_n(d, 1);
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    amplitude[m] = u0[m] * relaxation_(-lambdas[m] * y);
    const auto idx = modes_.index(m);
    for (std::size_t i = 0; i < d; ++i) {
      max_n[i] = std::max(max_n[i], idx[i]);
    }
  }
  std::vector<std::vector<double>> sines(d);
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& r : points) {
    if (!domain.contains(r)) {
      throw InvalidArgument("field evaluated outside the box");
    }
    bool on_boundary = false;
    for (std::size_t i = 0; i < d; ++i) {
      const double L = domain.length(i);
      on_boundary = on_boundary || r[i] == 0.0 || r[i] == L;
      sines[i].resize(static_cast<std::size_t>(max_n[i]) + 1);
      for (int n = 1; n <= max_n[i]; ++n) {
        sines[i][n] = std::sqrt(2.0 / L) * std::sin(kPi * n * r[i] / L);
      }
    }
    if (on_boundary) {
      out.push_back(0.0);
      continue;
    }
    CompensatedSum sum;
    for (std::size_t m = 0; m < modes_.size(); ++m) {
      const auto idx = modes_.index(m);
      double term = amplitude[m];
      for (std::size_t i = 0; i < d; ++i) {
        term *= sines[i][idx[i]];
      }
      sum += term;
    }
    out.push_back(sum.value());
  }
  return out;
}

double SpectralSolution::field(std::span<const double> r, double t) const {
  return field_at({Point(r.begin(), r.end())}, t).front();
}

std::vector<double> SpectralSolution::field_at(const std::vector<Point>& points, double t) const {
  check_time(t);
  return field_from_argument(points, operational_time(t));
}

std::vector<double> SpectralSolution::field_at_clock_value(const std::vector<Point>& points,
                                                           double s) const {
  if (!(s >= 0.0)) {
    throw InvalidArgument("clock value must be non-negative");
  }
  if (s < scenario_.clock(scenario_.policy.t_min)) {
    throw InvalidArgument("clock value below g(t_min): the truncated series is not converged there");
  }
  return field_from_argument(points, scenario_.domain.diffusion() * std::pow(s, scenario_.alpha));
}

double SpectralSolution::survival_at_operational(double y) const {
  CompensatedSum sum;
  for (std::size_t m = 0; m < absorbing_lambda_.size(); ++m) {
    sum += absorbing_weight_[m] * relaxation_(-absorbing_lambda_[m] * y);
  }
  const double p = sum.value();
  if (p > 1.0 + 1e-6) {
    throw NumericError("survival probability exceeds one (" + std::to_string(p) +
                       "): series truncation too coarse");
  }
  return clamp_nonnegative(p, "survival probability");
}

double SpectralSolution::survival(double t) const {
  check_time(t);
  return survival_at_operational(operational_time(t));
}

std::vector<double> SpectralSolution::survival_curve(std::span<const double> times) const {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    out.push_back(survival(t));
  }
  return out;
}

double SpectralSolution::fptd_sum(double y) const {
  CompensatedSum sum;
  for (std::size_t m = 0; m < absorbing_lambda_.size(); ++m) {
    const double lambda = absorbing_lambda_[m];
    sum += lambda * absorbing_weight_[m] * density_(-lambda * y);
  }
  return sum.value();
}

double SpectralSolution::fptd(double t) const {
  check_time(t);
  const auto& clock = scenario_.clock;
  const double D = scenario_.domain.diffusion();
  const double g = clock(t);
  const double prefactor = D * clock.derivative(t) * std::pow(g, scenario_.alpha - 1.0);
  return clamp_nonnegative(prefactor * fptd_sum(D * std::pow(g, scenario_.alpha)),
                           "first-passage density");
}

double SpectralSolution::fptd_rectangular(double t) const {
  if (!std::holds_alternative<DeltaPeak>(scenario_.ic)) {
    throw InvalidArgument("the odd-mode closed form needs a delta-peaked initial condition");
  }
  check_time(t);
  const auto& clock = scenario_.clock;
  const double D = scenario_.domain.diffusion();
  const double g = clock(t);
  const double y = D * std::pow(g, scenario_.alpha);
  const auto d = static_cast<double>(scenario_.domain.dim());
  const double prefactor =
      std::pow(4.0, d) * D * clock.derivative(t) * std::pow(g, scenario_.alpha - 1.0) / std::pow(kPi, d);
  CompensatedSum sum;
  for (std::size_t m = 0; m < odd_lambda_.size(); ++m) {
    const double lambda = odd_lambda_[m];
    sum += lambda * odd_weight_[m] * density_(-lambda * y);
  }
  return clamp_nonnegative(prefactor * sum.value(), "first-passage density");
}

double SpectralSolution::mode_moment(int power) const {
  CompensatedSum sum;
  for (std::size_t m = 0; m < absorbing_lambda_.size(); ++m) {
    sum += absorbing_weight_[m] * std::pow(absorbing_lambda_[m], -power);
  }
  return sum.value();
}

double SpectralSolution::fptd_tail_constant() const {
  if (scenario_.clock.bounded()) {
    throw InvalidArgument("bounded clocks have no power-law first-passage tail");
  }
  return -reciprocal_gamma(-scenario_.alpha) / scenario_.domain.diffusion() * mode_moment(1);
}

double SpectralSolution::fptd_asymptotic(double t) const {
  const auto& clock = scenario_.clock;
  return fptd_tail_constant() * clock.derivative(t) * std::pow(clock(t), -(scenario_.alpha + 1.0));
}

FPTDCurve SpectralSolution::fptd_curve(std::span<const double> times) const {
  FPTDCurve curve;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw InvalidArgument("curve times must be strictly increasing");
    }
  }
  curve.times.assign(times.begin(), times.end());
  curve.density.reserve(times.size());
  for (double t : times) {
    curve.density.push_back(fptd(t));
  }
  if (!scenario_.clock.bounded()) {
    const double c = fptd_tail_constant();
    curve.tail_constant = c;
    const auto& clock = scenario_.clock;
    for (double t : times) {
      curve.asymptotic.push_back(c * clock.derivative(t) * std::pow(clock(t), -(scenario_.alpha + 1.0)));
    }
  }
  return curve;
}

MfptResult SpectralSolution::mfpt() const {
  const auto& clock = scenario_.clock;
  const double alpha = scenario_.alpha;
  switch (classify_mfpt(clock, alpha)) {
    case MfptRegime::NeverAbsorbed:
      return UndefinedMfpt{asymptotic_survival()};
    case MfptRegime::Infinite:
      return InfiniteMfpt{tail_exponent(clock, alpha)};
    case MfptRegime::Finite:
      break;
  }
  if (absorbing_lambda_.empty()) {
    throw NumericError("no absorbing modes: the survival probability never decays");
  }

  const double D = scenario_.domain.diffusion();
  const double t_min = scenario_.policy.t_min;
  const double tol = scenario_.policy.rel_tol;
  const double lambda1 = absorbing_lambda_.front();

  // [0, t_min]: P(0+) = 1, trapezoid.
  const double p_min = survival(t_min);
  const double head = 0.5 * t_min * (kSurvivalAtZero + p_min);
  const double head_err = 0.5 * t_min * std::fabs(kSurvivalAtZero - p_min);

  // Window end in operational time y = D g^alpha.
  const double y_end = alpha == 1.0 ? 45.0 / lambda1 : kTailOperationalTime / lambda1;
  double t_end = std::max(clock.inverse(std::pow(y_end / D, 1.0 / alpha)), 2.0 * t_min);

  auto integrate_window = [&](double a, double b, double& err) {
    auto integrand = [&](double u) {
      const double t = std::exp(u);
      return survival_at_operational(operational_time(t)) * t;
    };
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, std::log(a), std::log(b), 20, 0.01 * tol, &err, &l1);
    return value;
  };

  double body_err = 0.0;
  double body = integrate_window(t_min, t_end, body_err);

  double tail = 0.0;
  double tail_err = 0.0;
  if (alpha < 1.0) {
    // P(t) ~ sum_k (-1)^{k+1} A_k y^{-k} / Gamma(1 - alpha k), A_k = sum c_n lambda_n^{-k}.
    constexpr int kTerms = 3;
    std::array<double, kTerms + 1> moments{};
    std::array<double, kTerms + 1> coeffs{};
    for (int k = 1; k <= kTerms; ++k) {
      moments[k] = mode_moment(k);
      coeffs[k] = (k % 2 == 1 ? 1.0 : -1.0) * reciprocal_gamma(1.0 - alpha * k) * moments[k];
    }
    auto asymptotic_survival_at = [&](double t) {
      const double y = operational_time(t);
      double p = 0.0;
      for (int k = 1; k <= kTerms; ++k) {
        p += coeffs[k] * std::pow(y, -k);
      }
      return p;
    };
    // Push the switch point out until the expansion matches the exact sum.
    double mismatch = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < 8; ++attempt) {
      const double exact = survival(t_end);
      mismatch = std::fabs(asymptotic_survival_at(t_end) - exact) / exact;
      if (mismatch < 1e-6) {
        break;
      }
      double extra_err = 0.0;
      const double next = t_end * 10.0;
      body += integrate_window(t_end, next, extra_err);
      body_err += extra_err;
      t_end = next;
    }
    // int_{t_end}^inf g(t)^{-alpha k} dt
    auto clock_power_integral = [&](int k) {
      const double p = alpha * k;
      if (const auto* pl = std::get_if<PowerLawClock>(&clock.family())) {
        const double q = p * pl->exponent;
        return std::pow(t_end, 1.0 - q) / (q - 1.0);
      }
      boost::math::quadrature::exp_sinh<double> rule;
      return rule.integrate([&](double t) { return std::pow(clock(t), -p); }, t_end,
                            std::numeric_limits<double>::infinity());
    };
    CompensatedSum tail_sum;
    double last_term = 0.0;
    for (int k = 1; k <= kTerms; ++k) {
      last_term = coeffs[k] * std::pow(D, -k) * clock_power_integral(k);
      tail_sum += last_term;
    }
    tail = tail_sum.value();
    tail_err = std::fabs(last_term) + mismatch * std::fabs(tail);
  }

  return FiniteMfpt{head + body + tail, head_err + body_err + tail_err};
}

double SpectralSolution::bounded_limit(const char* what) const {
  const auto g_inf = scenario_.clock.limit();
  if (!g_inf) {
    throw InvalidArgument(std::string(what) + " needs a bounded clock (finite g at infinity)");
  }
  return *g_inf;
}

double SpectralSolution::stationary_field(std::span<const double> r) const {
  return stationary_field_at({Point(r.begin(), r.end())}).front();
}

std::vector<double> SpectralSolution::stationary_field_at(const std::vector<Point>& points) const {
  const double g_inf = bounded_limit("stationary field");
  return field_from_argument(points, scenario_.domain.diffusion() * std::pow(g_inf, scenario_.alpha));
}

double SpectralSolution::asymptotic_survival() const {
  const double g_inf = bounded_limit("asymptotic survival");
  return survival_at_operational(scenario_.domain.diffusion() * std::pow(g_inf, scenario_.alpha));
}

double field(const Scenario& scenario, std::span<const double> r, double t) {
  return SpectralSolution(scenario).field(r, t);
}

double survival(const Scenario& scenario, double t) { return SpectralSolution(scenario).survival(t); }

double fptd(const Scenario& scenario, double t) { return SpectralSolution(scenario).fptd(t); }

double fptd_tail_constant(const Scenario& scenario) {
  return SpectralSolution(scenario).fptd_tail_constant();
}

MfptResult mfpt(const Scenario& scenario) { return SpectralSolution(scenario).mfpt(); }

double stationary_field(const Scenario& scenario, std::span<const double> r) {
  return SpectralSolution(scenario).stationary_field(r);
}

double asymptotic_survival(const Scenario& scenario) {
  return SpectralSolution(scenario).asymptotic_survival();
}

}  // namespace gfdiff
