#include "gfdiff/mittag_leffler.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gfdiff/error.hpp"
#include "gfdiff/gamma.hpp"
#include "gfdiff/summation.hpp"

namespace gfdiff {
namespace {

constexpr int kAsymptoticTerms = 64;
// Past this argument 1/Gamma is below 1e-30 and later series terms come from
// log_gamma instead of the cached table.
constexpr double kSeriesTableLimit = 30.0;

// The Boost integrators cache abscissa rows lazily, so each thread owns one.
boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  return rule;
}

boost::math::quadrature::exp_sinh<double>& exp_sinh_rule() {
  thread_local boost::math::quadrature::exp_sinh<double> rule;
  return rule;
}

void check_order(double alpha, double beta) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("Mittag-Leffler: alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("Mittag-Leffler: beta must be positive, got " + std::to_string(beta));
  }
}

}  // namespace

void MLAccuracy::validate() const {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-4)) {
    throw InvalidArgument("MLAccuracy: rel_tol must lie in (0, 1e-4]");
  }
  if (max_terms < 50) {
    throw InvalidArgument("MLAccuracy: max_terms must be at least 50");
  }
  if (!(series_radius > 0.0) || !(asymptotic_threshold >= series_radius)) {
    throw InvalidArgument("MLAccuracy: need 0 < series_radius <= asymptotic_threshold");
  }
}

MittagLeffler::MittagLeffler(double alpha, double beta, MLAccuracy accuracy)
    : alpha_(alpha), beta_(beta), accuracy_(accuracy) {
  check_order(alpha, beta);
  accuracy_.validate();
  for (int k = 0; alpha * k + beta <= kSeriesTableLimit; ++k) {
    series_coeff_.push_back(reciprocal_gamma(alpha * k + beta));
  }
  asymptotic_coeff_.resize(kAsymptoticTerms + 1, 0.0);
  for (int k = 1; k <= kAsymptoticTerms; ++k) {
    const double arg = beta - alpha * k;
    // beta - alpha k often misses a pole of Gamma by one ulp (0.6 - 6 * 0.6).
    const double nearest = std::round(arg);
    const bool at_pole = nearest <= 0.0 && std::fabs(arg - nearest) <= 1e-12 * std::max(1.0, -nearest);
    asymptotic_coeff_[k] = at_pole ? 0.0 : reciprocal_gamma(arg);
  }
}

double MittagLeffler::evaluate(double x, MLMethod method) const {
  if (!std::isfinite(x)) {
    throw InvalidArgument("Mittag-Leffler: argument must be finite");
  }
  switch (method) {
    case MLMethod::Series:
      return series(x);
    case MLMethod::Integral:
      return alpha_ == 1.0 ? alpha_one(x) : integral(x);
    case MLMethod::Asymptotic: {
      double value = 0.0;
      if (x >= 0.0 || !try_asymptotic(x, value)) {
        throw NumericError("Mittag-Leffler: asymptotic expansion not accurate at this argument");
      }
      return value;
    }
    case MLMethod::Automatic:
      break;
  }

  if (x == 0.0) {
    return series_coeff_.front();
  }
  if (alpha_ == 1.0 && beta_ == 1.0) {
    return std::exp(x);
  }
  if (std::fabs(x) <= accuracy_.series_radius) {
    return series(x);
  }
  if (x <= -accuracy_.asymptotic_threshold) {
    double value = 0.0;
    if (try_asymptotic(x, value)) {
      return value;
    }
  }
  return alpha_ == 1.0 ? alpha_one(x) : integral(x);
}

double MittagLeffler::series(double x) const {
  if (x == 0.0) {
    return series_coeff_.front();
  }
  const double ax = std::fabs(x);
  const double log_ax = std::log(ax);
  // Index past which term magnitudes decrease monotonically.
  const double peak_argument = std::max(2.0, std::pow(ax, 1.0 / alpha_));
  CompensatedSum sum;
  double power = 1.0;
  int small_in_a_row = 0;
  for (int k = 0; k < accuracy_.max_terms; ++k) {
    double term = 0.0;
    if (static_cast<std::size_t>(k) < series_coeff_.size() && ax <= 4.0) {
      term = power * series_coeff_[k];
      power *= x;
    } else {
      const double magnitude = std::exp(k * log_ax - log_gamma(alpha_ * k + beta_));
      term = (x < 0.0 && (k % 2 == 1)) ? -magnitude : magnitude;
    }
    sum += term;
    const bool past_peak = alpha_ * k + beta_ > peak_argument;
    if (past_peak && std::fabs(term) <= 1e-17 * std::fabs(sum.value())) {
      if (++small_in_a_row == 2) {
        return sum.value();
      }
    } else {
      small_in_a_row = 0;
    }
    if (!std::isfinite(sum.value())) {
      return sum.value();
    }
  }
  throw NumericError("Mittag-Leffler: power series did not converge within max_terms");
}

double MittagLeffler::asymptotic_terms(double x, int terms) const {
  if (!(x < 0.0)) {
    throw InvalidArgument("Mittag-Leffler: asymptotic expansion needs a negative argument");
  }
  if (terms < 1) {
    throw InvalidArgument("Mittag-Leffler: asymptotic order must be at least 1");
  }
  CompensatedSum sum;
  const double inv = 1.0 / x;
  double power = 1.0;
  int used = 0;
  for (int k = 1; k <= kAsymptoticTerms && used < terms; ++k) {
    power *= inv;
    if (asymptotic_coeff_[k] == 0.0) {
      continue;
    }
    sum += -power * asymptotic_coeff_[k];
    ++used;
  }
  return sum.value();
}

bool MittagLeffler::try_asymptotic(double x, double& value) const {
  const double ax = -x;
  const double target = 0.1 * accuracy_.rel_tol;
  CompensatedSum sum;
  const double inv = 1.0 / x;
  double power = 1.0;
  double previous = std::numeric_limits<double>::infinity();
  bool converged = false;
  int small_in_a_row = 0;
  for (int k = 1; k <= kAsymptoticTerms; ++k) {
    power *= inv;
    if (asymptotic_coeff_[k] == 0.0) {
      continue;
    }
    const double term = -power * asymptotic_coeff_[k];
    const double magnitude = std::fabs(term);
    if (magnitude > previous) {
      break;  // divergent tail reached before the tolerance
    }
    sum += term;
    previous = magnitude;
    if (magnitude <= target * std::fabs(sum.value())) {
      if (++small_in_a_row == 2) {
        converged = true;
        break;
      }
    } else {
      small_in_a_row = 0;
    }
  }
  const double s = sum.value();
  if (!converged || s == 0.0) {
    return false;
  }
  // Size of the exponentially small part the algebraic expansion omits.
  double omitted = 0.0;
  if (alpha_ == 1.0) {
    omitted = std::exp(-ax + std::fabs(1.0 - beta_) * std::log(ax));
  } else {
    const double s_pi = std::sin(std::numbers::pi * alpha_);
    omitted = std::exp(-std::pow(ax, 1.0 / alpha_)) / (s_pi * s_pi);
  }
  if (omitted > target * std::fabs(s)) {
    return false;
  }
  value = s;
  return true;
}

double MittagLeffler::integral(double x) const {
  // Raise beta into (0, 1 + alpha) through
  // E_{a,b+a}(x) = (E_{a,b}(x) - 1/Gamma(b)) / x.
  int lifts = 0;
  double b = beta_;
  while (b >= 1.0 + alpha_) {
    b -= alpha_;
    ++lifts;
  }
  const double a = alpha_;
  const double z = x;
  const double s_num = sin_pi(1.0 - b);
  const double s_num_shift = sin_pi(1.0 - b + a);
  const double c = std::cos(std::numbers::pi * a);
  const double tol = std::min(1e-13, 1e-3 * accuracy_.rel_tol);

  // Hankel contour collapsed onto the negative real axis:
  // (1/pi) int_0^inf e^{-r} r^{a-b} (r^a sin(pi(1-b)) - z sin(pi(1-b+a)))
  //        / (r^{2a} - 2 r^a z cos(pi a) + z^2) dr
  auto kernel = [=](double r) {
    if (r <= 0.0) {
      return 0.0;
    }
    const double ra = std::pow(r, a);
    const double num = ra * s_num - z * s_num_shift;
    const double den = ra * ra - 2.0 * ra * z * c + z * z;
    return std::exp(-r) * std::pow(r, a - b) * num / den;
  };

  const double peak = std::pow(std::fabs(z), 1.0 / a);
  // Beyond ~745 the weight e^{-r} underflows.
  const double split = std::min(peak, 745.0);
  double err_head = 0.0;
  double l1_head = 0.0;
  double err_tail = 0.0;
  double l1_tail = 0.0;
  double head = 0.0;
  double tail = 0.0;
  try {
    head = tanh_sinh_rule().integrate(kernel, 0.0, split, tol, &err_head, &l1_head);
    if (split < 745.0) {
      tail = exp_sinh_rule().integrate(kernel, split, std::numeric_limits<double>::infinity(), tol,
                                       &err_tail, &l1_tail);
    }
  } catch (const std::exception& e) {
    throw NumericError(std::string("Mittag-Leffler: quadrature failed: ") + e.what());
  }
  double value = (head + tail) / std::numbers::pi;
  const double err = (err_head + err_tail) / std::numbers::pi;
  if (z > 0.0) {
    value += std::pow(z, (1.0 - b) / a) * std::exp(std::pow(z, 1.0 / a)) / a;
  }
  if (!(err <= 1e2 * accuracy_.rel_tol * std::fabs(value)) && std::isfinite(value)) {
    throw NumericError("Mittag-Leffler: integral representation did not reach rel_tol");
  }
  for (int i = 0; i < lifts; ++i) {
    value = (value - reciprocal_gamma(b)) / z;
    b += a;
  }
  return value;
}

double MittagLeffler::alpha_one(double x) const {
  if (beta_ == 1.0) {
    return std::exp(x);
  }
  // E_{1,b}(x) = 1/Gamma(b) + x E_{1,b+1}(x) lifts b above one, then
  // E_{1,b}(x) = (1/Gamma(b)) int_0^1 exp(x (1 - u^{1/(b-1)})) du.
  int lowers = 0;
  double b = beta_;
  while (b <= 1.0) {
    b += 1.0;
    ++lowers;
  }
  const double q = 1.0 / (b - 1.0);
  auto integrand = [=](double u) { return std::exp(x * (1.0 - std::pow(u, q))); };
  double err = 0.0;
  double value = 0.0;
  try {
    value = tanh_sinh_rule().integrate(integrand, 0.0, 1.0, std::min(1e-13, 1e-3 * accuracy_.rel_tol),
                                       &err);
  } catch (const std::exception& e) {
    throw NumericError(std::string("Mittag-Leffler: quadrature failed: ") + e.what());
  }
  value *= reciprocal_gamma(b);
  for (int i = 0; i < lowers; ++i) {
    b -= 1.0;
    value = reciprocal_gamma(b) + x * value;
  }
  return value;
}

double ml_one(double alpha, double x, const MLAccuracy& accuracy) {
  return MittagLeffler(alpha, 1.0, accuracy)(x);
}

double ml_two(double alpha, double beta, double x, const MLAccuracy& accuracy) {
  return MittagLeffler(alpha, beta, accuracy)(x);
}

double ml_two_asymptotic(double alpha, double x, int order, const MLAccuracy& accuracy) {
  if (!(x < 0.0) || -x < accuracy.asymptotic_threshold) {
    throw InvalidArgument("ml_two_asymptotic: |x| must exceed the asymptotic threshold " +
                          std::to_string(accuracy.asymptotic_threshold));
  }
  return MittagLeffler(alpha, alpha, accuracy).asymptotic_terms(x, order);
}

}  // namespace gfdiff
