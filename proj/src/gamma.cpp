#include "gfdiff/gamma.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "gfdiff/error.hpp"

namespace gfdiff {
namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoeff = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// Lanczos partial-fraction sum A(x) for Gamma(x + 1).
double lanczos_sum(double x) {
  double a = kLanczosCoeff[0];
  for (std::size_t i = 1; i < kLanczosCoeff.size(); ++i) {
    a += kLanczosCoeff[i] / (x + static_cast<double>(i));
  }
  return a;
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// Gamma(x) for x >= 1/2. Exact at small positive integers.
double gamma_positive(double x) {
  if (x > 171.7) {
    return std::numeric_limits<double>::infinity();
  }
  if (x <= 23.0 && x == std::floor(x)) {
    double f = 1.0;
    for (double k = 2.0; k < x; k += 1.0) {
      f *= k;
    }
    return f;
  }
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  const double sqrt_two_pi = std::sqrt(2.0 * std::numbers::pi);
  // t^(x - 1/2) split in two halves to stay finite up to x ~ 171.
  const double half_power = std::pow(t, 0.5 * (xm1 + 0.5));
  return sqrt_two_pi * half_power * (half_power * std::exp(-t)) * lanczos_sum(xm1);
}

}  // namespace

double sin_pi(double x) {
  if (!std::isfinite(x)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  // Reduce to r in [-1, 1]; sin(pi x) = sin(pi r).
  double r = std::fmod(x, 2.0);
  if (r > 1.0) {
    r -= 2.0;
  } else if (r < -1.0) {
    r += 2.0;
  }
  if (r == 0.0 || r == 1.0 || r == -1.0) {
    return 0.0;
  }
  if (r > 0.5) {
    r = 1.0 - r;
  } else if (r < -0.5) {
    r = -1.0 - r;
  }
  return std::sin(std::numbers::pi * r);
}

double gamma(double x) {
  if (std::isnan(x)) {
    return x;
  }
  if (is_nonpositive_integer(x)) {
    throw InvalidArgument("gamma: pole at non-positive integer");
  }
  if (x >= 0.5) {
    return gamma_positive(x);
  }
  // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
  const double other = gamma_positive(1.0 - x);
  if (std::isinf(other)) {
    return 0.0;
  }
  return std::numbers::pi / (sin_pi(x) * other);
}

double reciprocal_gamma(double x) {
  if (std::isnan(x)) {
    return x;
  }
  if (is_nonpositive_integer(x)) {
    return 0.0;
  }
  if (x >= 0.5) {
    if (x > 171.7) {
      return 0.0;
    }
    return 1.0 / gamma_positive(x);
  }
  return sin_pi(x) * gamma_positive(1.0 - x) / std::numbers::pi;
}

double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw InvalidArgument("log_gamma: argument must be positive");
  }
  if (x < 0.5) {
    return std::log(std::numbers::pi / (sin_pi(x) * gamma_positive(1.0 - x)));
  }
  if (x < 100.0) {
    return std::log(gamma_positive(x));
  }
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t +
         std::log(lanczos_sum(xm1));
}

}  // namespace gfdiff
