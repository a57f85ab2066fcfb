#include "gfdiff/clocks.hpp"

#include <boost/math/tools/roots.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "gfdiff/error.hpp"

namespace gfdiff {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("fractional order alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
}

void check_time(double t) {
  if (!(t >= 0.0) || std::isnan(t)) {
    throw InvalidArgument("clock evaluated at negative or NaN time");
  }
}

void validate_custom(const CustomClock& c) {
  if (!c.value || !c.derivative) {
    throw InvalidArgument("custom clock needs both value and derivative functions");
  }
  if (c.value(0.0) != 0.0) {
    throw InvalidArgument("custom clock must satisfy g(0) = 0 exactly");
  }
  if (c.limit && !(*c.limit > 0.0 && std::isfinite(*c.limit))) {
    throw InvalidArgument("custom clock limit must be positive and finite");
  }
  double previous = 0.0;
  // Four samples per decade over [1e-6, 1e8].
  for (int i = -24; i <= 32; ++i) {
    const double t = std::pow(10.0, 0.25 * i);
    const double g = c.value(t);
    const double dg = c.derivative(t);
    if (!(dg > 0.0)) {
      throw InvalidArgument("custom clock derivative must be positive for t > 0 (fails at t = " +
                            std::to_string(t) + ")");
    }
    if (!(g >= previous) || !std::isfinite(g)) {
      throw InvalidArgument("custom clock must be finite and nondecreasing");
    }
    if (c.limit && g > *c.limit * (1.0 + 1e-12)) {
      throw InvalidArgument("custom clock exceeds its declared limit");
    }
    previous = g;
  }
}

}  // namespace

Clock::Clock(ClockFamily family) : family_(std::move(family)) {
  std::visit(overloaded{
                 [](const IdentityClock&) {},
                 [](const PowerLawClock& c) {
                   if (!(c.exponent > 0.0) || !std::isfinite(c.exponent)) {
                     throw InvalidArgument("power-law clock exponent must be positive");
                   }
                 },
                 [](const DodsonClock& c) {
                   if (!(c.rate > 0.0) || !std::isfinite(c.rate)) {
                     throw InvalidArgument("Dodson clock rate must be positive");
                   }
                 },
                 [](const CustomClock& c) { validate_custom(c); },
             },
             family_);
}

double Clock::value(double t) const {
  check_time(t);
  return std::visit(overloaded{
                        [&](const IdentityClock&) { return t; },
                        [&](const PowerLawClock& c) { return std::pow(t, c.exponent); },
                        [&](const DodsonClock& c) { return -std::expm1(-c.rate * t) / c.rate; },
                        [&](const CustomClock& c) { return c.value(t); },
                    },
                    family_);
}

double Clock::derivative(double t) const {
  check_time(t);
  return std::visit(overloaded{
                        [](const IdentityClock&) { return 1.0; },
                        [&](const PowerLawClock& c) {
                          return c.exponent * std::pow(t, c.exponent - 1.0);
                        },
                        [&](const DodsonClock& c) { return std::exp(-c.rate * t); },
                        [&](const CustomClock& c) { return c.derivative(t); },
                    },
                    family_);
}

double Clock::inverse(double s) const {
  if (!(s >= 0.0)) {
    throw InvalidArgument("clock inverse needs s >= 0");
  }
  if (const auto g_inf = limit(); g_inf && s >= *g_inf) {
    throw InvalidArgument("clock inverse: s is at or beyond the clock's limit");
  }
  return std::visit(
      overloaded{
          [&](const IdentityClock&) { return s; },
          [&](const PowerLawClock& c) { return std::pow(s, 1.0 / c.exponent); },
          [&](const DodsonClock& c) { return -std::log1p(-c.rate * s) / c.rate; },
          [&](const CustomClock& c) {
            if (c.inverse) {
              return c.inverse(s);
            }
            if (s == 0.0) {
              return 0.0;
            }
            double hi = 1.0;
            while (c.value(hi) < s) {
              hi *= 2.0;
              if (hi > 1e300) {
                throw NumericError("clock inverse: value not reached");
              }
            }
            auto f = [&](double t) { return c.value(t) - s; };
            std::uintmax_t iterations = 200;
            const auto [lo_t, hi_t] = boost::math::tools::toms748_solve(
                f, 0.0, hi, boost::math::tools::eps_tolerance<double>(52), iterations);
            return 0.5 * (lo_t + hi_t);
          },
      },
      family_);
}

std::optional<double> Clock::limit() const {
  return std::visit(overloaded{
                        [](const IdentityClock&) -> std::optional<double> { return std::nullopt; },
                        [](const PowerLawClock&) -> std::optional<double> { return std::nullopt; },
                        [](const DodsonClock& c) -> std::optional<double> { return 1.0 / c.rate; },
                        [](const CustomClock& c) { return c.limit; },
                    },
                    family_);
}

std::string Clock::label() const {
  return std::visit(overloaded{
                        [](const IdentityClock&) { return std::string("identity"); },
                        [](const PowerLawClock&) { return std::string("power_law"); },
                        [](const DodsonClock&) { return std::string("dodson"); },
                        [](const CustomClock& c) { return c.label; },
                    },
                    family_);
}

Clock make_clock(ClockFamily family) { return Clock(std::move(family)); }

std::string to_string(MfptRegime regime) {
  switch (regime) {
    case MfptRegime::Finite:
      return "finite_mfpt";
    case MfptRegime::Infinite:
      return "infinite_mfpt";
    case MfptRegime::NeverAbsorbed:
      return "never_absorbed";
  }
  return "unknown";
}

MfptRegime classify_mfpt(const Clock& clock, double alpha) {
  check_alpha(alpha);
  if (clock.bounded()) {
    return MfptRegime::NeverAbsorbed;
  }
  const auto& family = clock.family();
  if (std::holds_alternative<IdentityClock>(family)) {
    return alpha == 1.0 ? MfptRegime::Finite : MfptRegime::Infinite;
  }
  if (const auto* p = std::get_if<PowerLawClock>(&family)) {
    if (alpha == 1.0) {
      return MfptRegime::Finite;
    }
    return alpha * p->exponent > 1.0 ? MfptRegime::Finite : MfptRegime::Infinite;
  }

  // Custom unbounded clock: sample on t = 10^k, k = 0..8.
  std::array<double, 9> h{};
  for (int k = 0; k <= 8; ++k) {
    const double t = std::pow(10.0, k);
    if (alpha == 1.0) {
      h[k] = k == 0 ? 0.0 : clock.value(t) / std::log(t);
    } else {
      h[k] = t * t * clock.derivative(t) * std::pow(clock.value(t), -alpha - 1.0);
    }
  }
  if (alpha == 1.0) {
    // g / log t must keep growing.
    if (h[6] < h[7] && h[7] < h[8] && h[8] >= 1.5 * h[6]) {
      return MfptRegime::Finite;
    }
    throw InconclusiveLimit("classify_mfpt: cannot decide whether g(t) outgrows log(t)");
  }
  if (h[6] > h[7] && h[7] > h[8] && h[6] < 1e-6) {
    return MfptRegime::Finite;
  }
  if (h[8] >= 1e-6 && h[7] >= (1.0 - 1e-9) * h[6] && h[8] >= (1.0 - 1e-9) * h[7]) {
    return MfptRegime::Infinite;
  }
  throw InconclusiveLimit("classify_mfpt: t^2 g' g^(-alpha-1) neither vanishes nor stays bounded "
                          "away from zero on t = 1..1e8");
}

std::optional<double> tail_exponent(const Clock& clock, double alpha) {
  check_alpha(alpha);
  if (clock.bounded()) {
    throw InvalidArgument("tail_exponent: bounded clocks have no power-law tail");
  }
  if (alpha == 1.0) {
    return std::nullopt;
  }
  const auto& family = clock.family();
  if (std::holds_alternative<IdentityClock>(family)) {
    return 1.0 + alpha;
  }
  if (const auto* p = std::get_if<PowerLawClock>(&family)) {
    return 1.0 + alpha * p->exponent;
  }
  // Decade-wise log-log slopes of g' g^{-(alpha+1)} over [1e2, 1e6].
  auto log_shape = [&](double t) {
    return std::log(clock.derivative(t)) - (alpha + 1.0) * std::log(clock.value(t));
  };
  std::array<double, 4> slopes{};
  for (int k = 2; k <= 5; ++k) {
    const double t0 = std::pow(10.0, k);
    slopes[k - 2] = (log_shape(10.0 * t0) - log_shape(t0)) / std::log(10.0);
  }
  const double last = slopes[3];
  for (int i = 1; i < 3; ++i) {
    if (std::fabs(slopes[i] - last) > 1e-3 * std::max(1.0, std::fabs(last))) {
      return std::nullopt;
    }
  }
  return -last;
}

}  // namespace gfdiff
