#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>

namespace gfdiff {

// Clock families g(t) defining the Caputo-type derivative with respect to g.

struct IdentityClock {};

/// g(t) = t^exponent (Erdelyi-Kober case).
struct PowerLawClock {
  double exponent = 1.0;
};

/// g(t) = (1 - exp(-rate t)) / rate, bounded by 1/rate.
struct DodsonClock {
  double rate = 1.0;
};

/// User-supplied clock. The derivative is mandatory; `inverse` is optional and
/// falls back to bracketing root finding.
struct CustomClock {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::optional<double> limit;
  std::function<double(double)> inverse;
  std::string label = "custom";
};

using ClockFamily = std::variant<IdentityClock, PowerLawClock, DodsonClock, CustomClock>;

/// Immutable clock function with g(0) = 0 and g' > 0 on t > 0.
class Clock {
public:
  /// Validates the family parameters (and samples custom clocks on a
  /// log-spaced grid); throws InvalidArgument on violation.
  explicit Clock(ClockFamily family);

  [[nodiscard]] double operator()(double t) const { return value(t); }
  [[nodiscard]] double value(double t) const;
  [[nodiscard]] double derivative(double t) const;
  /// g^{-1}(s); s must lie in [0, limit) for bounded clocks.
  [[nodiscard]] double inverse(double s) const;

  /// Finite g_inf for bounded clocks, nullopt when g grows without bound.
  [[nodiscard]] std::optional<double> limit() const;
  [[nodiscard]] bool bounded() const { return limit().has_value(); }
  [[nodiscard]] std::string label() const;
  [[nodiscard]] const ClockFamily& family() const { return family_; }

private:
  ClockFamily family_;
};

Clock make_clock(ClockFamily family);

enum class MfptRegime { Finite, Infinite, NeverAbsorbed };

std::string to_string(MfptRegime regime);

/// Decides whether the mean first-passage time is finite.
///
/// Bounded clocks never absorb with probability one. For alpha < 1 the tail
/// phi ~ g' g^{-(alpha+1)} gives a finite mean iff t^2 g' g^{-alpha-1} -> 0;
/// closed-form for the built-in families, sampled on t = 10^k (k = 0..8) for
/// custom clocks. For alpha = 1 the tail is exponential in g, so any clock
/// outgrowing log(t) gives a finite mean.
///
/// Throws InconclusiveLimit when the sampled limit neither settles below 1e-6
/// nor stays bounded away from zero.
MfptRegime classify_mfpt(const Clock& clock, double alpha);

/// Power-law exponent delta of phi(t) ~ t^{-delta}. nullopt when alpha = 1
/// (exponential tail) or when a custom clock shows no stable log-log slope.
/// Throws InvalidArgument for bounded clocks.
std::optional<double> tail_exponent(const Clock& clock, double alpha);

}  // namespace gfdiff
