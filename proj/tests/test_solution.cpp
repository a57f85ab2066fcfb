#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "gfdiff/error.hpp"
#include "gfdiff/solution.hpp"
#include "solution_reference_values.hpp"

using namespace gfdiff;
namespace ref = gfdiff::testing;

namespace {

constexpr double kPi = std::numbers::pi;

Scenario make_scenario(std::vector<double> lengths, ClockFamily clock, double alpha, Point r0,
                       SeriesPolicy policy = {}) {
  return Scenario{BoxDomain(std::move(lengths), 1.0), make_clock(std::move(clock)), alpha,
                  DeltaPeak{std::move(r0)}, policy};
}

double rel_err(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// integral of phi over [a, b] in log t.
double integrate_fptd(const SpectralSolution& sol, double a, double b) {
  auto f = [&](double u) {
    const double t = std::exp(u);
    return sol.fptd(t) * t;
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, std::log(a), std::log(b), 25, 1e-10);
}

}  // namespace

TEST_CASE("classical heat series on the unit interval") {
  const SpectralSolution sol(make_scenario({1.0}, IdentityClock{}, 1.0, {0.5}));
  CHECK(rel_err(sol.field(std::vector<double>{0.5}, 0.1), ref::kClassicalFieldCenter) < 1e-12);
  CHECK(rel_err(sol.survival(0.1), ref::kClassicalSurvival) < 1e-12);
  CHECK(rel_err(sol.fptd(0.1), ref::kClassicalFptd) < 1e-12);
  CHECK(sol.field(std::vector<double>{0.0}, 1.0) == 0.0);
  CHECK(sol.field(std::vector<double>{1.0}, 1.0) == 0.0);

  const auto tau = std::get<FiniteMfpt>(sol.mfpt());
  CHECK(std::fabs(tau.tau - ref::kClassicalMfpt) < 1e-6);
  CHECK(tau.error < 1e-6);

  const SpectralSolution off(make_scenario({1.0}, IdentityClock{}, 1.0, {0.3}));
  CHECK(std::fabs(std::get<FiniteMfpt>(off.mfpt()).tau - ref::kClassicalMfptOffCenter) < 1e-6);
}

TEST_CASE("field vanishes on every face") {
  SeriesPolicy policy;
  policy.t_min = 0.05;
  const SpectralSolution sol(make_scenario({1.0, 2.0}, PowerLawClock{1.5}, 0.6, {0.3, 1.1}, policy));
  const std::vector<Point> faces{{0.0, 0.7}, {1.0, 0.7}, {0.4, 0.0}, {0.4, 2.0}};
  for (double v : sol.field_at(faces, 1.0)) {
    CHECK(v == 0.0);
  }
  CHECK_THROWS_AS((void)sol.field(std::vector<double>{1.2, 0.5}, 1.0), InvalidArgument);
}

TEST_CASE("times before t_min are refused") {
  SeriesPolicy policy;
  policy.t_min = 0.01;
  const SpectralSolution sol(make_scenario({1.0}, IdentityClock{}, 0.5, {0.5}, policy));
  CHECK_THROWS_AS((void)sol.survival(0.005), InvalidArgument);
  CHECK_THROWS_AS((void)sol.fptd(0.0), InvalidArgument);
  CHECK_THROWS_AS((void)sol.field(std::vector<double>{0.5}, 1e-3), InvalidArgument);
  CHECK_NOTHROW((void)sol.survival(0.01));
  CHECK(SpectralSolution::kSurvivalAtZero == 1.0);
}

TEST_CASE("time change: any clock equals the identity clock at s = g(t)") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  std::uniform_real_distribution<double> logt(-1.0, 1.5);
  for (double alpha : {0.5, 0.8, 1.0}) {
    SeriesPolicy policy;
    policy.lambda_max = 4000.0;
    policy.t_min = 1e-4;
    const Point r0{0.45, 0.6};
    const SpectralSolution identity(make_scenario({1.0, 1.0}, IdentityClock{}, alpha, r0, policy));
    for (const ClockFamily& family : std::vector<ClockFamily>{PowerLawClock{2.0}, DodsonClock{0.7}}) {
      const SpectralSolution warped(make_scenario({1.0, 1.0}, family, alpha, r0, policy));
      for (int i = 0; i < 10; ++i) {
        const double t = std::pow(10.0, logt(rng));
        const Point r{unit(rng), unit(rng)};
        const double s = warped.scenario().clock(t);
        const double a = warped.field(r, t);
        const double b = identity.field(r, s);
        CHECK(std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)));
      }
    }
  }
}

TEST_CASE("alpha = 1/2 power-law field equals the identity-clock field at s = g(t)") {
  SeriesPolicy policy;
  policy.t_min = 0.1;
  const SpectralSolution warped(make_scenario({1.0}, PowerLawClock{2.0}, 0.5, {0.5}, policy));
  policy.t_min = 0.01;
  const SpectralSolution plain(make_scenario({1.0}, IdentityClock{}, 0.5, {0.5}, policy));
  const std::vector<Point> centre{{0.5}};
  // g(0.1) = 0.01
  CHECK(std::fabs(warped.field_at(centre, 0.1)[0] - plain.field_at(centre, 0.01)[0]) < 1e-9);
}

TEST_CASE("generic and rectangular first-passage sums agree") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> pos(0.1, 0.9);
  std::uniform_real_distribution<double> alpha(0.3, 1.0);
  std::uniform_real_distribution<double> logt(-0.5, 2.0);
  for (int i = 0; i < 20; ++i) {
    SeriesPolicy policy;
    policy.t_min = 0.1;
    policy.lambda_max = 3000.0;
    const std::size_t d = 1 + static_cast<std::size_t>(i % 3);
    std::vector<double> lengths(d);
    Point r0(d);
    for (std::size_t k = 0; k < d; ++k) {
      lengths[k] = 0.5 + pos(rng);
      r0[k] = pos(rng) * lengths[k];
    }
    const SpectralSolution sol(make_scenario(lengths, PowerLawClock{0.5 + 2.0 * pos(rng)}, alpha(rng), r0, policy));
    const double t = std::pow(10.0, logt(rng));
    CHECK(rel_err(sol.fptd_rectangular(t), sol.fptd(t)) < 1e-10);
  }
}

TEST_CASE("first-passage density is minus the derivative of the survival") {
  SeriesPolicy policy;
  policy.t_min = 0.01;
  for (double alpha : {0.5, 0.8}) {
    const SpectralSolution sol(make_scenario({1.0, 1.0}, PowerLawClock{1.5}, alpha, {0.5, 0.5}, policy));
    for (double t : {0.1, 0.5, 2.0, 10.0}) {
      const double h = 1e-4 * t;
      const double dp = (sol.survival(t + h) - sol.survival(t - h)) / (2.0 * h);
      CHECK(rel_err(-dp, sol.fptd(t)) < 1e-4);
    }
  }
}

TEST_CASE("survival is nonincreasing and tends to zero for unbounded clocks") {
  SeriesPolicy policy;
  policy.t_min = 0.01;
  for (double alpha : {0.4, 0.7, 1.0}) {
    const SpectralSolution sol(make_scenario({1.0, 1.0}, PowerLawClock{2.0}, alpha, {0.3, 0.5}, policy));
    double prev = 1.0 + 1e-6;
    for (double t = 0.01; t < 1e4; t *= 1.3) {
      const double p = sol.survival(t);
      // Before the particle feels the walls P sits at 1 up to truncation noise.
      CAPTURE(t);
      CHECK(p <= prev + 1e-6);
      CHECK(p >= 0.0);
      prev = p;
    }
    CHECK(prev < 1e-3);
  }
}

TEST_CASE("tail constant") {
  const SpectralSolution half(make_scenario({1.0}, IdentityClock{}, 0.5, {0.5}));
  CHECK(rel_err(half.fptd_tail_constant(), ref::kTailConstantHalf) < 1e-8);
  CHECK(rel_err(fptd_tail_constant(half.scenario()), ref::kTailConstantHalf) < 1e-8);

  std::mt19937 rng(9);
  std::uniform_real_distribution<double> pos(0.02, 0.98);
  SeriesPolicy policy;
  policy.t_min = 0.1;
  for (int i = 0; i < 10; ++i) {
    const SpectralSolution sol(make_scenario({1.0, 1.0}, PowerLawClock{2.0}, 0.6, {pos(rng), pos(rng)}, policy));
    CHECK(sol.fptd_tail_constant() > 0.0);
  }
  CHECK_THROWS_AS((void)SpectralSolution(make_scenario({1.0}, DodsonClock{1.0}, 0.5, {0.5})).fptd_tail_constant(),
                  InvalidArgument);
}

TEST_CASE("density approaches the tail law") {
  SeriesPolicy policy;
  policy.t_min = 0.05;
  const SpectralSolution sol(make_scenario({1.0, 1.0}, PowerLawClock{2.0}, 0.6, {0.5, 0.5}, policy));
  const double c = sol.fptd_tail_constant();
  const auto& g = sol.scenario().clock;
  for (double t : {1e2, 1e3, 1e4}) {
    const double ratio = sol.fptd(t) * std::pow(g(t), 1.6) / g.derivative(t);
    CHECK(rel_err(ratio, c) < 1e-2);
  }
  CHECK(std::fabs(std::log(sol.fptd(1e3)) - std::log(sol.fptd_asymptotic(1e3))) < 1e-3);
}

TEST_CASE("tail slope is -(1 + alpha beta)") {
  SeriesPolicy policy;
  policy.t_min = 0.05;
  for (double alpha : {0.4, 0.7}) {
    for (double beta : {1.0, 2.0}) {
      const SpectralSolution sol(make_scenario({1.0, 1.0}, PowerLawClock{beta}, alpha, {0.5, 0.5}, policy));
      const double slope = std::log(sol.fptd(1e4) / sol.fptd(1e2)) / std::log(1e2);
      CHECK(std::fabs(slope + (1.0 + alpha * beta)) < 0.02 * (1.0 + alpha * beta));
    }
  }
}

TEST_CASE("normalization for unbounded clocks") {
  SeriesPolicy policy;
  policy.t_min = 0.01;
  for (double alpha : {0.5, 0.9}) {
    const SpectralSolution sol(make_scenario({1.0}, PowerLawClock{2.0}, alpha, {0.4}, policy));
    const double t_end = 1e4;
    // Remaining mass from the tail law, int_T^inf C g' g^{-alpha-1} = C g(T)^{-alpha} / alpha.
    const double tail = sol.fptd_tail_constant() * std::pow(sol.scenario().clock(t_end), -alpha) / alpha;
    // Start where the truncated density sum is resolved.
    const double t_a = 0.1;
    const double mass = integrate_fptd(sol, t_a, t_end) + tail + (1.0 - sol.survival(t_a));
    CAPTURE(alpha);
    CAPTURE(integrate_fptd(sol, t_a, t_end));
    CHECK(std::fabs(mass - 1.0) < 1e-3);
  }
}

TEST_CASE("MFPT regimes") {
  SeriesPolicy policy;
  policy.t_min = 0.05;
  const auto inf = mfpt(make_scenario({1.0}, IdentityClock{}, 0.5, {0.5}, policy));
  REQUIRE(std::holds_alternative<InfiniteMfpt>(inf));
  CHECK(*std::get<InfiniteMfpt>(inf).tail_exponent == doctest::Approx(1.5));

  const auto undefined = mfpt(make_scenario({1.0}, DodsonClock{1.0}, 0.5, {0.5}, policy));
  REQUIRE(std::holds_alternative<UndefinedMfpt>(undefined));
  CHECK(std::get<UndefinedMfpt>(undefined).p_infinity > 0.0);

  // Finite fractional case: the tail correction is checked against a plain
  // quadrature of P pushed far enough that the remainder is negligible.
  const SpectralSolution sol(make_scenario({1.0}, PowerLawClock{3.0}, 0.8, {0.5}, policy));
  const auto tau = std::get<FiniteMfpt>(sol.mfpt());
  auto p = [&](double u) {
    const double t = std::exp(u);
    return sol.survival(t) * t;
  };
  const double far = 1e6;
  const double body = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(p, std::log(0.05), std::log(far), 30, 1e-12);
  // Beyond `far` the leading tail term A_1 / (D Gamma(1-alpha)) t^{-2.4} / 1.4 * t is below 1e-9.
  const double head = 0.5 * 0.05 * (1.0 + sol.survival(0.05));
  CHECK(std::fabs(tau.tau - (head + body)) < 1e-6 + tau.error);
}

TEST_CASE("Dodson clock: stationary field and asymptotic survival") {
  const Scenario dodson = make_scenario({1.0}, DodsonClock{1.0}, 0.5, {0.5});
  const SpectralSolution sol(dodson);
  CHECK(rel_err(sol.asymptotic_survival(), ref::kDodsonPInfinity) < 1e-7);
  CHECK(std::fabs(sol.survival(20.0) - sol.asymptotic_survival()) < 1e-4);
  CHECK(std::fabs(sol.stationary_field(std::vector<double>{0.5}) - ref::kDodsonStationaryCenter) < 5e-4);
  CHECK(std::fabs(sol.field(std::vector<double>{0.5}, 40.0) - sol.stationary_field(std::vector<double>{0.5})) < 1e-6);

  SeriesPolicy cut;
  const double n = ref::kDodsonTruncationMode;
  cut.lambda_max = kPi * kPi * (n + 0.5) * (n + 0.5);
  const SpectralSolution truncated(make_scenario({1.0}, DodsonClock{1.0}, 0.5, {0.5}, cut));
  CHECK(rel_err(truncated.stationary_field(std::vector<double>{0.5}), ref::kDodsonStationaryCenterTruncated) < 1e-10);

  // Mass balance: int_{t_min}^inf phi = P(t_min) - P_inf.
  const double t_end = 40.0;
  const double mass = integrate_fptd(sol, sol.t_min(), t_end);
  CHECK(std::fabs(mass - (sol.survival(sol.t_min()) - sol.asymptotic_survival())) < 1e-3);

  CHECK(asymptotic_survival(make_scenario({1.0}, DodsonClock{1e12}, 0.5, {0.5})) > 0.99);
  CHECK(asymptotic_survival(make_scenario({1.0}, DodsonClock{1e-3}, 0.5, {0.5})) < 0.01);
  const double frozen = stationary_field(make_scenario({1.0}, DodsonClock{1e6}, 0.5, {0.5}), std::vector<double>{0.25});
  CHECK(frozen > 0.0);

  const SpectralSolution unbounded(make_scenario({1.0}, IdentityClock{}, 0.5, {0.5}));
  CHECK_THROWS_AS((void)unbounded.stationary_field(std::vector<double>{0.5}), InvalidArgument);
  CHECK_THROWS_AS((void)unbounded.asymptotic_survival(), InvalidArgument);
}

TEST_CASE("fptd_curve carries the tail law when the clock is unbounded") {
  SeriesPolicy policy;
  policy.t_min = 0.05;
  const SpectralSolution sol(make_scenario({1.0, 1.0}, PowerLawClock{2.0}, 0.6, {0.5, 0.5}, policy));
  const std::vector<double> times{0.1, 1.0, 10.0};
  const auto curve = sol.fptd_curve(times);
  REQUIRE(curve.tail_constant.has_value());
  REQUIRE(curve.asymptotic.size() == 3);
  CHECK(curve.density[1] == sol.fptd(1.0));
  const std::vector<double> bad{1.0, 0.5};
  CHECK_THROWS_AS((void)sol.fptd_curve(bad), InvalidArgument);

  const SpectralSolution bounded(make_scenario({1.0}, DodsonClock{1.0}, 0.5, {0.5}));
  const auto flat = bounded.fptd_curve(times);
  CHECK_FALSE(flat.tail_constant.has_value());
  CHECK(flat.asymptotic.empty());
}

TEST_CASE("results are bitwise reproducible") {
  SeriesPolicy policy;
  policy.t_min = 0.05;
  const Scenario s = make_scenario({1.0, 1.0}, PowerLawClock{2.0}, 0.6, {0.5, 0.3}, policy);
  const SpectralSolution a(s);
  const SpectralSolution b(s);
  for (double t : {0.05, 0.3, 7.0}) {
    CHECK(a.fptd(t) == b.fptd(t));
    CHECK(a.survival(t) == b.survival(t));
  }
}

TEST_CASE("scenario validation and the mode cap") {
  CHECK_THROWS_AS(SpectralSolution(make_scenario({1.0}, IdentityClock{}, 1.5, {0.5})), InvalidArgument);
  CHECK_THROWS_AS(SpectralSolution(make_scenario({1.0}, IdentityClock{}, 0.5, {1.0})), InvalidArgument);
  SeriesPolicy tight;
  tight.max_modes = 1000;
  tight.t_min = 1e-4;
  CHECK_THROWS_AS(SpectralSolution(make_scenario({1.0, 1.0}, IdentityClock{}, 0.5, {0.5, 0.5}, tight)), NumericError);
  SeriesPolicy bad;
  bad.min_modes_per_axis = 2;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = {};
  bad.rel_tol = 1e-3;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("under-resolved series are reported, not clamped") {
  // A hand-picked cutoff far too small for t = t_min: the truncated sum of a
  // delta start goes visibly negative between peaks.
  SeriesPolicy policy;
  policy.lambda_max = 1.0;  // only the per-axis floor survives
  policy.t_min = 1e-6;
  const SpectralSolution sol(make_scenario({1.0}, IdentityClock{}, 1.0, {0.5}, policy));
  CHECK_THROWS_AS((void)sol.fptd(1e-6), NumericError);
}
