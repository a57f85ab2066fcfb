#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gfdiff/error.hpp"
#include "gfdiff/solution.hpp"
#include "gfdiff/spectral_domain.hpp"

using namespace gfdiff;

namespace {

constexpr double kPi = std::numbers::pi;

// Tensor Gauss-Legendre integral of f over the box.
template <class F>
double integrate_box(const BoxDomain& domain, int order, F f) {
  std::vector<QuadratureRule> rules;
  for (std::size_t i = 0; i < domain.dim(); ++i) {
    rules.push_back(gauss_legendre(order, 0.0, domain.length(i)));
  }
  const std::size_t d = domain.dim();
  std::vector<std::size_t> k(d, 0);
  Point r(d);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      r[i] = rules[i].nodes[k[i]];
      w *= rules[i].weights[k[i]];
    }
    total += w * f(r);
    std::size_t i = 0;
    while (i < d && ++k[i] == static_cast<std::size_t>(order)) {
      k[i++] = 0;
    }
    if (i == d) {
      return total;
    }
  }
}

}  // namespace

TEST_CASE("eigenvalues") {
  CHECK(eigenvalue(BoxDomain({1.0}, 1.0), {1}) == doctest::Approx(kPi * kPi));
  CHECK(eigenvalue(BoxDomain({1.0, 1.0}, 1.0), {1, 1}) == doctest::Approx(2.0 * kPi * kPi));
  CHECK(eigenvalue(BoxDomain({2.0, 1.0}, 1.0), {3, 1}) == doctest::Approx(3.25 * kPi * kPi));
}

TEST_CASE("eigenfunctions") {
  const BoxDomain unit({1.0}, 1.0);
  const std::vector<double> half{0.5};
  CHECK(eigenfunction(unit, {1}, half) == doctest::Approx(std::sqrt(2.0)));
  const BoxDomain square({1.0, 1.0}, 1.0);
  CHECK(eigenfunction(square, {1, 2}, std::vector<double>{0.5, 0.25}) == doctest::Approx(2.0));
  for (int n = 1; n < 6; ++n) {
    CHECK(eigenfunction(square, {n, 2}, std::vector<double>{0.0, 0.3}) == 0.0);
    CHECK(eigenfunction(square, {n, 3}, std::vector<double>{0.3, 1.0}) == 0.0);
  }
  CHECK_THROWS_AS((void)eigenfunction(square, {1, 1}, std::vector<double>{1.5, 0.5}), InvalidArgument);
}

TEST_CASE("boundary integrals") {
  const BoxDomain unit({1.0}, 1.0);
  CHECK(boundary_integral(unit, {1}) == doctest::Approx(2.0 * std::sqrt(2.0) / kPi));
  CHECK(boundary_integral(unit, {2}) == 0.0);
  CHECK(boundary_integral(BoxDomain({1.0, 1.0}, 1.0), {1, 3}) == doctest::Approx(8.0 / (3.0 * kPi * kPi)));
}

TEST_CASE("projections of the initial condition") {
  const BoxDomain unit({1.0}, 1.0);
  const InitialCondition center = DeltaPeak{{0.5}};
  CHECK(project_initial(unit, center, {1}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::fabs(project_initial(unit, center, {2})) < 1e-15);
  const InitialCondition uniform = Density{[](std::span<const double>) { return 1.0; }};
  CHECK(project_initial(unit, uniform, {1}) == doctest::Approx(2.0 * std::sqrt(2.0) / kPi).epsilon(1e-10));
  CHECK_THROWS_AS((void)project_initial(unit, DeltaPeak{{1.0}}, {1}), InvalidArgument);
  const InitialCondition unnormalized = Density{[](std::span<const double>) { return 2.0; }};
  CHECK_THROWS_AS(validate_initial_condition(unit, unnormalized), InvalidArgument);
}

TEST_CASE("mode enumeration") {
  const BoxDomain unit({1.0}, 1.0);
  const auto one = enumerate_modes(unit, 50.0, 1000);
  REQUIRE(one.size() == 2);
  CHECK(one.index(0)[0] == 1);
  CHECK(one.index(1)[0] == 2);

  const BoxDomain square({1.0, 1.0}, 1.0);
  const auto single = enumerate_modes(square, 2.0 * kPi * kPi * (1.0 + 1e-12), 1000);
  REQUIRE(single.size() == 1);

  const auto three = enumerate_modes(square, 6.0 * kPi * kPi, 1000);
  REQUIRE(three.size() == 3);
  CHECK(three.multi_index(0).values()[0] == 1);
  CHECK(three.multi_index(1).values()[0] == 1);  // (1,2) before (2,1)
  CHECK(three.multi_index(1).values()[1] == 2);
  CHECK(three.multi_index(2).values()[0] == 2);

  // Brute force over n_i <= 10 on a rectangle.
  const BoxDomain rect({1.0, 0.7}, 1.0);
  const double cut = 40.0 * kPi * kPi;
  std::size_t expected = 0;
  for (int a = 1; a <= 10; ++a) {
    for (int b = 1; b <= 10; ++b) {
      expected += eigenvalue(rect, {a, b}) <= cut ? 1 : 0;
    }
  }
  const auto modes = enumerate_modes(rect, cut, 1000);
  CHECK(modes.size() == expected);
  CHECK(std::is_sorted(modes.lambdas().begin(), modes.lambdas().end()));

  CHECK_THROWS_AS((void)enumerate_modes(square, 1e5, 10), NumericError);
  CHECK_THROWS_AS((void)enumerate_modes(square, -1.0, 10), InvalidArgument);
}

TEST_CASE("policy enumeration keeps a floor of modes per axis") {
  const BoxDomain unit({1.0}, 1.0);
  SeriesPolicy policy;
  policy.lambda_max = 50.0;
  const auto modes = enumerate_modes(unit, policy);
  CHECK(modes.size() == 3);
  const BoxDomain rect({1.0, 3.0}, 1.0);
  const auto rect_modes = enumerate_modes(rect, policy);
  for (std::size_t axis = 0; axis < 2; ++axis) {
    int highest = 0;
    for (std::size_t m = 0; m < rect_modes.size(); ++m) {
      highest = std::max(highest, rect_modes.index(m)[axis]);
    }
    CHECK(highest >= 3);
  }
}

TEST_CASE("eigenvalues grow along every index and even modes have no boundary integral") {
  const BoxDomain box({1.0, 2.0, 0.5}, 1.0);
  const auto modes = enumerate_modes(box, 400.0, 100000);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const auto n = modes.multi_index(m);
    CHECK(modes.lambdas()[m] > 0.0);
    if (!n.all_odd()) {
      CHECK(modes.phi_integrals()[m] == 0.0);
    }
    for (std::size_t i = 0; i < 3; ++i) {
      auto bumped = std::vector<int>(n.values().begin(), n.values().end());
      ++bumped[i];
      CHECK(eigenvalue(box, MultiIndex(bumped)) > modes.lambdas()[m]);
    }
  }
}

TEST_CASE("orthonormality up to index 4 in 1, 2 and 3 dimensions") {
  for (std::size_t d = 1; d <= 3; ++d) {
    std::vector<double> lengths{1.0, 0.8, 1.3};
    lengths.resize(d);
    const BoxDomain box(lengths, 1.0);
    std::vector<std::vector<int>> indices;
    std::vector<int> n(d, 1);
    while (true) {
      indices.push_back(n);
      std::size_t i = 0;
      while (i < d && ++n[i] > 4) {
        n[i++] = 1;
      }
      if (i == d) {
        break;
      }
    }
    // Only check pairs differing in at most one axis in 3D to keep the run short.
    for (std::size_t a = 0; a < indices.size(); ++a) {
      for (std::size_t b = a; b < indices.size(); ++b) {
        int differ = 0;
        for (std::size_t i = 0; i < d; ++i) {
          differ += indices[a][i] != indices[b][i];
        }
        if (d == 3 && differ > 1) {
          continue;
        }
        const MultiIndex na(indices[a]);
        const MultiIndex nb(indices[b]);
        const double overlap = integrate_box(box, 24, [&](const Point& r) {
          return eigenfunction(box, na, r) * eigenfunction(box, nb, r);
        });
        CHECK(std::fabs(overlap - (a == b ? 1.0 : 0.0)) < 1e-8);
      }
    }
  }
}

TEST_CASE("closed-form boundary integral matches quadrature") {
  const BoxDomain box({1.0, 0.6}, 1.0);
  for (int a = 1; a <= 5; ++a) {
    for (int b = 1; b <= 5; ++b) {
      const MultiIndex n{a, b};
      const double numeric = integrate_box(box, 16, [&](const Point& r) { return eigenfunction(box, n, r); });
      CHECK(std::fabs(numeric - boundary_integral(box, n)) < 1e-8);
    }
  }
}

TEST_CASE("centre start: even modes vanish and odd modes alternate") {
  const BoxDomain box({1.0, 2.0}, 1.0);
  const InitialCondition ic = DeltaPeak{box.center()};
  for (int a = 1; a <= 7; ++a) {
    for (int b = 1; b <= 7; ++b) {
      const double u = project_initial(box, ic, {a, b});
      if (a % 2 == 0 || b % 2 == 0) {
        CHECK(std::fabs(u) < 1e-14);
      } else {
        const double expected = std::sqrt(2.0 / 1.0) * std::sqrt(2.0 / 2.0) *
                                ((a - 1) / 2 % 2 ? -1.0 : 1.0) * ((b - 1) / 2 % 2 ? -1.0 : 1.0);
        CHECK(u == doctest::Approx(expected).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("completeness: Abel-summed survival at t = 0 is one") {
  for (std::size_t d = 1; d <= 2; ++d) {
    const BoxDomain box(std::vector<double>(d, 1.0), 1.0);
    Point r0(d, 0.5);
    r0[0] = 0.3;
    const double eps = 1e-4;
    auto modes = project_modes(box, DeltaPeak{r0}, enumerate_modes(box, 50.0 / eps, 1'000'000));
    double total = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      total += modes.projections()[m] * modes.phi_integrals()[m] * std::exp(-eps * modes.lambdas()[m]);
    }
    CHECK(std::fabs(total - 1.0) < 1e-3);
  }
}

TEST_CASE("Gaussian mollifier is normalized on the box and projects by quadrature") {
  const BoxDomain box({1.0, 1.0}, 1.0);
  const Density g = gaussian_peak(box, {0.5, 0.4}, 0.1);
  CHECK_NOTHROW(validate_initial_condition(box, g));
  const double mass = integrate_box(box, 64, [&](const Point& r) { return g.f(r); });
  CHECK(std::fabs(mass - 1.0) < 1e-10);
  const MultiIndex n{3, 1};
  const double numeric = integrate_box(box, 64, [&](const Point& r) { return g.f(r) * eigenfunction(box, n, r); });
  CHECK(std::fabs(project_initial(box, g, n) - numeric) < 1e-8);
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  const auto rule = gauss_legendre(8, -1.0, 2.0);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    s += rule.weights[i] * std::pow(rule.nodes[i], 15);
  }
  CHECK(s == doctest::Approx((std::pow(2.0, 16) - 1.0) / 16.0).epsilon(1e-13));
}
