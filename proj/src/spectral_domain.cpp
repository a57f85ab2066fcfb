#include "gfdiff/spectral_domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "gfdiff/error.hpp"

namespace gfdiff {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDensityTolerance = 1e-8;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_index(const BoxDomain& domain, std::span<const int> n) {
  if (n.size() != domain.dim()) {
    throw InvalidArgument("multi-index dimension does not match the domain");
  }
}

// Largest per-axis Gauss-Legendre order tried for density projections.
int max_quadrature_order(std::size_t dim) {
  switch (dim) {
    case 1:
      return 4096;
    case 2:
      return 512;
    case 3:
      return 128;
    default:
      return 32;
  }
}

struct TensorGrid {
  std::vector<QuadratureRule> axes;
  std::vector<double> weighted_values;  // f(x_q) prod_i w_{q_i}, last axis fastest
};

TensorGrid sample_density(const BoxDomain& domain, const Density& density, int order) {
  TensorGrid grid;
  const std::size_t d = domain.dim();
  for (std::size_t i = 0; i < d; ++i) {
    grid.axes.push_back(gauss_legendre(order, 0.0, domain.length(i)));
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    total *= static_cast<std::size_t>(order);
  }
  grid.weighted_values.resize(total);
  std::vector<std::size_t> q(d, 0);
  Point r(d);
  for (std::size_t flat = 0; flat < total; ++flat) {
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      r[i] = grid.axes[i].nodes[q[i]];
      w *= grid.axes[i].weights[q[i]];
    }
    grid.weighted_values[flat] = w * density.f(r);
    for (std::size_t i = d; i-- > 0;) {
      if (++q[i] < static_cast<std::size_t>(order)) {
        break;
      }
      q[i] = 0;
    }
  }
  return grid;
}

// Projections of the sampled density onto every mode of `modes`.
std::vector<double> project_on_grid(const BoxDomain& domain, const SpectralCoefficients& modes,
                                    const TensorGrid& grid, int order) {
  const std::size_t d = domain.dim();
  const auto q_count = static_cast<std::size_t>(order);
  std::vector<int> max_n(d, 1);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const auto idx = modes.index(m);
    for (std::size_t i = 0; i < d; ++i) {
      max_n[i] = std::max(max_n[i], idx[i]);
    }
  }
  // sines[i][(n - 1) * Q + q] = phi^{(i)}_n(x_q)
  std::vector<std::vector<double>> sines(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double L = domain.length(i);
    const double norm = std::sqrt(2.0 / L);
    sines[i].resize(static_cast<std::size_t>(max_n[i]) * q_count);
    for (int n = 1; n <= max_n[i]; ++n) {
      for (std::size_t q = 0; q < q_count; ++q) {
        sines[i][(n - 1) * q_count + q] = norm * std::sin(kPi * n * grid.axes[i].nodes[q] / L);
      }
    }
  }
  // Contract the last axis first: partial[prefix][n_last].
  const std::size_t last = d - 1;
  const std::size_t prefix_count = grid.weighted_values.size() / q_count;
  const auto n_last = static_cast<std::size_t>(max_n[last]);
  std::vector<double> partial(prefix_count * n_last, 0.0);
  for (std::size_t p = 0; p < prefix_count; ++p) {
    const double* f = grid.weighted_values.data() + p * q_count;
    for (std::size_t n = 0; n < n_last; ++n) {
      const double* s = sines[last].data() + n * q_count;
      double acc = 0.0;
      for (std::size_t q = 0; q < q_count; ++q) {
        acc += s[q] * f[q];
      }
      partial[p * n_last + n] = acc;
    }
  }
  std::vector<double> out(modes.size(), 0.0);
  std::vector<std::size_t> q(last, 0);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const auto idx = modes.index(m);
    const std::size_t nl = static_cast<std::size_t>(idx[last] - 1);
    if (last == 0) {
      out[m] = partial[nl];
      continue;
    }
    double acc = 0.0;
    std::fill(q.begin(), q.end(), 0);
    for (std::size_t p = 0; p < prefix_count; ++p) {
      double w = partial[p * n_last + nl];
      for (std::size_t i = 0; i < last; ++i) {
        w *= sines[i][static_cast<std::size_t>(idx[i] - 1) * q_count + q[i]];
      }
      acc += w;
      for (std::size_t i = last; i-- > 0;) {
        if (++q[i] < q_count) {
          break;
        }
        q[i] = 0;
      }
    }
    out[m] = acc;
  }
  return out;
}

double density_mass(const TensorGrid& grid) {
  return std::accumulate(grid.weighted_values.begin(), grid.weighted_values.end(), 0.0);
}

}  // namespace

BoxDomain::BoxDomain(std::vector<double> lengths, double diffusion)
    : lengths_(std::move(lengths)), diffusion_(diffusion) {
  if (lengths_.empty()) {
    throw InvalidArgument("box domain needs at least one dimension");
  }
  for (double L : lengths_) {
    if (!(L > 0.0) || !std::isfinite(L)) {
      throw InvalidArgument("box edge lengths must be positive and finite");
    }
  }
  if (!(diffusion_ > 0.0) || !std::isfinite(diffusion_)) {
    throw InvalidArgument("diffusion constant must be positive and finite");
  }
}

double BoxDomain::volume() const {
  return std::accumulate(lengths_.begin(), lengths_.end(), 1.0, std::multiplies<>());
}

Point BoxDomain::center() const {
  Point c(lengths_);
  for (double& x : c) {
    x *= 0.5;
  }
  return c;
}

bool BoxDomain::contains(std::span<const double> r, bool strict) const {
  if (r.size() != dim()) {
    return false;
  }
  for (std::size_t i = 0; i < dim(); ++i) {
    const bool inside = strict ? (r[i] > 0.0 && r[i] < lengths_[i]) : (r[i] >= 0.0 && r[i] <= lengths_[i]);
    if (!inside) {
      return false;
    }
  }
  return true;
}

MultiIndex::MultiIndex(std::vector<int> n) : n_(std::move(n)) {
  if (n_.empty()) {
    throw InvalidArgument("multi-index must have at least one component");
  }
  for (int v : n_) {
    if (v < 1) {
      throw InvalidArgument("multi-index components must be >= 1");
    }
  }
}

bool MultiIndex::all_odd() const {
  return std::all_of(n_.begin(), n_.end(), [](int v) { return v % 2 == 1; });
}

Density gaussian_peak(const BoxDomain& domain, const Point& r0, double sigma) {
  if (!(sigma > 0.0)) {
    throw InvalidArgument("Gaussian width must be positive");
  }
  if (!domain.contains(r0, true)) {
    throw InvalidArgument("Gaussian centre must lie inside the box");
  }
  // Per-axis normalization over [0, L_i].
  double norm = 1.0;
  for (std::size_t i = 0; i < domain.dim(); ++i) {
    const double s = sigma * std::sqrt(2.0);
    norm *= 0.5 * sigma * std::sqrt(2.0 * kPi) *
            (std::erf((domain.length(i) - r0[i]) / s) + std::erf(r0[i] / s));
  }
  const double inv_norm = 1.0 / norm;
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  return Density{[r0, inv_norm, inv_two_var](std::span<const double> r) {
    double q = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double dx = r[i] - r0[i];
      q += dx * dx;
    }
    return inv_norm * std::exp(-q * inv_two_var);
  }};
}

void validate_initial_condition(const BoxDomain& domain, const InitialCondition& ic) {
  std::visit(overloaded{
                 [&](const DeltaPeak& p) {
                   if (!domain.contains(p.r0, true)) {
                     throw InvalidArgument("delta peak position must lie strictly inside the box");
                   }
                 },
                 [&](const Density& density) {
                   if (!density.f) {
                     throw InvalidArgument("density initial condition has no function");
                   }
                   double previous = std::numeric_limits<double>::quiet_NaN();
                   const int cap = max_quadrature_order(domain.dim());
                   for (int order = 16; order <= cap; order *= 2) {
                     const double mass = density_mass(sample_density(domain, density, order));
                     if (std::fabs(mass - previous) < 1e-9) {
                       if (std::fabs(mass - 1.0) > 1e-6) {
                         throw InvalidArgument("density must integrate to 1 over the box (got " +
                                               std::to_string(mass) + ")");
                       }
                       return;
                     }
                     previous = mass;
                   }
                   throw NumericError("density normalization quadrature did not converge");
                 },
             },
             ic);
}

double eigenvalue(const BoxDomain& domain, const MultiIndex& n) {
  check_index(domain, n.values());
  double lambda = 0.0;
  for (std::size_t i = 0; i < domain.dim(); ++i) {
    const double k = kPi * n[i] / domain.length(i);
    lambda += k * k;
  }
  return lambda;
}

double eigenfunction(const BoxDomain& domain, const MultiIndex& n, std::span<const double> r) {
  check_index(domain, n.values());
  if (!domain.contains(r)) {
    throw InvalidArgument("eigenfunction evaluated outside the box");
  }
  double value = 1.0;
  for (std::size_t i = 0; i < domain.dim(); ++i) {
    const double L = domain.length(i);
    if (r[i] == 0.0 || r[i] == L) {
      return 0.0;
    }
    value *= std::sqrt(2.0 / L) * std::sin(kPi * n[i] * r[i] / L);
  }
  return value;
}

double boundary_integral(const BoxDomain& domain, const MultiIndex& n) {
  check_index(domain, n.values());
  double value = 1.0;
  for (std::size_t i = 0; i < domain.dim(); ++i) {
    if (n[i] % 2 == 0) {
      return 0.0;
    }
    value *= 2.0 * std::sqrt(2.0 * domain.length(i)) / (kPi * n[i]);
  }
  return value;
}

double project_initial(const BoxDomain& domain, const InitialCondition& ic, const MultiIndex& n) {
  check_index(domain, n.values());
  if (const auto* peak = std::get_if<DeltaPeak>(&ic)) {
    if (!domain.contains(peak->r0, true)) {
      throw InvalidArgument("delta peak position must lie strictly inside the box");
    }
    return eigenfunction(domain, n, peak->r0);
  }
  std::vector<int> idx(n.values().begin(), n.values().end());
  SpectralCoefficients single(domain.dim(), idx, {eigenvalue(domain, n)}, {boundary_integral(domain, n)},
                              {});
  return project_modes(domain, ic, std::move(single)).projections().front();
}

SpectralCoefficients::SpectralCoefficients(std::size_t dim, std::vector<int> indices,
                                           std::vector<double> lambdas,
                                           std::vector<double> phi_integrals,
                                           std::vector<double> projections)
    : dim_(dim),
      indices_(std::move(indices)),
      lambdas_(std::move(lambdas)),
      phi_integrals_(std::move(phi_integrals)),
      projections_(std::move(projections)) {
  if (indices_.size() != dim_ * lambdas_.size() || phi_integrals_.size() != lambdas_.size() ||
      (!projections_.empty() && projections_.size() != lambdas_.size())) {
    throw InvalidArgument("spectral coefficient arrays have inconsistent sizes");
  }
}

MultiIndex SpectralCoefficients::multi_index(std::size_t mode) const {
  const auto idx = index(mode);
  return MultiIndex(std::vector<int>(idx.begin(), idx.end()));
}

SpectralCoefficients enumerate_modes(const BoxDomain& domain, double lambda_max,
                                     std::size_t max_modes) {
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
    throw InvalidArgument("eigenvalue cutoff must be positive and finite");
  }
  const std::size_t d = domain.dim();
  std::vector<double> axis_unit(d);
  double floor_sum = 0.0;  // lambda of (1, ..., 1)
  for (std::size_t i = 0; i < d; ++i) {
    axis_unit[i] = kPi * kPi / (domain.length(i) * domain.length(i));
    floor_sum += axis_unit[i];
  }

  struct Entry {
    double lambda;
    std::size_t order;  // lexicographic generation order, for stable ties
  };
  std::vector<int> flat;
  std::vector<Entry> entries;
  std::vector<int> n(d, 1);
  // Depth-first over axes; rest[i] is the minimum eigenvalue still owed by axes > i.
  std::vector<double> rest(d + 1, 0.0);
  for (std::size_t i = d; i-- > 0;) {
    rest[i] = rest[i + 1] + axis_unit[i];
  }
  std::function<void(std::size_t, double)> recurse = [&](std::size_t axis, double partial) {
    for (int k = 1;; ++k) {
      const double here = partial + axis_unit[axis] * k * k;
      if (here + rest[axis + 1] > lambda_max) {
        break;
      }
      n[axis] = k;
      if (axis + 1 == d) {
        if (entries.size() >= max_modes) {
          throw NumericError("mode count exceeds the policy cap of " + std::to_string(max_modes) +
                             " (raise t_min or lower the cutoff)");
        }
        entries.push_back({here, entries.size()});
        flat.insert(flat.end(), n.begin(), n.end());
      } else {
        recurse(axis + 1, here);
      }
    }
  };
  if (floor_sum <= lambda_max) {
    recurse(0, 0.0);
  }

  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return entries[a].lambda < entries[b].lambda;
  });

  std::vector<int> indices;
  indices.reserve(flat.size());
  std::vector<double> lambdas;
  std::vector<double> phis;
  lambdas.reserve(order.size());
  phis.reserve(order.size());
  for (std::size_t pos : order) {
    const int* idx = flat.data() + pos * d;
    double lambda = 0.0;
    double phi = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      lambda += axis_unit[i] * idx[i] * idx[i];
      phi = (idx[i] % 2 == 0) ? 0.0 : phi * 2.0 * std::sqrt(2.0 * domain.length(i)) / (kPi * idx[i]);
      indices.push_back(idx[i]);
    }
    lambdas.push_back(lambda);
    phis.push_back(phi);
  }
  return SpectralCoefficients(d, std::move(indices), std::move(lambdas), std::move(phis), {});
}

double min_modes_cutoff(const BoxDomain& domain, int per_axis) {
  double base = 0.0;
  for (double L : domain.lengths()) {
    base += kPi * kPi / (L * L);
  }
  double cutoff = base;
  for (double L : domain.lengths()) {
    const double unit = kPi * kPi / (L * L);
    cutoff = std::max(cutoff, base + unit * (static_cast<double>(per_axis) * per_axis - 1.0));
  }
  // Slack so the boundary mode survives the differently-rounded sum in enumerate_modes.
  return cutoff * (1.0 + 1e-12);
}

SpectralCoefficients project_modes(const BoxDomain& domain, const InitialCondition& ic,
                                   SpectralCoefficients modes) {
  if (modes.dim() != domain.dim()) {
    throw InvalidArgument("modes and domain dimension differ");
  }
  std::vector<int> indices;
  indices.reserve(modes.size() * modes.dim());
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const auto idx = modes.index(m);
    indices.insert(indices.end(), idx.begin(), idx.end());
  }
  std::vector<double> projections(modes.size(), 0.0);

  std::visit(overloaded{
                 [&](const DeltaPeak& peak) {
                   if (!domain.contains(peak.r0, true)) {
                     throw InvalidArgument("delta peak position must lie strictly inside the box");
                   }
                   for (std::size_t m = 0; m < modes.size(); ++m) {
                     const auto idx = modes.index(m);
                     double value = 1.0;
                     for (std::size_t i = 0; i < domain.dim(); ++i) {
                       const double L = domain.length(i);
                       value *= std::sqrt(2.0 / L) * std::sin(kPi * idx[i] * peak.r0[i] / L);
                     }
                     projections[m] = value;
                   }
                 },
                 [&](const Density& density) {
                   if (!density.f) {
                     throw InvalidArgument("density initial condition has no function");
                   }
                   if (modes.size() == 0) {
                     return;
                   }
                   const int cap = max_quadrature_order(domain.dim());
                   std::vector<double> previous;
                   for (int order = 32; order <= cap; order *= 2) {
                     auto current = project_on_grid(domain, modes, sample_density(domain, density, order), order);
                     if (!previous.empty()) {
                       double diff = 0.0;
                       for (std::size_t m = 0; m < current.size(); ++m) {
                         diff = std::max(diff, std::fabs(current[m] - previous[m]));
                       }
                       if (diff < kDensityTolerance) {
                         projections = std::move(current);
                         return;
                       }
                     }
                     previous = std::move(current);
                   }
                   throw NumericError("density projection quadrature did not converge to 1e-8");
                 },
             },
             ic);

  std::vector<double> lambdas = modes.lambdas();
  std::vector<double> phis = modes.phi_integrals();
  return SpectralCoefficients(domain.dim(), std::move(indices), std::move(lambdas), std::move(phis),
                              std::move(projections));
}

QuadratureRule gauss_legendre(int order, double a, double b) {
  if (order < 1) {
    throw InvalidArgument("Gauss-Legendre order must be positive");
  }
  QuadratureRule rule;
  const auto n = static_cast<std::size_t>(order);
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_n(x), p0 = P_{n-1}(x)
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) {
        break;
      }
    }
    if (n == 1) {
      dp = 1.0;
      x = 0.0;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

}  // namespace gfdiff
