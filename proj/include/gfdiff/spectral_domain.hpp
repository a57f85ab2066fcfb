#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace gfdiff {

using Point = std::vector<double>;

/// Omega = [0, L_1] x ... x [0, L_d] with diffusion constant D.
class BoxDomain {
public:
  BoxDomain(std::vector<double> lengths, double diffusion);

  [[nodiscard]] std::size_t dim() const { return lengths_.size(); }
  [[nodiscard]] const std::vector<double>& lengths() const { return lengths_; }
  [[nodiscard]] double length(std::size_t axis) const { return lengths_.at(axis); }
  [[nodiscard]] double diffusion() const { return diffusion_; }
  [[nodiscard]] double volume() const;
  [[nodiscard]] Point center() const;

  /// Closed box when `strict` is false, open box otherwise.
  [[nodiscard]] bool contains(std::span<const double> r, bool strict = false) const;

private:
  std::vector<double> lengths_;
  double diffusion_;
};

/// Mode label (n_1, ..., n_d) with every n_i >= 1.
class MultiIndex {
public:
  MultiIndex(std::initializer_list<int> n) : MultiIndex(std::vector<int>(n)) {}
  explicit MultiIndex(std::vector<int> n);

  [[nodiscard]] std::size_t size() const { return n_.size(); }
  [[nodiscard]] int operator[](std::size_t i) const { return n_[i]; }
  [[nodiscard]] std::span<const int> values() const { return n_; }
  [[nodiscard]] bool all_odd() const;

private:
  std::vector<int> n_;
};

/// u_0 = delta(r - r0) with r0 strictly inside the box.
struct DeltaPeak {
  Point r0;
};

/// Normalized density u_0(r) on the box.
struct Density {
  std::function<double(std::span<const double>)> f;
};

using InitialCondition = std::variant<DeltaPeak, Density>;

/// Gaussian of width sigma centred at r0, normalized over the box (not over
/// R^d). Used as the mollified stand-in for a delta peak.
Density gaussian_peak(const BoxDomain& domain, const Point& r0, double sigma);

/// Throws InvalidArgument if r0 is not interior, or if a density does not
/// integrate to 1 within 1e-6 over the box.
void validate_initial_condition(const BoxDomain& domain, const InitialCondition& ic);

/// lambda_n = sum_i pi^2 n_i^2 / L_i^2.
double eigenvalue(const BoxDomain& domain, const MultiIndex& n);

/// phi_n(r) = prod_i sqrt(2/L_i) sin(pi n_i x_i / L_i); r must lie in the closed box.
double eigenfunction(const BoxDomain& domain, const MultiIndex& n, std::span<const double> r);

/// Phi_n = int_Omega phi_n = prod_i 2 sqrt(2 L_i) / (pi n_i), zero if any n_i is even.
double boundary_integral(const BoxDomain& domain, const MultiIndex& n);

/// u_{0,n} = int_Omega phi_n u_0. Closed form for delta peaks; tensor
/// Gauss-Legendre with order doubling (to 1e-8 absolute) for densities.
double project_initial(const BoxDomain& domain, const InitialCondition& ic, const MultiIndex& n);

/// Truncated eigen-system, sorted by ascending eigenvalue (ties in
/// lexicographic index order). Mode data are stored as parallel arrays.
class SpectralCoefficients {
public:
  SpectralCoefficients() = default;
  SpectralCoefficients(std::size_t dim, std::vector<int> indices, std::vector<double> lambdas,
                       std::vector<double> phi_integrals, std::vector<double> projections);

  [[nodiscard]] std::size_t size() const { return lambdas_.size(); }
  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::span<const int> index(std::size_t mode) const {
    return {indices_.data() + mode * dim_, dim_};
  }
  [[nodiscard]] MultiIndex multi_index(std::size_t mode) const;
  [[nodiscard]] const std::vector<double>& lambdas() const { return lambdas_; }
  [[nodiscard]] const std::vector<double>& phi_integrals() const { return phi_integrals_; }
  /// Empty until projected onto an initial condition.
  [[nodiscard]] const std::vector<double>& projections() const { return projections_; }
  [[nodiscard]] bool projected() const { return projections_.size() == lambdas_.size(); }

private:
  std::size_t dim_ = 0;
  std::vector<int> indices_;
  std::vector<double> lambdas_;
  std::vector<double> phi_integrals_;
  std::vector<double> projections_;
};

/// All modes with lambda_n <= lambda_max. Throws NumericError when more than
/// max_modes qualify.
SpectralCoefficients enumerate_modes(const BoxDomain& domain, double lambda_max,
                                     std::size_t max_modes);

/// Smallest cutoff that keeps at least `per_axis` modes along every axis.
double min_modes_cutoff(const BoxDomain& domain, int per_axis);

/// Fills u_{0,n} for every mode.
SpectralCoefficients project_modes(const BoxDomain& domain, const InitialCondition& ic,
                                   SpectralCoefficients modes);

/// Gauss-Legendre nodes and weights on [a, b].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(int order, double a, double b);

}  // namespace gfdiff
