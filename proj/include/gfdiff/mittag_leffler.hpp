#pragma once

#include <vector>

namespace gfdiff {

/// Accuracy controls for Mittag-Leffler evaluation on the real axis.
struct MLAccuracy {
  double rel_tol = 1e-10;
  int max_terms = 10000;
  /// Negative arguments with |x| <= series_radius use the power series; larger
  /// magnitudes lose too many digits to cancellation and use the integral.
  double series_radius = 1.0;
  /// x <= -asymptotic_threshold switches to the asymptotic expansion when its
  /// remainder is provably below rel_tol.
  double asymptotic_threshold = 50.0;

  /// Throws InvalidArgument unless rel_tol in (0, 1e-4] and max_terms >= 50.
  void validate() const;
};

enum class MLMethod { Automatic, Series, Integral, Asymptotic };

/// E_{alpha,beta}(x) for real x, 0 < alpha <= 1, beta > 0.
///
/// Precomputes the series and asymptotic coefficients once so that repeated
/// evaluation at many arguments (one per spectral mode) stays cheap. Instances
/// are immutable and safe to share between threads.
class MittagLeffler {
public:
  MittagLeffler(double alpha, double beta, MLAccuracy accuracy = {});

  [[nodiscard]] double operator()(double x) const { return evaluate(x); }
  [[nodiscard]] double evaluate(double x, MLMethod method = MLMethod::Automatic) const;

  /// Truncated algebraic expansion -sum_{k=1}^{terms} x^{-k} / Gamma(beta - alpha k),
  /// counting only the non-vanishing terms. Requires x < 0.
  [[nodiscard]] double asymptotic_terms(double x, int terms) const;

  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] const MLAccuracy& accuracy() const { return accuracy_; }

private:
  [[nodiscard]] double series(double x) const;
  [[nodiscard]] double integral(double x) const;
  [[nodiscard]] bool try_asymptotic(double x, double& value) const;
  [[nodiscard]] double alpha_one(double x) const;

  double alpha_;
  double beta_;
  MLAccuracy accuracy_;
  std::vector<double> series_coeff_;      // 1/Gamma(alpha k + beta)
  std::vector<double> asymptotic_coeff_;  // 1/Gamma(beta - alpha k), index k
};

/// One-parameter function E_alpha(x).
double ml_one(double alpha, double x, const MLAccuracy& accuracy = {});

/// Two-parameter function E_{alpha,beta}(x).
double ml_two(double alpha, double beta, double x, const MLAccuracy& accuracy = {});

/// Truncated asymptotic series of E_{alpha,alpha}(x) for x strongly negative.
/// `order` counts non-vanishing terms; order 1 is the leading -x^{-2}/Gamma(-alpha).
/// Throws InvalidArgument if |x| is below accuracy.asymptotic_threshold.
double ml_two_asymptotic(double alpha, double x, int order, const MLAccuracy& accuracy = {});

}  // namespace gfdiff
