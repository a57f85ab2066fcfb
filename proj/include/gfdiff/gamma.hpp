#pragma once

namespace gfdiff {

/// sin(pi * x) with exact zeros at the integers.
double sin_pi(double x);

/// Gamma function on the real line via the Lanczos approximation (g = 7, nine
/// coefficients) and the reflection formula for x < 1/2. Relative accuracy is
/// about 1e-15 away from the poles. Throws InvalidArgument at the poles
/// (non-positive integers); returns +inf on overflow.
double gamma(double x);

/// 1/Gamma(x); exactly zero at the non-positive integers and for x past the
/// overflow threshold of Gamma.
double reciprocal_gamma(double x);

/// log(Gamma(x)) for x > 0.
double log_gamma(double x);

}  // namespace gfdiff
