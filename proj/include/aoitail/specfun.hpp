#pragma once

namespace aoitail::specfun {

// Regularized upper incomplete gamma function Q(shape, a) = Gamma(shape, a) / Gamma(shape).
// Classic series/continued-fraction evaluation, accurate to ~1e-14 relative on
// the shapes used here (tails of integer-shape gamma sums and Poisson CDFs).
// Throws std::domain_error for shape <= 0 or a < 0.
double upper_incomplete_gamma_reg(double shape, double a);

// Regularized incomplete beta function I_z(a, b) with the standard integrand
// t^(a-1) (1-t)^(b-1).  Throws std::domain_error for z outside [0, 1] or
// non-positive a, b.
double incomplete_beta_reg(double z, double a, double b);

}  // namespace aoitail::specfun
