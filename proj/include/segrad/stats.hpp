#pragma once

namespace segrad {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// 1 - I_x(a, b), computed without cancellation.
double incomplete_beta_complement(double a, double b, double x);

/// CDF of the F distribution with (d1, d2) degrees of freedom.
double f_cdf(double f, double d1, double d2);

/// Inverse CDF of the F distribution. p in (0, 1), d1, d2 > 0 (non-integer allowed).
/// Throws Error{Domain} otherwise.
double f_quantile(double p, double d1, double d2);

}  // namespace segrad
