#pragma once

namespace fatiguekit {

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and x in
/// [0, 1]. Continued-fraction evaluation (modified Lentz) with the symmetry
/// switch at x = (a + 1) / (a + b + 2); relative accuracy around 1e-14 over
/// the parameter ranges used here.
double incomplete_beta(double a, double b, double x);

/// ln B(a, b)
double log_beta(double a, double b);

/// CDF of Student's t with (possibly non-integer) df degrees of freedom.
double student_t_cdf(double t, double df);

/// Two-sided tail probability P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

}  // namespace fatiguekit
