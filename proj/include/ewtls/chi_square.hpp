#pragma once

namespace ewtls {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

double chi_square_cdf(double x, double dof);

/// Inverse of chi_square_cdf by safeguarded Newton on a bisection bracket;
/// absolute tolerance 1e-10 in x. Requires 0 < p < 1 and dof > 0.
double chi_square_quantile(double p, double dof);

}  // namespace ewtls
