#pragma once

// Student-t inference primitives built on the regularized incomplete
// beta function (continued-fraction evaluation, absolute error <= 1e-10).

namespace tsm::stats {

/// I_x(a, b) for a, b > 0 and x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided p-value of a t statistic against zero: P(|T_dof| >= |t|).
double student_t_two_sided_p(double t, double dof);

/// CDF of the Student-t distribution with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

/// Inverse CDF, p in (0, 1). Bisection on the CDF.
double student_t_quantile(double p, double dof);

}  // namespace tsm::stats
