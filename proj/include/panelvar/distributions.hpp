#pragma once

namespace panelvar {

// Inverse standard-normal CDF, Wichura's AS 241 (PPND16) rational
// approximation; relative error below 1e-15 on (0,1).
double normal_quantile(double p);

// Standard-normal CDF via erfc.
double normal_cdf(double x);

// Regularized incomplete beta I_x(a,b) by continued fraction.
double incomplete_beta(double a, double b, double x);

// Student-t CDF and quantile for dof > 0. The quantile inverts the CDF with
// bisection refined to ~1e-13.
double student_t_cdf(double t, double dof);
double student_t_quantile(double p, double dof);

}  // namespace panelvar
