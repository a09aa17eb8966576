#pragma once

#include "ed/probability.hpp"

namespace ed {

// Standard normal upper tail Q(y) = P(N(0,1) > y). Linear value underflows
// near y ~ 38.6; the log form stays accurate to y = 1e4 and beyond via a
// Mills-ratio continued fraction.
Probability normal_tail_q(double y);

// Regularized incomplete gamma functions P(shape, x) and Q(shape, x),
// P + Q = 1. shape > 0, x >= 0. Series expansion below the shape+1
// diagonal, Lentz continued fraction above it, both carried in log form.
Probability regularized_gamma_lower(double shape, double x);
Probability regularized_gamma_upper(double shape, double x);

// Noncentral chi-square tail probabilities and density, parameterized by
// degrees of freedom (dof > 0) and noncentrality lambda >= 0. Evaluated as
// a Poisson mixture of gamma tails with additive log-domain recurrences
// anchored on a direct evaluation, so extreme tails keep full relative
// accuracy. Practical envelope: lambda up to ~1e7 (cost grows as
// sqrt(lambda)).
Probability noncentral_chi2_upper(double dof, double lambda, double x);
Probability noncentral_chi2_lower(double dof, double lambda, double x);

// log of the noncentral chi-square pdf at x (dof > 0, lambda >= 0, x >= 0).
double noncentral_chi2_log_pdf(double x, double dof, double lambda);
double noncentral_chi2_pdf(double x, double dof, double lambda);

// Generalized Marcum Q-function Q_order(a, b): upper tail at b^2 of a
// noncentral chi-square with 2*order degrees of freedom and noncentrality
// a^2. order >= 1.
Probability marcum_q(int order, double a, double b);

}  // namespace ed
