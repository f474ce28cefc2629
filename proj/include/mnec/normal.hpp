#pragma once

// Standard normal helpers that stay finite deep in the tails.

namespace mnec::normal {

double pdf(double x);
double cdf(double x);
/// log Phi(x), accurate for large negative x.
double log_cdf(double x);
/// phi(x) / Phi(x) (inverse Mills ratio).
double mills(double x);
/// Two-sided p-value of a standard normal statistic.
double two_sided_p(double z);

}  // namespace mnec::normal
