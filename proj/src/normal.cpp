#include "mnec/normal.hpp"

#include <cmath>
#include <numbers>

namespace mnec::normal {

namespace {

constexpr double kTail = -35.0;  // below this Phi(x) nears the double range

// Phi(x) ~ phi(x) / -x * (1 - 1/x^2 + 3/x^4 - 15/x^6) for x -> -inf.
double tail_series(double x) {
  const double r = 1.0 / (x * x);
  return 1.0 - r * (1.0 - r * (3.0 - 15.0 * r));
}

}  // namespace

double pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_cdf(double x) {
  if (x > 0.0) return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
  if (x > kTail) return std::log(cdf(x));
  return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(-x) + std::log(tail_series(x));
}

double mills(double x) {
  if (x > kTail) return pdf(x) / cdf(x);
  return -x / tail_series(x);
}

double two_sided_p(double z) { return std::erfc(std::fabs(z) / std::numbers::sqrt2); }

}  // namespace mnec::normal
