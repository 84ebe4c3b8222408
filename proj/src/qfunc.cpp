#include "pbicm/qfunc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pbicm {

double qfunc(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double qinv(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("qinv argument must lie in (0, 1)");
  if (eps == 0.5) return 0.0;
  if (eps > 0.5) return -qinv(1.0 - eps);

  // Rational start (Abramowitz & Stegun 26.2.23), then Newton on
  // ln Q(x) = ln eps, which stays well conditioned deep in the tail.
  const double t = std::sqrt(-2.0 * std::log(eps));
  double x = t - (2.515517 + 0.802853 * t + 0.010328 * t * t) /
                     (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t);
  const double log_eps = std::log(eps);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (int it = 0; it < 50; ++it) {
    const double q = qfunc(x);
    const double pdf = inv_sqrt_2pi * std::exp(-0.5 * x * x);
    const double step = (std::log(q) - log_eps) * q / pdf;
    x += step;
    if (std::abs(step) <= 1e-16 * std::abs(x)) break;
  }
  return x;
}

}  // namespace pbicm
