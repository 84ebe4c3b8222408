#pragma once

#include <cstdint>

#include <boost/math/tools/minima.hpp>

namespace pbicm {

struct Maximum {
  double x = 0.0;
  double value = 0.0;
};

/// Brent's method for the maximum of a concave f on [lo, hi] (about
/// `bits` bits of relative precision in x), followed by a comparison against
/// both endpoints so boundary maxima are reported exactly at the boundary.
template <class F>
Maximum concave_max(F&& f, double lo, double hi, int bits = 32) {
  std::uintmax_t iterations = 200;
  const auto [x, neg] = boost::math::tools::brent_find_minima([&](double t) { return -f(t); }, lo, hi, bits, iterations);
  Maximum best{x, -neg};
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo >= best.value) best = {lo, f_lo};
  if (f_hi > best.value) best = {hi, f_hi};
  return best;
}

}  // namespace pbicm
