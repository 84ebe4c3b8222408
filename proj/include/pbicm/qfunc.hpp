#pragma once

namespace pbicm {

/// Complementary standard normal CDF.
double qfunc(double x);

/// Inverse of qfunc on (0, 1); relative accuracy ~1e-13 in the tail.
double qinv(double eps);

}  // namespace pbicm
