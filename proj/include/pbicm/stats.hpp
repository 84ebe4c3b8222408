#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pbicm {

struct Estimate {
  double value = 0.0;
  double lower = 0.0;  // 95% Wilson score interval
  double upper = 0.0;
  std::size_t successes = 0;
  std::size_t trials = 0;

  /// Binomial standard error sqrt(p(1-p)/n).
  double sigma() const;
};

Estimate wilson_estimate(std::size_t successes, std::size_t trials);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov tail.
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Two-sample chi-square test on discrete values (each distinct value is a bin).
TestResult chi_square_two_sample(std::span<const double> a, std::span<const double> b);

/// Chi-square goodness of fit of observed counts against expected counts.
/// `constraints` is subtracted from the bin count for the degrees of freedom.
TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected, int constraints = 1);

/// Survival function of the Kolmogorov distribution.
double kolmogorov_tail(double lambda);

}  // namespace pbicm
