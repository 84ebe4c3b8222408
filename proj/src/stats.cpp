#include "pbicm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace pbicm {

double Estimate::sigma() const {
  if (trials == 0) return 0.0;
  return std::sqrt(value * (1.0 - value) / static_cast<double>(trials));
}

Estimate wilson_estimate(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("estimate needs at least one trial");
  if (successes > trials) throw std::invalid_argument("more successes than trials");
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  const double lower = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double upper = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {p, lower, upper, successes, trials};
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d)};
}

TestResult chi_square_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("chi-square test needs non-empty samples");
  std::map<double, std::pair<double, double>> bins;
  for (double v : a) bins[v].first += 1.0;
  for (double v : b) bins[v].second += 1.0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ka = std::sqrt(nb / na);
  const double kb = std::sqrt(na / nb);
  double chi = 0.0;
  for (const auto& [value, counts] : bins) {
    const double diff = ka * counts.first - kb * counts.second;
    chi += diff * diff / (counts.first + counts.second);
  }
  const double dof = static_cast<double>(bins.size()) - (a.size() == b.size() ? 1.0 : 0.0);
  if (dof <= 0.0) return {chi, 1.0};
  return {chi, boost::math::gamma_q(dof / 2.0, chi / 2.0)};
}

TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected, int constraints) {
  if (observed.size() != expected.size()) throw std::invalid_argument("bin count mismatch");
  double chi = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0.0)) throw std::invalid_argument("expected counts must be positive");
    const double diff = observed[i] - expected[i];
    chi += diff * diff / expected[i];
  }
  const double dof = static_cast<double>(observed.size()) - constraints;
  if (dof <= 0.0) throw std::invalid_argument("not enough bins");
  return {chi, boost::math::gamma_q(dof / 2.0, chi / 2.0)};
}

}  // namespace pbicm
