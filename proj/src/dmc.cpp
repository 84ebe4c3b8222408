#include "pbicm/dmc.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pbicm/optimize.hpp"

namespace pbicm::dmc {

namespace {

std::vector<double> output_distribution(const DmcMatrix& w, const std::vector<double>& px) {
  std::vector<double> py(w.outputs(), 0.0);
  for (std::size_t x = 0; x < w.inputs(); ++x)
    for (std::size_t y = 0; y < w.outputs(); ++y) py[y] += px[x] * w(x, y);
  return py;
}

}  // namespace

double mutual_information_uniform(const DmcMatrix& w) {
  const std::vector<double> px(w.inputs(), 1.0 / static_cast<double>(w.inputs()));
  const std::vector<double> py = output_distribution(w, px);
  double mi = 0.0;
  for (std::size_t x = 0; x < w.inputs(); ++x) {
    for (std::size_t y = 0; y < w.outputs(); ++y) {
      const double p = w(x, y);
      if (p > 0.0) mi += px[x] * p * std::log2(p / py[y]);
    }
  }
  return mi;
}

double capacity_blahut_arimoto(const DmcMatrix& w, double tolerance, int max_iterations) {
  const std::size_t nx = w.inputs();
  std::vector<double> px(nx, 1.0 / static_cast<double>(nx));
  std::vector<double> c(nx);
  double lower = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    const std::vector<double> py = output_distribution(w, px);
    // c[x] = exp(D(w(.|x) || py)) in nats
    for (std::size_t x = 0; x < nx; ++x) {
      double d = 0.0;
      for (std::size_t y = 0; y < w.outputs(); ++y) {
        const double p = w(x, y);
        if (p > 0.0) d += p * std::log(p / py[y]);
      }
      c[x] = std::exp(d);
    }
    double sum = 0.0;
    double cmax = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      sum += px[x] * c[x];
      cmax = std::max(cmax, c[x]);
    }
    lower = std::log(sum);
    const double upper = std::log(cmax);
    if (upper - lower < tolerance) break;
    for (std::size_t x = 0; x < nx; ++x) px[x] *= c[x] / sum;
  }
  return lower / std::log(2.0);
}

double e0_uniform(const DmcMatrix& w, double rho) {
  if (rho < 0.0) throw std::invalid_argument("rho must be >= 0");
  const double px = 1.0 / static_cast<double>(w.inputs());
  double total = 0.0;
  for (std::size_t y = 0; y < w.outputs(); ++y) {
    double inner = 0.0;
    for (std::size_t x = 0; x < w.inputs(); ++x) inner += px * std::pow(w(x, y), 1.0 / (1.0 + rho));
    total += std::pow(inner, 1.0 + rho);
  }
  return -std::log2(total);
}

double dispersion_uniform(const DmcMatrix& w) {
  const std::vector<double> px(w.inputs(), 1.0 / static_cast<double>(w.inputs()));
  const std::vector<double> py = output_distribution(w, px);
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t x = 0; x < w.inputs(); ++x) {
    for (std::size_t y = 0; y < w.outputs(); ++y) {
      const double p = w(x, y);
      if (p <= 0.0) continue;
      const double i = std::log2(p / py[y]);
      m1 += px[x] * p * i;
      m2 += px[x] * p * i * i;
    }
  }
  return m2 - m1 * m1;
}

double random_coding_exponent(const DmcMatrix& w, double rate_bits) {
  if (rate_bits < 0.0) throw std::invalid_argument("rate must be >= 0");
  const Maximum m = concave_max([&](double rho) { return e0_uniform(w, rho) - rho * rate_bits; }, 0.0, 1.0);
  return std::max(0.0, m.value);
}

}  // namespace pbicm::dmc
