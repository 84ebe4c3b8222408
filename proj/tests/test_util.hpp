#pragma once

#include <random>
#include <vector>

#include <cmath>
#include <numbers>

#include "pbicm/channel.hpp"
#include "pbicm/constellation.hpp"
#include "pbicm/rng.hpp"

namespace pbicm::testing {

// Row-stochastic matrix with entries drawn from Exp(1) and normalized.
inline ChannelModel random_dmc(Rng& rng, std::size_t inputs, std::size_t outputs) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(inputs * outputs);
  for (std::size_t x = 0; x < inputs; ++x) {
    double s = 0.0;
    for (std::size_t y = 0; y < outputs; ++y) s += p[x * outputs + y] = e(rng) + 1e-3;
    for (std::size_t y = 0; y < outputs; ++y) p[x * outputs + y] /= s;
    // Absorb the rounding of the normalization in the last entry.
    double t = 0.0;
    for (std::size_t y = 0; y + 1 < outputs; ++y) t += p[x * outputs + y];
    p[x * outputs + outputs - 1] = 1.0 - t;
  }
  return make_dmc(inputs, outputs, std::move(p));
}

// 2^L points whose label equals their index; coordinates are unused by
// discrete channels.
inline Constellation index_constellation(int levels) {
  const std::size_t m = std::size_t{1} << levels;
  std::vector<Complex> pts(m);
  std::vector<std::uint32_t> labels(m);
  for (std::size_t k = 0; k < m; ++k) {
    pts[k] = std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m));
    labels[k] = static_cast<std::uint32_t>(k);
  }
  return Constellation("index" + std::to_string(m), std::move(pts), std::move(labels));
}

inline ChannelModel bsc(double p) { return make_dmc(2, 2, {1 - p, p, p, 1 - p}); }

// 4-input channel (rows in label order, see index_constellation) whose first
// label bit passes through BSC(pa) and second through BSC(pb).
inline ChannelModel product_bsc(double pa, double pb) {
  std::vector<double> p(16);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) {
      const double a = ((x >> 1) & 1) == ((y >> 1) & 1) ? 1 - pa : pa;
      const double b = (x & 1) == (y & 1) ? 1 - pb : pb;
      p[static_cast<std::size_t>(x * 4 + y)] = a * b;
    }
  return make_dmc(4, 4, std::move(p));
}

inline double h2(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

}  // namespace pbicm::testing
