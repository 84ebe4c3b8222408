#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pbicm/channel.hpp"
#include "pbicm/stats.hpp"

using namespace pbicm;

namespace {

// Counts of `values` in the bins [edge_i, edge_{i+1}) against exact bin masses.
TestResult gof(const std::vector<double>& values, const std::vector<double>& edges, auto cdf) {
  std::vector<double> observed(edges.size() - 1, 0.0);
  std::vector<double> expected(edges.size() - 1, 0.0);
  for (double v : values) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    observed[static_cast<std::size_t>(it - edges.begin()) - 1] += 1.0;
  }
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    expected[i] = static_cast<double>(values.size()) * (cdf(edges[i + 1]) - cdf(edges[i]));
  }
  return chi_square_gof(observed, expected);
}

std::vector<double> exp_quantile_edges(double mean, int bins) {
  std::vector<double> e{0.0};
  for (int i = 1; i < bins; ++i) e.push_back(-mean * std::log(1.0 - static_cast<double>(i) / bins));
  e.push_back(INFINITY);
  return e;
}

}  // namespace

TEST(Channel, NoiseDensityFromSnr) {
  EXPECT_DOUBLE_EQ(awgn_from_snr(Snr{0}).n0(), 1.0);
  EXPECT_NEAR(awgn_from_snr(Snr{5}).n0(), 0.31622776601683794, 1e-15);
  EXPECT_DOUBLE_EQ(awgn_from_snr(Snr{INFINITY}).n0(), 1e-10);
  EXPECT_DOUBLE_EQ(rayleigh_from_snr(Snr{200}).n0(), 1e-10);
  EXPECT_THROW(noise_density(Snr{NAN}), std::invalid_argument);
}

TEST(Channel, DmcValidation) {
  EXPECT_THROW(make_dmc(2, 2, {0.5, 0.5, 0.6, 0.5}), std::invalid_argument);
  EXPECT_THROW(make_dmc(2, 2, {1.5, -0.5, 0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(make_dmc(2, 2, {1.0, 0.0, 1.0}), std::invalid_argument);
  EXPECT_NO_THROW(make_dmc(2, 2, {0.9, 0.1, 0.1, 0.9}));
}

TEST(Channel, DmcDensityIsTheEntry) {
  const auto ch = make_dmc(2, 3, {0.2, 0.3, 0.5, 0.6, 0.1, 0.3});
  ChannelOutput y;
  y.index = 2;
  EXPECT_EQ(density(ch, y, {1, {}}), 0.3);
  EXPECT_EQ(density(ch, y, {0, {}}), 0.5);
  EXPECT_THROW(density(ch, y, {2, {}}), std::out_of_range);
}

TEST(Channel, IdentityDmcIsDeterministic) {
  const auto ch = make_dmc(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  Rng rng = make_stream(1, 0);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample(ch, {2, {}}, rng).index, 2u);
  EXPECT_THROW(sample(ch, {3, {}}, rng), std::out_of_range);
}

TEST(Channel, DmcSamplesMatchTheRow) {
  const auto ch = make_dmc(2, 4, {0.1, 0.2, 0.3, 0.4, 0.25, 0.25, 0.0, 0.5});
  Rng rng = make_stream(3, 0);
  for (std::size_t x = 0; x < 2; ++x) {
    std::vector<double> obs(4, 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) obs[sample(ch, {x, {}}, rng).index] += 1.0;
    std::vector<double> o, e;
    for (std::size_t y = 0; y < 4; ++y) {
      if (ch.dmc()(x, y) == 0.0) {
        EXPECT_EQ(obs[y], 0.0);
        continue;
      }
      o.push_back(obs[y]);
      e.push_back(n * ch.dmc()(x, y));
    }
    EXPECT_GT(chi_square_gof(o, e).p_value, 0.01);
  }
}

TEST(Channel, AwgnPeakDensity) {
  const auto ch = awgn_from_snr(Snr{0});
  ChannelOutput y;
  y.y = Complex(0.3, -0.2);
  EXPECT_NEAR(density(ch, y, {0, Complex(0.3, -0.2)}), 1.0 / std::numbers::pi, 1e-15);
}

TEST(Channel, AwgnDensityIntegratesToOne) {
  const auto ch = awgn_from_snr(Snr{0});
  const ChannelInput x{0, Complex(0.5, 0.25)};
  const double h = 0.02;
  double sum = 0.0;
  for (double a = -10; a <= 10; a += h)
    for (double b = -10; b <= 10; b += h) {
      ChannelOutput y;
      y.y = x.point + Complex(a, b);
      sum += density(ch, y, x) * h * h;
    }
  EXPECT_NEAR(sum, 1.0, 1e-6);
}

TEST(Channel, AwgnVanishingNoise) {
  // Capped at 100 dB: per-dimension noise std is sqrt(1e-10 / 2) ~ 7e-6.
  const auto ch = awgn_from_snr(Snr{150});
  Rng rng = make_stream(2, 0);
  const ChannelInput x{0, Complex(0.6, -0.8)};
  for (int i = 0; i < 100; ++i) EXPECT_LT(std::abs(sample(ch, x, rng).y - x.point), 1e-4);
}

TEST(Channel, AwgnNoiseEnergy) {
  const auto ch = awgn_from_snr(Snr{0});
  Rng rng = make_stream(4, 0);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = std::norm(sample(ch, {0, Complex(0, 0)}, rng).y);
    s += e;
    s2 += e * e;
  }
  const double mean = s / n;
  const double sd = std::sqrt((s2 / n - mean * mean) / n);
  EXPECT_LT(std::abs(mean - 1.0), 3 * sd);
}

// |y - x|^2 is exponential with mean n0 and Re(y - x) is normal with variance n0/2.
TEST(Channel, AwgnSamplesMatchDensity) {
  const double n0 = 0.4;
  const auto ch = ChannelModel(Awgn{n0});
  Rng rng = make_stream(5, 0);
  const ChannelInput x{0, Complex(-0.3, 0.9)};
  std::vector<double> radial, re;
  for (int i = 0; i < 100000; ++i) {
    const Complex z = sample(ch, x, rng).y - x.point;
    radial.push_back(std::norm(z));
    re.push_back(z.real());
  }
  EXPECT_GT(gof(radial, exp_quantile_edges(n0, 20), [&](double t) { return std::isinf(t) ? 1.0 : 1.0 - std::exp(-t / n0); }).p_value, 0.01);
  std::vector<double> edges{-INFINITY};
  for (int i = -9; i <= 9; ++i) edges.push_back(0.2 * i);
  edges.push_back(INFINITY);
  const double sd = std::sqrt(n0 / 2);
  EXPECT_GT(gof(re, edges, [&](double t) { return 0.5 * std::erfc(-t / (sd * std::sqrt(2.0))); }).p_value, 0.01);
}

TEST(Channel, RayleighFadeHasUnitPower) {
  const auto ch = rayleigh_from_snr(Snr{10});
  Rng rng = make_stream(6, 0);
  const int n = 1000000;
  double s = 0.0, s2 = 0.0, sig = 0.0;
  const ChannelInput x{0, Complex(std::sqrt(0.5), std::sqrt(0.5))};
  std::vector<double> fade;
  fade.reserve(100000);
  for (int i = 0; i < n; ++i) {
    const ChannelOutput o = sample(ch, x, rng);
    const double e = std::norm(o.h);
    s += e;
    s2 += e * e;
    sig += std::norm(o.h * x.point);
    if (i < 100000) fade.push_back(e);
  }
  const double mean = s / n;
  const double sd = std::sqrt((s2 / n - mean * mean) / n);
  EXPECT_LT(std::abs(mean - 1.0), 3 * sd);
  EXPECT_NEAR(sig / n, 1.0, 5 * sd);
  EXPECT_GT(gof(fade, exp_quantile_edges(1.0, 20), [](double t) { return std::isinf(t) ? 1.0 : 1.0 - std::exp(-t); }).p_value, 0.01);
}

TEST(Channel, RayleighWithUnitFadeIsAwgn) {
  const auto ray = rayleigh_from_snr(Snr{3});
  const auto awgn = awgn_from_snr(Snr{3});
  const ChannelInput x{0, Complex(0.2, 0.7)};
  for (double a = -2; a <= 2; a += 0.5) {
    ChannelOutput y;
    y.y = Complex(a, 0.3 * a);
    y.h = 1.0;
    EXPECT_DOUBLE_EQ(density(ray, y, x), density(awgn, y, x));
  }
}

TEST(Channel, RayleighNoiseGivenFade) {
  const double n0 = 0.5;
  const auto ch = ChannelModel(RayleighCsi{n0});
  Rng rng = make_stream(7, 0);
  const ChannelInput x{0, Complex(1, 0)};
  std::vector<double> radial;
  for (int i = 0; i < 100000; ++i) {
    const ChannelOutput o = sample(ch, x, rng);
    radial.push_back(std::norm(o.y - o.h * x.point));
  }
  EXPECT_GT(gof(radial, exp_quantile_edges(n0, 20), [&](double t) { return std::isinf(t) ? 1.0 : 1.0 - std::exp(-t / n0); }).p_value, 0.01);
}

TEST(Channel, SameSeedSameSamples) {
  const auto ch = rayleigh_from_snr(Snr{2});
  Rng a = make_stream(11, 3);
  Rng b = make_stream(11, 3);
  Rng c = make_stream(11, 4);
  const ChannelInput x{0, Complex(1, 0)};
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto ya = sample(ch, x, a);
    const auto yb = sample(ch, x, b);
    const auto yc = sample(ch, x, c);
    EXPECT_EQ(ya.y, yb.y);
    EXPECT_EQ(ya.h, yb.h);
    differs = differs || ya.y != yc.y;
  }
  EXPECT_TRUE(differs);
}

TEST(Channel, DmcRowsMustMatchConstellation) {
  const auto ch = make_dmc(2, 2, {1, 0, 0, 1});
  EXPECT_THROW(check_compatible(ch, make_constellation(ConstellationKind::Qpsk)), std::invalid_argument);
  EXPECT_NO_THROW(check_compatible(ch, make_constellation(ConstellationKind::Bpsk)));
}
