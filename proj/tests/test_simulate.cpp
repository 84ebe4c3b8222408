#include <gtest/gtest.h>

#include <omp.h>

#include "pbicm/reference.hpp"
#include "pbicm/simulate.hpp"
#include "test_util.hpp"

using namespace pbicm;

namespace {

PbicmSimConfig qpsk_config(double snr_db, std::size_t trials, std::uint64_t seed) {
  PbicmSimConfig cfg;
  cfg.code = BinaryCode::hamming74();
  cfg.cons = make_constellation(ConstellationKind::Qpsk);
  cfg.channel = awgn_from_snr(Snr{snr_db});
  cfg.trials = trials;
  cfg.seed = seed;
  return cfg;
}

bool overlap(const Estimate& a, const Estimate& b) { return a.lower <= b.upper && b.lower <= a.upper; }

}  // namespace

TEST(Simulate, RejectsZeroTrials) { EXPECT_THROW(simulate(qpsk_config(2, 0, 1)), std::invalid_argument); }

TEST(Simulate, NoiselessChannelHasNoErrors) {
  PbicmSimConfig cfg = qpsk_config(0, 3000, 2);
  cfg.cons = make_constellation(ConstellationKind::Psk8);
  std::vector<double> id(64, 0.0);
  for (int i = 0; i < 8; ++i) id[static_cast<std::size_t>(i * 9)] = 1.0;
  cfg.channel = make_dmc(8, 8, id);
  const auto r = simulate(cfg);
  EXPECT_EQ(r.pe_overall.value, 0.0);
  EXPECT_EQ(r.pe_wbar_direct.value, 0.0);
  EXPECT_EQ(r.ber_overall, 0.0);
}

TEST(Simulate, DeterministicAcrossRunsAndThreadCounts) {
  const auto cfg = qpsk_config(1, 3000, 3);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto a = simulate(cfg);
  omp_set_num_threads(4);
  const auto b = simulate(cfg);
  omp_set_num_threads(saved);
  EXPECT_EQ(a.counters, b.counters);
  EXPECT_EQ(a.counters, simulate(cfg).counters);
  EXPECT_EQ(a.counters, reference::simulate(cfg).counters);
  EXPECT_NE(a.counters, simulate(qpsk_config(1, 3000, 4)).counters);
}

TEST(Simulate, BerIsTheMeanOfLevelBers) {
  PbicmSimConfig cfg = qpsk_config(0, 5000, 5);
  cfg.cons = make_constellation(ConstellationKind::Qam16);
  const auto r = simulate(cfg);
  std::size_t bit_errors = 0;
  double mean = 0.0;
  for (std::size_t l = 0; l < 4; ++l) {
    bit_errors += r.counters.level_bit_errors[l];
    mean += r.ber_per_level[l] / 4;
  }
  EXPECT_EQ(r.ber_overall, static_cast<double>(bit_errors) / (4.0 * 4.0 * 5000.0));
  EXPECT_NEAR(r.ber_overall, mean, 1e-15);
  EXPECT_GT(r.ber_overall, 0.0);
}

TEST(Simulate, LevelsSeeTheSameChannel) {
  PbicmSimConfig cfg = qpsk_config(3, 20000, 6);
  cfg.cons = make_constellation(ConstellationKind::Psk8);
  const auto r = simulate(cfg);
  ASSERT_EQ(r.pe_per_level.size(), 3u);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b) EXPECT_TRUE(overlap(r.pe_per_level[a], r.pe_per_level[b]));
}

TEST(Simulate, UnionAndMaxBounds) {
  const auto r = simulate(qpsk_config(2, 20000, 7));
  double worst = 0.0, sum = 0.0, slack = 0.0;
  for (const auto& e : r.pe_per_level) {
    worst = std::max(worst, e.value);
    sum += e.value;
    slack += 3 * e.sigma();
  }
  EXPECT_LE(worst, r.pe_overall.value);  // exact on counters
  EXPECT_LE(r.pe_overall.value, sum + slack);
}

TEST(Simulate, DirectChannelSandwich) {
  const auto r = simulate(qpsk_config(2, 20000, 8));
  const double w = r.pe_wbar_direct.value;
  const double sw = r.pe_wbar_direct.sigma();
  const double so = r.pe_overall.sigma();
  EXPECT_LE(w - 3 * sw, r.pe_overall.value + 3 * so);
  EXPECT_LE(r.pe_overall.value - 3 * so, 2 * (w + 3 * sw));
  EXPECT_GT(w, 0.0);
}

TEST(Simulate, WilsonIntervalsBracketTheEstimate) {
  const auto r = simulate(qpsk_config(0, 2000, 9));
  for (const auto& e : r.pe_per_level) {
    EXPECT_LE(e.lower, e.value);
    EXPECT_GE(e.upper, e.value);
    EXPECT_GE(e.lower, 0.0);
    EXPECT_LE(e.upper, 1.0);
  }
}

TEST(Equivalence, RejectsSmallSamples) {
  EquivalenceConfig cfg{qpsk_config(2, 1, 1), 5000, false};
  EXPECT_THROW(equivalence_test(cfg), std::invalid_argument);
}

TEST(Equivalence, SplitHalfNullCalibration) {
  EquivalenceConfig cfg{qpsk_config(2, 1, 11), 20000, false};
  const auto r = pipeline_split_half_test(cfg);
  EXPECT_GT(r.p_value(), 0.01);
}

TEST(Equivalence, PipelineMatchesDirectChannel) {
  for (auto k : {ConstellationKind::Qpsk, ConstellationKind::Psk8, ConstellationKind::Qam16}) {
    EquivalenceConfig cfg{qpsk_config(2, 1, 12), 20000, false};
    cfg.sim.cons = make_constellation(k);
    const auto r = equivalence_test(cfg);
    EXPECT_EQ(r.method, EquivalenceMethod::KolmogorovSmirnov);
    EXPECT_GT(r.p_value(), 0.01) << to_string(k);
  }
}

TEST(Equivalence, DiscreteChannelUsesChiSquare) {
  Rng rng = make_stream(13, 0);
  EquivalenceConfig cfg{qpsk_config(2, 1, 13), 20000, false};
  cfg.sim.channel = pbicm::testing::random_dmc(rng, 4, 3);
  const auto r = equivalence_test(cfg);
  EXPECT_EQ(r.method, EquivalenceMethod::ChiSquare);
  EXPECT_GT(r.p_value(), 0.01);
}

// Without dither and with the other levels frozen at codeword 0, the first
// level of 16QAM always sees the same amplitude on the other bit of its axis,
// so its LLR law differs from the dithered channel. (For QPSK and 8PSK Gray
// the uniform shift averages the frozen positions back to the dithered law.)
TEST(Equivalence, NoDitherControlFailsWhereLevelsInteract) {
  EquivalenceConfig cfg{qpsk_config(2, 1, 14), 20000, true};
  cfg.sim.cons = make_constellation(ConstellationKind::Qam16);
  cfg.sim.dither = DitherMode::Disabled;
  EXPECT_LT(equivalence_test(cfg).p_value(), 0.001);
}

TEST(Equivalence, SkippedDitherIsDetected) {
  EquivalenceConfig cfg{qpsk_config(2, 1, 15), 20000, false};
  cfg.sim.dither = DitherMode::SkipAtTransmitter;
  EXPECT_LT(equivalence_test(cfg).p_value(), 1e-6);
}
