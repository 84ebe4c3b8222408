#include <gtest/gtest.h>

#include <cmath>

#include "pbicm/info.hpp"
#include "pbicm/reference.hpp"
#include "pbicm/tables.hpp"
#include "test_util.hpp"

using namespace pbicm;

namespace {

struct Case {
  const char* name;
  ChannelModel ch;
  Constellation cons;
};

std::vector<Case> cases() {
  Rng rng = make_stream(404, 0);
  return {
      {"awgn_8psk", awgn_from_snr(Snr{4.0}), make_constellation(ConstellationKind::Psk8)},
      {"rayleigh_qpsk", rayleigh_from_snr(Snr{6.0}), make_constellation(ConstellationKind::Qpsk)},
      {"dmc", pbicm::testing::random_dmc(rng, 4, 5), pbicm::testing::index_constellation(2)},
  };
}

// Small enough for the naive loops to stay quick.
QuadratureSpec small_spec() { return {16, 24, 1, 1e-20}; }

}  // namespace

TEST(Reference, MomentsMatchStreamedKernel) {
  for (const auto& c : cases()) {
    SCOPED_TRACE(c.name);
    const ChannelMoments fast = accumulate_moments(c.ch, c.cons, small_spec());
    const ChannelMoments slow = reference::moments(c.ch, c.cons, small_spec());
    EXPECT_NEAR(fast.full.mean, slow.full.mean, 1e-10);
    EXPECT_NEAR(fast.full.second, slow.full.second, 1e-9);
    ASSERT_EQ(fast.sub.size(), slow.sub.size());
    for (std::size_t s = 0; s < fast.sub.size(); ++s) {
      EXPECT_NEAR(fast.sub[s].mean, slow.sub[s].mean, 1e-10);
      EXPECT_NEAR(fast.sub[s].second, slow.sub[s].second, 1e-9);
    }
  }
}

TEST(Reference, GallagerSumsMatchTables) {
  for (const auto& c : cases()) {
    SCOPED_TRACE(c.name);
    const TableSet t = build_tables(c.ch, c.cons, small_spec(), true);
    for (double rho : {0.25, 1.0, 3.0}) {
      EXPECT_NEAR(gallager_sum(t.full, rho), reference::gallager_sum_full(c.ch, c.cons, small_spec(), rho), 1e-11);
      EXPECT_NEAR(streamed_gallager_sum(c.ch, c.cons, small_spec(), rho),
                  reference::gallager_sum_full(c.ch, c.cons, small_spec(), rho), 1e-11);
      for (int s = 0; s < c.cons.bits_per_symbol(); ++s) {
        EXPECT_NEAR(gallager_sum(t.sub[static_cast<std::size_t>(s)], rho),
                    reference::gallager_sum_subchannel(c.ch, c.cons, small_spec(), s, rho), 1e-11);
      }
    }
  }
}

TEST(Reference, SerialSimulationMatchesParallel) {
  PbicmSimConfig cfg;
  cfg.cons = make_constellation(ConstellationKind::Qam16);
  cfg.channel = awgn_from_snr(Snr{6.0});
  cfg.trials = 700;
  cfg.seed = 3;
  EXPECT_EQ(simulate(cfg).counters, reference::simulate(cfg).counters);
}
