#pragma once

#include "pbicm/channel.hpp"
#include "pbicm/constellation.hpp"
#include "pbicm/quadrature.hpp"
#include "pbicm/simulate.hpp"
#include "pbicm/tables.hpp"

/// Serial, straightforward versions of the parallel kernels. They evaluate
/// densities directly (no log-ratio tables, no log-sum-exp) and exist to
/// test and benchmark the optimized path. Moderate SNR only: densities are
/// not protected against underflow.
namespace pbicm::reference {

/// Same node set as accumulate_moments, in nats.
ChannelMoments moments(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec = {});

/// Gallager sums (E0 = -log2 of the value) over the same node set.
double gallager_sum_full(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec, double rho);
double gallager_sum_subchannel(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec, int s,
                               double rho);

/// simulate() with the stream blocks run one after another on one thread.
SimulationResult simulate(const PbicmSimConfig& cfg);

}  // namespace pbicm::reference
