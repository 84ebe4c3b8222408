#pragma once

#include <cstddef>
#include <vector>

#include "pbicm/channel.hpp"
#include "pbicm/constellation.hpp"
#include "pbicm/quadrature.hpp"

namespace pbicm {

/// Output-space integration table of a channel with K equiprobable inputs.
///
/// Every output integral used here has an integrand G that is homogeneous of
/// degree one in the likelihood vector, so it is evaluated as
/// sum_j weight[j] * G(r_j) with r_j[x] = w(y_j|x) / mean_x' w(y_j|x').
/// For a discrete channel the nodes are the outputs themselves and
/// weight[j] = mean_x w(j|x); for continuous channels they are quadrature
/// nodes and the weight is the quadrature weight over K (the mixture
/// density cancels). Ratios are stored as natural logs (-inf for zero).
struct WeightedTable {
  std::size_t inputs = 0;
  std::vector<double> weight;
  std::vector<double> log_ratio;  // node-major, inputs per node

  std::size_t nodes() const { return weight.size(); }
  const double* row(std::size_t j) const { return log_ratio.data() + j * inputs; }
};

/// First two moments of the information density under equiprobable input, in nats.
struct InfoMoments {
  double mean = 0.0;    // E[i]
  double second = 0.0;  // E[i^2]
};

struct ChannelMoments {
  InfoMoments full;              // channel W with equiprobable X
  std::vector<InfoMoments> sub;  // binary sub-channels W_s
};

struct TableSet {
  WeightedTable full;              // empty unless requested
  std::vector<WeightedTable> sub;  // one binary table per label position
};

/// Builds the binary sub-channel tables (and the full M-ary table when
/// `with_full`). OpenMP-parallel over (fade node, conditioning symbol)
/// blocks; every block writes a fixed slice, so the table is identical for
/// any thread count.
TableSet build_tables(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec,
                      bool with_full);

/// Streams over the same node set without storing it.
ChannelMoments accumulate_moments(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec);

/// sum_j weight_j * (mean_x r_jx^(1/(1+rho)))^(1+rho); E0 = -log2 of it.
double gallager_sum(const WeightedTable& t, double rho);

/// gallager_sum of the full M-ary table without storing it.
double streamed_gallager_sum(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec,
                             double rho);

/// Tables above this many log-ratio entries are streamed instead of stored.
inline constexpr std::size_t kMaxStoredTableEntries = std::size_t{1} << 25;

/// Information moments computed from a stored table.
InfoMoments table_moments(const WeightedTable& t);

/// Number of nodes the grid produces for `cons` (continuous channels) or the
/// number of outputs with positive mass (discrete channels).
std::size_t node_count(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec);

}  // namespace pbicm
