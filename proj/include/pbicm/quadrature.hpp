#pragma once

#include <vector>

#include "pbicm/channel.hpp"

namespace pbicm {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the weight e^{-t^2} on the real line.
GaussRule gauss_hermite(int n);

/// Gauss-Laguerre rule for the weight e^{-t} on [0, inf).
GaussRule gauss_laguerre(int n);

/// Integration resolution for continuous-output channels.
///
/// Gaussian noise is integrated with a tensor Gauss-Hermite rule centred on
/// each conditioning symbol. The fading model adds Gauss-Laguerre nodes on
/// |h|^2 and uniform phase nodes. Circularly symmetric noise makes every
/// information functional invariant to the phase of h, so one phase node is
/// exact; more can be requested. Nodes whose product weight is below
/// `prune` times the largest product weight are dropped.
///
/// Information moments are accepted once a resolution agrees with its
/// doubled version; up to `max_refinements` further doublings are tried
/// before giving up.
struct QuadratureSpec {
  int hermite_nodes = 32;
  int laguerre_nodes = 64;
  int phase_nodes = 1;
  double prune = 1e-20;
  int max_refinements = 3;

  QuadratureSpec doubled() const {
    return {2 * hermite_nodes, 2 * laguerre_nodes, phase_nodes, prune, max_refinements};
  }
};

/// Convergence gate for the node-doubling check.
inline constexpr double kQuadratureTolerance = 1e-4;

/// One fading state of the outer expectation (h = 1 with weight 1 for AWGN).
struct FadeNode {
  Complex h;
  double weight;
};

/// One point of the inner two-dimensional noise rule (offset in units of sqrt(n0)).
struct NoiseNode {
  Complex offset;
  double weight;  // includes the 1/pi normalization
};

/// Expanded node set. A node is a (fade, conditioning symbol, noise) triple;
/// noise node lists are stored per fade node because pruning depends on the
/// fade weight.
struct QuadratureGrid {
  std::vector<FadeNode> fades;
  std::vector<std::vector<NoiseNode>> noise;  // noise[f]
};

QuadratureGrid make_grid(const ChannelModel& ch, const QuadratureSpec& spec);

}  // namespace pbicm
