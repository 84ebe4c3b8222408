#include "pbicm/reference.hpp"

#include <cmath>
#include <stdexcept>

#include "pbicm/subchannel.hpp"

namespace pbicm::reference {

namespace {

// fn(weight, output) for every (fade, symbol, noise) node or discrete output.
template <class Fn>
void for_each_node(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec, Fn&& fn) {
  check_compatible(ch, cons);
  const double m = static_cast<double>(cons.size());
  if (ch.is_discrete()) {
    const DmcMatrix& w = ch.dmc();
    for (std::size_t y = 0; y < w.outputs(); ++y) {
      double mass = 0.0;
      for (std::size_t x = 0; x < w.inputs(); ++x) mass += w(x, y);
      if (mass <= 0.0) continue;
      ChannelOutput out;
      out.index = y;
      fn(mass / m, out);
    }
    return;
  }
  const QuadratureGrid grid = make_grid(ch, spec);
  const double sq = std::sqrt(ch.n0());
  for (std::size_t f = 0; f < grid.fades.size(); ++f) {
    for (std::size_t c = 0; c < cons.size(); ++c) {
      for (const NoiseNode& nz : grid.noise[f]) {
        ChannelOutput out;
        out.h = grid.fades[f].h;
        out.y = out.h * cons.point(c) + sq * nz.offset;
        fn(grid.fades[f].weight * nz.weight / m, out);
      }
    }
  }
}

// Node weights are relative to the mixture density, so each term is divided by it.
void add(const std::vector<double>& lik, double mix, double weight, InfoMoments& acc) {
  for (double l : lik) {
    if (l <= 0.0) continue;
    const double r = l / mix;
    acc.mean += weight * r * std::log(r) / static_cast<double>(lik.size());
    acc.second += weight * r * std::log(r) * std::log(r) / static_cast<double>(lik.size());
  }
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double gallager_term(const std::vector<double>& lik, double mix, double weight, double rho) {
  double s = 0.0;
  for (double l : lik) s += std::pow(l / mix, 1.0 / (1.0 + rho));
  return weight * std::pow(s / static_cast<double>(lik.size()), 1.0 + rho);
}

std::vector<double> likelihoods(const ChannelModel& ch, const Constellation& cons, const ChannelOutput& out) {
  std::vector<double> lik(cons.size());
  for (std::size_t x = 0; x < cons.size(); ++x) lik[x] = density(ch, out, input_of(cons, x));
  return lik;
}

}  // namespace

ChannelMoments moments(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec) {
  const int levels = cons.bits_per_symbol();
  ChannelMoments r;
  r.sub.resize(static_cast<std::size_t>(levels));
  for_each_node(ch, cons, spec, [&](double w, const ChannelOutput& out) {
    const auto lik = likelihoods(ch, cons, out);
    const double mix = mean(lik);
    add(lik, mix, w, r.full);
    for (int s = 0; s < levels; ++s) {
      const std::vector<double> b{subchannel_prob(ch, cons, s, out, 0), subchannel_prob(ch, cons, s, out, 1)};
      add(b, mix, w, r.sub[static_cast<std::size_t>(s)]);
    }
  });
  return r;
}

double gallager_sum_full(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec, double rho) {
  double sum = 0.0;
  for_each_node(ch, cons, spec, [&](double w, const ChannelOutput& out) {
    const auto lik = likelihoods(ch, cons, out);
    sum += gallager_term(lik, mean(lik), w, rho);
  });
  return sum;
}

double gallager_sum_subchannel(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec, int s,
                               double rho) {
  double sum = 0.0;
  for_each_node(ch, cons, spec, [&](double w, const ChannelOutput& out) {
    const double mix = mean(likelihoods(ch, cons, out));
    const std::vector<double> b{subchannel_prob(ch, cons, s, out, 0), subchannel_prob(ch, cons, s, out, 1)};
    sum += gallager_term(b, mix, w, rho);
  });
  return sum;
}

SimulationResult simulate(const PbicmSimConfig& cfg) {
  if (cfg.trials == 0) throw std::invalid_argument("trials must be >= 1");
  SimulationCounters total;
  for (std::size_t b = 0; b * kTrialsPerStream < cfg.trials; ++b) total.merge(simulate_block(cfg, b));
  return finalize(cfg, total);
}

}  // namespace pbicm::reference
