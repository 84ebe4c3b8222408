#include "pbicm/tables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pbicm/subchannel.hpp"

namespace pbicm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kDiscreteBlock = 256;
constexpr std::size_t kReduceChunk = 4096;

// Enumerates the node set of (channel, constellation, spec) in blocks.
class NodeSet {
 public:
  NodeSet(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec) : ch_(ch), cons_(cons) {
    check_compatible(ch, cons);
    if (ch.is_discrete()) {
      const DmcMatrix& m = ch.dmc();
      for (std::size_t y = 0; y < m.outputs(); ++y) {
        double mass = 0.0;
        for (std::size_t x = 0; x < m.inputs(); ++x) mass += m(x, y);
        if (mass > 0.0) {
          outputs_.push_back(y);
          mass_.push_back(mass / static_cast<double>(m.inputs()));
        }
      }
      for (std::size_t b = 0; b * kDiscreteBlock < outputs_.size(); ++b) {
        offset_.push_back(b * kDiscreteBlock);
      }
      offset_.push_back(outputs_.size());
    } else {
      grid_ = make_grid(ch, spec);
      sqrt_n0_ = std::sqrt(ch.n0());
      std::size_t acc = 0;
      for (std::size_t f = 0; f < grid_.fades.size(); ++f) {
        for (std::size_t c = 0; c < cons.size(); ++c) {
          offset_.push_back(acc);
          acc += grid_.noise[f].size();
        }
      }
      offset_.push_back(acc);
    }
  }

  std::size_t blocks() const { return offset_.size() - 1; }
  std::size_t offset(std::size_t block) const { return offset_[block]; }
  std::size_t total() const { return offset_.back(); }

  // fn(index_within_block, weight, output)
  template <class Fn>
  void visit(std::size_t block, Fn&& fn) const {
    const std::size_t count = offset_[block + 1] - offset_[block];
    if (ch_.is_discrete()) {
      for (std::size_t k = 0; k < count; ++k) {
        ChannelOutput out;
        out.index = outputs_[offset_[block] + k];
        fn(k, mass_[offset_[block] + k], out);
      }
      return;
    }
    const std::size_t m = cons_.size();
    const std::size_t f = block / m;
    const std::size_t c = block % m;
    const FadeNode& fade = grid_.fades[f];
    const Complex centre = fade.h * cons_.point(c);
    const double base_weight = fade.weight / static_cast<double>(m);
    const auto& noise = grid_.noise[f];
    for (std::size_t k = 0; k < count; ++k) {
      ChannelOutput out;
      out.h = fade.h;
      out.y = centre + sqrt_n0_ * noise[k].offset;
      fn(k, base_weight * noise[k].weight, out);
    }
  }

 private:
  const ChannelModel& ch_;
  const Constellation& cons_;
  QuadratureGrid grid_;
  double sqrt_n0_ = 0.0;
  std::vector<std::size_t> outputs_;
  std::vector<double> mass_;
  std::vector<std::size_t> offset_;
};

// Turns per-node log-likelihoods into log ratios for the full channel and
// for every binary sub-channel.
class RatioMap {
 public:
  explicit RatioMap(const Constellation& cons)
      : m_(cons.size()), levels_(cons.bits_per_symbol()), with_bit_(2 * static_cast<std::size_t>(levels_)) {
    for (int s = 0; s < levels_; ++s) {
      for (std::size_t x = 0; x < m_; ++x) {
        with_bit_[static_cast<std::size_t>(s) * 2 + cons.label_bit(x, s)].push_back(x);
      }
    }
    log_half_share_ = std::log(2.0 / static_cast<double>(m_));
  }

  int levels() const { return levels_; }

  // ll -> lr in place.
  void normalize(std::span<double> ll) const {
    double mx = kNegInf;
    for (double v : ll) mx = std::max(mx, v);
    double s = 0.0;
    for (double v : ll) s += std::exp(v - mx);
    const double shift = mx + std::log(s / static_cast<double>(m_));
    for (double& v : ll) v -= shift;
  }

  // Binary log ratios of sub-channel s from the full log ratios.
  void sub(std::span<const double> lr, int s, double out[2]) const {
    for (int b = 0; b < 2; ++b) {
      out[b] = log_sum_exp(lr, with_bit_[static_cast<std::size_t>(s) * 2 + b]) + log_half_share_;
    }
  }

 private:
  std::size_t m_;
  int levels_;
  std::vector<std::vector<std::size_t>> with_bit_;
  double log_half_share_ = 0.0;
};

// (1/K) sum r, r ln r, r (ln r)^2 contributions.
inline void add_moments(std::span<const double> lr, double weight, InfoMoments& acc) {
  double m1 = 0.0;
  double m2 = 0.0;
  for (double l : lr) {
    if (l == kNegInf) continue;
    const double r = std::exp(l);
    m1 += r * l;
    m2 += r * l * l;
  }
  const double k = static_cast<double>(lr.size());
  acc.mean += weight * m1 / k;
  acc.second += weight * m2 / k;
}

// (mean_x r_x^a)^(1/a) from log ratios.
inline double gallager_node(const double* lr, std::size_t k, double a, double log_k) {
  double hi = kNegInf;
  for (std::size_t x = 0; x < k; ++x) hi = std::max(hi, lr[x]);
  double s = 0.0;
  for (std::size_t x = 0; x < k; ++x) s += std::exp(a * (lr[x] - hi));
  return std::exp(hi + (std::log(s) - log_k) / a);
}

}  // namespace

std::size_t node_count(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec) {
  return NodeSet(ch, cons, spec).total();
}

TableSet build_tables(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec,
                      bool with_full) {
  const NodeSet nodes(ch, cons, spec);
  const RatioMap ratios(cons);
  const std::size_t m = cons.size();
  const std::size_t total = nodes.total();
  const int levels = ratios.levels();

  TableSet set;
  if (with_full) {
    set.full.inputs = m;
    set.full.weight.resize(total);
    set.full.log_ratio.resize(total * m);
  }
  set.sub.resize(static_cast<std::size_t>(levels));
  for (auto& t : set.sub) {
    t.inputs = 2;
    t.weight.resize(total);
    t.log_ratio.resize(total * 2);
  }

  const auto blocks = static_cast<std::ptrdiff_t>(nodes.blocks());
#pragma omp parallel
  {
    std::vector<double> ll(m);
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
      const std::size_t base = nodes.offset(static_cast<std::size_t>(b));
      nodes.visit(static_cast<std::size_t>(b), [&](std::size_t k, double w, const ChannelOutput& out) {
        const std::size_t j = base + k;
        log_likelihoods(ch, cons, out, ll);
        ratios.normalize(ll);
        if (with_full) {
          set.full.weight[j] = w;
          std::copy(ll.begin(), ll.end(), set.full.log_ratio.begin() + static_cast<std::ptrdiff_t>(j * m));
        }
        for (int s = 0; s < levels; ++s) {
          auto& t = set.sub[static_cast<std::size_t>(s)];
          t.weight[j] = w;
          ratios.sub(ll, s, t.log_ratio.data() + 2 * j);
        }
      });
    }
  }
  return set;
}

ChannelMoments accumulate_moments(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec) {
  const NodeSet nodes(ch, cons, spec);
  const RatioMap ratios(cons);
  const std::size_t m = cons.size();
  const int levels = ratios.levels();
  const std::size_t stride = 1 + static_cast<std::size_t>(levels);
  const auto blocks = static_cast<std::ptrdiff_t>(nodes.blocks());
  std::vector<InfoMoments> partial(static_cast<std::size_t>(blocks) * stride);

#pragma omp parallel
  {
    std::vector<double> ll(m);
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
      InfoMoments* acc = partial.data() + static_cast<std::size_t>(b) * stride;
      nodes.visit(static_cast<std::size_t>(b), [&](std::size_t, double w, const ChannelOutput& out) {
        log_likelihoods(ch, cons, out, ll);
        ratios.normalize(ll);
        add_moments(ll, w, acc[0]);
        for (int s = 0; s < levels; ++s) {
          double lr[2];
          ratios.sub(ll, s, lr);
          add_moments(lr, w, acc[1 + s]);
        }
      });
    }
  }

  ChannelMoments result;
  result.sub.resize(static_cast<std::size_t>(levels));
  for (std::size_t b = 0; b < static_cast<std::size_t>(blocks); ++b) {
    const InfoMoments* acc = partial.data() + b * stride;
    result.full.mean += acc[0].mean;
    result.full.second += acc[0].second;
    for (std::size_t s = 0; s < static_cast<std::size_t>(levels); ++s) {
      result.sub[s].mean += acc[1 + s].mean;
      result.sub[s].second += acc[1 + s].second;
    }
  }
  return result;
}

double gallager_sum(const WeightedTable& t, double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("rho must be >= 0");
  const double a = 1.0 / (1.0 + rho);
  const std::size_t n = t.nodes();
  const std::size_t k = t.inputs;
  const auto chunks = static_cast<std::ptrdiff_t>((n + kReduceChunk - 1) / kReduceChunk);
  const double log_k = std::log(static_cast<double>(k));
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kReduceChunk;
    const std::size_t end = std::min(n, begin + kReduceChunk);
    double acc = 0.0;
    if (k == 2) {
      for (std::size_t j = begin; j < end; ++j) {
        const double l0 = t.log_ratio[2 * j];
        const double l1 = t.log_ratio[2 * j + 1];
        const double hi = std::max(l0, l1);
        const double lo = std::min(l0, l1);
        // (1/2 (r0^a + r1^a))^(1/a) = r_hi * (1/2 (1 + (r_lo/r_hi)^a))^(1/a)
        acc += t.weight[j] * std::exp(hi + (std::log1p(std::exp(a * (lo - hi))) - log_k) / a);
      }
    } else {
      for (std::size_t j = begin; j < end; ++j) acc += t.weight[j] * gallager_node(t.row(j), k, a, log_k);
    }
    partial[static_cast<std::size_t>(c)] = acc;
  }
  double sum = 0.0;
  for (double p : partial) sum += p;
  return sum;
}

double streamed_gallager_sum(const ChannelModel& ch, const Constellation& cons, const QuadratureSpec& spec,
                             double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("rho must be >= 0");
  const NodeSet nodes(ch, cons, spec);
  const RatioMap ratios(cons);
  const std::size_t m = cons.size();
  const double a = 1.0 / (1.0 + rho);
  const double log_k = std::log(static_cast<double>(m));
  const auto blocks = static_cast<std::ptrdiff_t>(nodes.blocks());
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel
  {
    std::vector<double> ll(m);
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
      double acc = 0.0;
      nodes.visit(static_cast<std::size_t>(b), [&](std::size_t, double w, const ChannelOutput& out) {
        log_likelihoods(ch, cons, out, ll);
        ratios.normalize(ll);
        acc += w * gallager_node(ll.data(), m, a, log_k);
      });
      partial[static_cast<std::size_t>(b)] = acc;
    }
  }
  double sum = 0.0;
  for (double p : partial) sum += p;
  return sum;
}

InfoMoments table_moments(const WeightedTable& t) {
  InfoMoments acc;
  for (std::size_t j = 0; j < t.nodes(); ++j) {
    add_moments(std::span<const double>(t.row(j), t.inputs), t.weight[j], acc);
  }
  return acc;
}

}  // namespace pbicm
