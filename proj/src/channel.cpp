#include "pbicm/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pbicm {

DmcMatrix::DmcMatrix(std::size_t inputs, std::size_t outputs, std::vector<double> row_major)
    : inputs_(inputs), outputs_(outputs), p_(std::move(row_major)) {
  if (inputs == 0 || outputs == 0) throw std::invalid_argument("empty transition matrix");
  if (p_.size() != inputs * outputs) throw std::invalid_argument("transition matrix has wrong size");
  for (std::size_t x = 0; x < inputs; ++x) {
    double sum = 0.0;
    for (double v : row(x)) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("transition probabilities must be finite and >= 0");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("transition matrix rows must sum to 1");
  }
}

double ChannelModel::n0() const {
  if (const auto* a = std::get_if<Awgn>(&v_)) return a->n0;
  if (const auto* r = std::get_if<RayleighCsi>(&v_)) return r->n0;
  throw std::logic_error("discrete channel has no noise density");
}

double noise_density(Snr snr) {
  if (std::isnan(snr.value_db)) throw std::invalid_argument("SNR must not be NaN");
  const double db = std::min(snr.value_db, kMaxSnrDb);
  return std::pow(10.0, -db / 10.0);
}

ChannelModel awgn_from_snr(Snr snr) { return ChannelModel(Awgn{noise_density(snr)}); }

ChannelModel rayleigh_from_snr(Snr snr) { return ChannelModel(RayleighCsi{noise_density(snr)}); }

ChannelModel make_dmc(std::size_t inputs, std::size_t outputs, std::vector<double> row_major) {
  return ChannelModel(DmcMatrix(inputs, outputs, std::move(row_major)));
}

namespace {

Complex complex_gaussian(double variance, Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

double gaussian_density(Complex y, Complex mean, double n0) {
  return std::exp(-std::norm(y - mean) / n0) / (std::numbers::pi * n0);
}

}  // namespace

ChannelOutput sample(const ChannelModel& ch, const ChannelInput& x, Rng& rng) {
  ChannelOutput out;
  switch (ch.kind()) {
    case ChannelKind::Dmc: {
      const DmcMatrix& m = ch.dmc();
      if (x.index >= m.inputs()) throw std::out_of_range("input outside the channel alphabet");
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      double acc = 0.0;
      std::size_t y = 0;
      const auto row = m.row(x.index);
      // Inverse CDF; the last positive entry absorbs rounding.
      std::size_t last = 0;
      for (; y < row.size(); ++y) {
        if (row[y] > 0.0) last = y;
        acc += row[y];
        if (u < acc && row[y] > 0.0) break;
      }
      out.index = y < row.size() ? y : last;
      return out;
    }
    case ChannelKind::Awgn:
      out.y = x.point + complex_gaussian(ch.n0(), rng);
      return out;
    case ChannelKind::RayleighCsi:
      out.h = complex_gaussian(1.0, rng);
      out.y = out.h * x.point + complex_gaussian(ch.n0(), rng);
      return out;
  }
  return out;
}

double density(const ChannelModel& ch, const ChannelOutput& y, const ChannelInput& x) {
  switch (ch.kind()) {
    case ChannelKind::Dmc: {
      const DmcMatrix& m = ch.dmc();
      if (x.index >= m.inputs() || y.index >= m.outputs()) throw std::out_of_range("symbol outside the channel alphabet");
      return m(x.index, y.index);
    }
    case ChannelKind::Awgn: return gaussian_density(y.y, x.point, ch.n0());
    case ChannelKind::RayleighCsi: return gaussian_density(y.y, y.h * x.point, ch.n0());
  }
  return 0.0;
}

void log_likelihoods(const ChannelModel& ch, const Constellation& c, const ChannelOutput& y,
                     std::span<double> out) {
  const std::size_t m = c.size();
  if (ch.is_discrete()) {
    const DmcMatrix& d = ch.dmc();
    if (y.index >= d.outputs()) throw std::out_of_range("output outside the channel alphabet");
    for (std::size_t x = 0; x < m; ++x) {
      const double p = d(x, y.index);
      out[x] = p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    }
    return;
  }
  const double inv_n0 = 1.0 / ch.n0();
  const auto points = c.points();
  for (std::size_t x = 0; x < m; ++x) out[x] = -std::norm(y.y - y.h * points[x]) * inv_n0;
}

void check_compatible(const ChannelModel& ch, const Constellation& c) {
  if (ch.is_discrete() && ch.dmc().inputs() != c.size()) {
    throw std::invalid_argument("transition matrix rows must equal the constellation size");
  }
}

}  // namespace pbicm
