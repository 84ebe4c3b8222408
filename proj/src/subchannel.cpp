#include "pbicm/subchannel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pbicm {

namespace {

void check_position(const Constellation& cons, int position) {
  if (position < 0 || position >= cons.bits_per_symbol()) throw std::out_of_range("label bit position out of range");
}

thread_local std::vector<double> tl_loglik;
thread_local std::vector<std::size_t> tl_index[2];

}  // namespace

double log_sum_exp(std::span<const double> values, std::span<const std::size_t> idx) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i : idx) m = std::max(m, values[i]);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (std::size_t i : idx) s += std::exp(values[i] - m);
  return m + std::log(s);
}

double clamped_llr(double log_num, double log_den) {
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  if (log_num == ninf && log_den == ninf) throw std::domain_error("output outside channel support");
  if (log_den == ninf) return kLlrMax;
  if (log_num == ninf) return -kLlrMax;
  return std::clamp(log_num - log_den, -kLlrMax, kLlrMax);
}

SubchannelView::SubchannelView(const ChannelModel& base, const Constellation& cons, int position)
    : base_(&base), cons_(&cons), position_(position) {
  check_position(cons, position);
  check_compatible(base, cons);
}

double SubchannelView::prob(const ChannelOutput& y, int bit) const {
  return subchannel_prob(*base_, *cons_, position_, y, bit);
}

double SubchannelView::llr(const ChannelOutput& y) const { return llr_bit(*base_, *cons_, position_, y); }

double subchannel_prob(const ChannelModel& base, const Constellation& cons, int position,
                       const ChannelOutput& y, int bit) {
  check_position(cons, position);
  if (bit != 0 && bit != 1) throw std::invalid_argument("bit must be 0 or 1");
  double sum = 0.0;
  for (std::size_t x = 0; x < cons.size(); ++x) {
    if (cons.label_bit(x, position) == bit) sum += density(base, y, input_of(cons, x));
  }
  return sum / static_cast<double>(cons.size() / 2);
}

double llr_bit(const ChannelModel& base, const Constellation& cons, int position, const ChannelOutput& y) {
  check_position(cons, position);
  auto& ll = tl_loglik;
  ll.resize(cons.size());
  log_likelihoods(base, cons, y, ll);
  for (auto& v : tl_index) v.clear();
  for (std::size_t x = 0; x < cons.size(); ++x) tl_index[cons.label_bit(x, position)].push_back(x);
  return clamped_llr(log_sum_exp(ll, tl_index[0]), log_sum_exp(ll, tl_index[1]));
}

double llr_wbar(const ChannelModel& base, const Constellation& cons, const WbarOutput& out) {
  if (out.dither != 0 && out.dither != 1) throw std::invalid_argument("dither must be 0 or 1");
  const double z = llr_bit(base, cons, out.state, out.y);
  return out.dither ? -z : z;
}

DmcMatrix wbar_as_dmc(const ChannelModel& base, const Constellation& cons) {
  if (!base.is_discrete()) throw std::invalid_argument("explicit matrix requires a discrete base channel");
  check_compatible(base, cons);
  const DmcMatrix& w = base.dmc();
  const int levels = cons.bits_per_symbol();
  const std::size_t outputs = w.outputs() * static_cast<std::size_t>(levels) * 2;
  std::vector<double> p(2 * outputs, 0.0);
  const double half_completions = static_cast<double>(cons.size() / 2);
  for (std::size_t y = 0; y < w.outputs(); ++y) {
    for (int s = 0; s < levels; ++s) {
      double ws[2] = {0.0, 0.0};
      for (std::size_t x = 0; x < cons.size(); ++x) ws[cons.label_bit(x, s)] += w(x, y);
      ws[0] /= half_completions;
      ws[1] /= half_completions;
      for (int b = 0; b < 2; ++b) {
        for (int d = 0; d < 2; ++d) {
          p[static_cast<std::size_t>(b) * outputs + wbar_output_index(y, s, d, levels)] =
              ws[b ^ d] / (2.0 * levels);
        }
      }
    }
  }
  // Rows are 1 up to rounding; renormalize so the matrix passes the strict check.
  for (int b = 0; b < 2; ++b) {
    double sum = 0.0;
    for (std::size_t j = 0; j < outputs; ++j) sum += p[b * outputs + j];
    for (std::size_t j = 0; j < outputs; ++j) p[b * outputs + j] /= sum;
  }
  return DmcMatrix(2, outputs, std::move(p));
}

Demapper::Demapper(const ChannelModel& base, const Constellation& cons)
    : base_(&base), cons_(&cons), points_with_bit_(2 * static_cast<std::size_t>(cons.bits_per_symbol())),
      scratch_(cons.size()) {
  check_compatible(base, cons);
  for (int p = 0; p < cons.bits_per_symbol(); ++p) {
    for (std::size_t x = 0; x < cons.size(); ++x) {
      points_with_bit_[static_cast<std::size_t>(p) * 2 + cons.label_bit(x, p)].push_back(x);
    }
  }
}

void Demapper::llrs(const ChannelOutput& y, std::span<double> out) const {
  log_likelihoods(*base_, *cons_, y, scratch_);
  for (int p = 0; p < cons_->bits_per_symbol(); ++p) {
    const auto& zero = points_with_bit_[static_cast<std::size_t>(p) * 2];
    const auto& one = points_with_bit_[static_cast<std::size_t>(p) * 2 + 1];
    out[static_cast<std::size_t>(p)] = clamped_llr(log_sum_exp(scratch_, zero), log_sum_exp(scratch_, one));
  }
}

}  // namespace pbicm
