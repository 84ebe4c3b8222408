#pragma once

#include <span>
#include <vector>

#include "pbicm/channel.hpp"
#include "pbicm/constellation.hpp"

namespace pbicm {

/// Saturation magnitude for LLRs (natural log units).
inline constexpr double kLlrMax = 700.0;

/// Binary sub-channel W_i seen by label bit `position` (0-based) when every
/// other label bit is i.i.d. equiprobable.
class SubchannelView {
 public:
  SubchannelView(const ChannelModel& base, const Constellation& cons, int position);

  const ChannelModel& base() const { return *base_; }
  const Constellation& constellation() const { return *cons_; }
  int position() const { return position_; }

  /// W_i(y|b): average of w(y|mu(...)) over the 2^(L-1) completions.
  double prob(const ChannelOutput& y, int bit) const;

  /// ln W_i(y|0)/W_i(y|1), clamped to +-kLlrMax.
  double llr(const ChannelOutput& y) const;

 private:
  const ChannelModel* base_;
  const Constellation* cons_;
  int position_;
};

/// Output of the dithered state channel: base output, state s (0-based
/// label position) and dither bit d.
struct WbarOutput {
  ChannelOutput y;
  int state = 0;
  int dither = 0;
};

double subchannel_prob(const ChannelModel& base, const Constellation& cons, int position,
                       const ChannelOutput& y, int bit);

/// Natural-log LLR of label bit `position`. Throws std::domain_error when both
/// hypotheses have zero probability at y.
double llr_bit(const ChannelModel& base, const Constellation& cons, int position, const ChannelOutput& y);

/// (-1)^d * llr_bit(s, y).
double llr_wbar(const ChannelModel& base, const Constellation& cons, const WbarOutput& out);

/// Explicit transition matrix of the dithered state channel for a discrete
/// base. Output index is (y * L + s) * 2 + d; entry (1/(2L)) W_s(y | b xor d).
DmcMatrix wbar_as_dmc(const ChannelModel& base, const Constellation& cons);

inline std::size_t wbar_output_index(std::size_t y, int state, int dither, int levels) {
  return (y * static_cast<std::size_t>(levels) + static_cast<std::size_t>(state)) * 2 + static_cast<std::size_t>(dither);
}

/// Computes every label-bit LLR of one received symbol at once. Reused by the
/// receiver, which needs all L values per channel use.
class Demapper {
 public:
  Demapper(const ChannelModel& base, const Constellation& cons);

  const Constellation& constellation() const { return *cons_; }

  /// out[p] = ln W_p(y|0)/W_p(y|1) for p = 0..L-1.
  void llrs(const ChannelOutput& y, std::span<double> out) const;

 private:
  const ChannelModel* base_;
  const Constellation* cons_;
  // points_with_bit_[(p * 2 + b)] lists the point indices whose label has bit p equal to b.
  std::vector<std::vector<std::size_t>> points_with_bit_;
  mutable std::vector<double> scratch_;
};

/// Log-sum-exp of values[idx] over idx; -inf for an empty or all -inf set.
double log_sum_exp(std::span<const double> values, std::span<const std::size_t> idx);

/// ln(a/b) from log-domain numerator and denominator with the LLR clamp.
double clamped_llr(double log_num, double log_den);

}  // namespace pbicm
