#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "pbicm/constellation.hpp"
#include "pbicm/rng.hpp"

namespace pbicm {

/// Es/N0 in decibels for a unit-energy constellation.
struct Snr {
  double value_db = 0.0;
};

/// Row-stochastic transition matrix; rows are inputs (point indices).
class DmcMatrix {
 public:
  DmcMatrix() = default;
  DmcMatrix(std::size_t inputs, std::size_t outputs, std::vector<double> row_major);

  std::size_t inputs() const { return inputs_; }
  std::size_t outputs() const { return outputs_; }
  double operator()(std::size_t x, std::size_t y) const { return p_[x * outputs_ + y]; }
  std::span<const double> row(std::size_t x) const { return {p_.data() + x * outputs_, outputs_}; }
  std::span<const double> data() const { return p_; }

 private:
  std::size_t inputs_ = 0;
  std::size_t outputs_ = 0;
  std::vector<double> p_;
};

struct Awgn {
  double n0 = 1.0;
};

/// Flat Rayleigh fading with the fading coefficient known at the receiver.
struct RayleighCsi {
  double n0 = 1.0;
};

enum class ChannelKind { Dmc, Awgn, RayleighCsi };

/// Channel input: the point index (used by the discrete model) together with
/// its complex coordinates (used by the Gaussian models).
struct ChannelInput {
  std::size_t index = 0;
  Complex point{};
};

/// Channel output. `index` is meaningful for the discrete model, `y` for the
/// Gaussian models and `h` for the fading model (1 otherwise).
struct ChannelOutput {
  std::size_t index = 0;
  Complex y{};
  Complex h{1.0, 0.0};
};

class ChannelModel {
 public:
  using Variant = std::variant<DmcMatrix, Awgn, RayleighCsi>;

  explicit ChannelModel(DmcMatrix m) : v_(std::move(m)) {}
  explicit ChannelModel(Awgn a) : v_(a) {}
  explicit ChannelModel(RayleighCsi r) : v_(r) {}

  ChannelKind kind() const { return static_cast<ChannelKind>(v_.index()); }
  bool is_discrete() const { return kind() == ChannelKind::Dmc; }
  const DmcMatrix& dmc() const { return std::get<DmcMatrix>(v_); }
  /// Noise spectral density of the Gaussian models.
  double n0() const;
  const Variant& variant() const { return v_; }

 private:
  Variant v_;
};

constexpr double kMaxSnrDb = 100.0;

/// n0 = 10^(-snr/10); SNR is capped at 100 dB.
double noise_density(Snr snr);

ChannelModel awgn_from_snr(Snr snr);
ChannelModel rayleigh_from_snr(Snr snr);
ChannelModel make_dmc(std::size_t inputs, std::size_t outputs, std::vector<double> row_major);

/// Draws one output from w(.|x).
ChannelOutput sample(const ChannelModel& ch, const ChannelInput& x, Rng& rng);

/// w(y|x); for the fading model conditioned on the observed h.
double density(const ChannelModel& ch, const ChannelOutput& y, const ChannelInput& x);

/// log w(y|x) for every point of `c`, up to an additive constant shared by
/// all points (the Gaussian normalization is dropped). -inf marks zero mass.
void log_likelihoods(const ChannelModel& ch, const Constellation& c, const ChannelOutput& y,
                     std::span<double> out);

/// Checks that the channel's input alphabet matches the constellation.
void check_compatible(const ChannelModel& ch, const Constellation& c);

inline ChannelInput input_of(const Constellation& c, std::size_t index) { return {index, c.point(index)}; }

}  // namespace pbicm
