#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pbicm {

using Complex = std::complex<double>;

enum class ConstellationKind { Bpsk, Qpsk, Psk8, Qam16, Qam64 };
enum class Labeling { Gray };

/// A labeled signal set with 2^L points and unit average energy.
///
/// Points are addressed by a point index (0..2^L-1). A label is an L-bit
/// integer whose most significant bit is the first bit of the label string
/// b_1..b_L handed to the mapper. For discrete channels the point index is
/// also the row index of the transition matrix, so the complex coordinates
/// only matter for the Gaussian channel models.
class Constellation {
 public:
  /// `point_of_label[label]` is the point index the mapper emits for `label`.
  Constellation(std::string name, std::vector<Complex> points,
                std::vector<std::uint32_t> point_of_label);

  int bits_per_symbol() const { return bits_; }
  std::size_t size() const { return points_.size(); }
  const std::string& name() const { return name_; }

  std::span<const Complex> points() const { return points_; }
  Complex point(std::size_t index) const { return points_[index]; }

  std::uint32_t point_of_label(std::uint32_t label) const { return point_of_label_[label]; }
  std::uint32_t label_of_point(std::size_t index) const { return label_of_point_[index]; }

  /// Bit `position` (0 = first label bit) of the label carried by point `index`.
  int label_bit(std::size_t index, int position) const {
    return static_cast<int>((label_of_point_[index] >> (bits_ - 1 - position)) & 1u);
  }

  double average_energy() const;

 private:
  std::string name_;
  int bits_ = 0;
  std::vector<Complex> points_;
  std::vector<std::uint32_t> point_of_label_;
  std::vector<std::uint32_t> label_of_point_;
};

Constellation make_constellation(ConstellationKind kind, Labeling labeling = Labeling::Gray);

ConstellationKind parse_constellation_kind(std::string_view name);
std::string_view to_string(ConstellationKind kind);

/// Packs an L-bit string (first bit most significant) into a label.
std::uint32_t pack_label(std::span<const std::uint8_t> bits);

/// The mapper: point index for an L-bit label string.
std::size_t map_bits_index(const Constellation& c, std::span<const std::uint8_t> bits);

/// The mapper: channel symbol for an L-bit label string.
Complex map_bits(const Constellation& c, std::span<const std::uint8_t> bits);

/// Reflected binary Gray code of `i`.
constexpr std::uint32_t gray_code(std::uint32_t i) { return i ^ (i >> 1); }

}  // namespace pbicm
