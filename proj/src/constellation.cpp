#include "pbicm/constellation.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pbicm {

namespace {

Constellation make_psk(std::string name, int bits, double offset) {
  const std::size_t m = std::size_t{1} << bits;
  std::vector<Complex> points(m);
  std::vector<std::uint32_t> point_of_label(m);
  for (std::size_t k = 0; k < m; ++k) {
    points[k] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m) + offset);
    point_of_label[gray_code(static_cast<std::uint32_t>(k))] = static_cast<std::uint32_t>(k);
  }
  return Constellation(std::move(name), std::move(points), std::move(point_of_label));
}

// Square QAM with independent reflected-Gray labels on each axis. The first
// half of the label selects the in-phase level, the second half quadrature.
Constellation make_square_qam(std::string name, int bits) {
  const int half = bits / 2;
  const std::uint32_t side = 1u << half;
  const std::size_t m = std::size_t{1} << bits;
  const double scale = 1.0 / std::sqrt(2.0 * (static_cast<double>(m) - 1.0) / 3.0);

  std::vector<Complex> points(m);
  std::vector<std::uint32_t> point_of_label(m);
  for (std::uint32_t i = 0; i < side; ++i) {
    for (std::uint32_t q = 0; q < side; ++q) {
      const std::uint32_t index = i * side + q;
      const double re = 2.0 * i - (side - 1.0);
      const double im = 2.0 * q - (side - 1.0);
      points[index] = scale * Complex(re, im);
      point_of_label[(gray_code(i) << half) | gray_code(q)] = index;
    }
  }
  return Constellation(std::move(name), std::move(points), std::move(point_of_label));
}

}  // namespace

Constellation::Constellation(std::string name, std::vector<Complex> points,
                             std::vector<std::uint32_t> point_of_label)
    : name_(std::move(name)), points_(std::move(points)), point_of_label_(std::move(point_of_label)) {
  const std::size_t m = points_.size();
  if (m < 2 || !std::has_single_bit(m)) {
    throw std::invalid_argument("constellation size must be a power of two >= 2");
  }
  if (point_of_label_.size() != m) {
    throw std::invalid_argument("labeling size does not match constellation size");
  }
  bits_ = std::countr_zero(m);
  label_of_point_.assign(m, m);
  for (std::uint32_t label = 0; label < m; ++label) {
    const std::uint32_t index = point_of_label_[label];
    if (index >= m || label_of_point_[index] != m) {
      throw std::invalid_argument("labeling is not a bijection");
    }
    label_of_point_[index] = label;
  }
}

double Constellation::average_energy() const {
  double e = 0.0;
  for (const Complex& p : points_) e += std::norm(p);
  return e / static_cast<double>(points_.size());
}

Constellation make_constellation(ConstellationKind kind, Labeling labeling) {
  if (labeling != Labeling::Gray) throw std::invalid_argument("unsupported labeling");
  switch (kind) {
    case ConstellationKind::Bpsk: return make_psk("BPSK", 1, 0.0);
    case ConstellationKind::Qpsk: return make_psk("QPSK", 2, std::numbers::pi / 4.0);
    case ConstellationKind::Psk8: return make_psk("8PSK", 3, 0.0);
    case ConstellationKind::Qam16: return make_square_qam("16QAM", 4);
    case ConstellationKind::Qam64: return make_square_qam("64QAM", 6);
  }
  throw std::invalid_argument("unsupported constellation kind");
}

ConstellationKind parse_constellation_kind(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::toupper(ch); });
  if (s == "BPSK") return ConstellationKind::Bpsk;
  if (s == "QPSK" || s == "4PSK") return ConstellationKind::Qpsk;
  if (s == "8PSK" || s == "PSK8") return ConstellationKind::Psk8;
  if (s == "16QAM" || s == "QAM16") return ConstellationKind::Qam16;
  if (s == "64QAM" || s == "QAM64") return ConstellationKind::Qam64;
  throw std::invalid_argument("unknown constellation: " + std::string(name));
}

std::string_view to_string(ConstellationKind kind) {
  switch (kind) {
    case ConstellationKind::Bpsk: return "BPSK";
    case ConstellationKind::Qpsk: return "QPSK";
    case ConstellationKind::Psk8: return "8PSK";
    case ConstellationKind::Qam16: return "16QAM";
    case ConstellationKind::Qam64: return "64QAM";
  }
  return "?";
}

std::uint32_t pack_label(std::span<const std::uint8_t> bits) {
  std::uint32_t label = 0;
  for (std::uint8_t b : bits) {
    if (b > 1) throw std::invalid_argument("label bits must be 0 or 1");
    label = (label << 1) | b;
  }
  return label;
}

std::size_t map_bits_index(const Constellation& c, std::span<const std::uint8_t> bits) {
  if (bits.size() != static_cast<std::size_t>(c.bits_per_symbol())) {
    throw std::invalid_argument("bit string length does not match bits per symbol");
  }
  return c.point_of_label(pack_label(bits));
}

Complex map_bits(const Constellation& c, std::span<const std::uint8_t> bits) {
  return c.point(map_bits_index(c, bits));
}

}  // namespace pbicm
