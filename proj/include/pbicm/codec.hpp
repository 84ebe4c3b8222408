#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pbicm/channel.hpp"
#include "pbicm/constellation.hpp"
#include "pbicm/rng.hpp"
#include "pbicm/subchannel.hpp"

namespace pbicm {

/// Dense row-major matrix; rows are code levels, columns channel uses.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using BitMatrix = Matrix<std::uint8_t>;
using LlrMatrix = Matrix<double>;

enum class CodeKind { Repetition, Hamming74, RandomCodebook };

inline constexpr std::size_t kMaxCodewords = std::size_t{1} << 16;

/// Binary block code with an explicit codebook (ML decoding is exhaustive).
class BinaryCode {
 public:
  static BinaryCode repetition(std::size_t n);
  static BinaryCode hamming74();
  static BinaryCode random_codebook(std::size_t n, std::size_t m, std::uint64_t seed);

  CodeKind kind() const { return kind_; }
  std::size_t length() const { return n_; }
  std::size_t size() const { return m_; }
  std::uint64_t seed() const { return seed_; }
  /// log2(M) / n
  double rate() const;
  /// Information bits per message, ceil(log2 M).
  int message_bits() const;

  std::span<const std::uint8_t> codeword(std::size_t message) const;

 private:
  BinaryCode(CodeKind kind, std::size_t n, std::size_t m, std::vector<std::uint8_t> book, std::uint64_t seed = 0);

  CodeKind kind_;
  std::size_t n_;
  std::size_t m_;
  std::vector<std::uint8_t> book_;
  std::uint64_t seed_;
};

std::string to_string(const BinaryCode& code);

/// ML decision for a binary-input memoryless channel given LLRs: argmax over
/// codewords of sum_j (1 - 2 c_j) z_j, lowest index on ties.
std::size_t ml_decode(const BinaryCode& code, std::span<const double> llr);

/// Common randomness shared by encoder and decoder: per-position cyclic
/// shifts s_k in 0..L-1 and the L x n dither matrix.
struct PbicmState {
  std::vector<std::uint8_t> shifts;
  BitMatrix dither;

  int levels() const { return static_cast<int>(dither.rows()); }
  std::size_t length() const { return shifts.size(); }

  static PbicmState draw(int levels, std::size_t n, Rng& rng);
};

/// Column k is cyclically shifted by s_k: row l of the output column is row
/// (l + s_k) mod L of the input. s_k = 0 leaves the column unchanged.
BitMatrix interleave(const BitMatrix& b, std::span<const std::uint8_t> shifts);

/// Point index of every column of an interleaved matrix.
std::vector<std::size_t> map_columns(const Constellation& c, const BitMatrix& interleaved);

/// Inverse column shifts of interleave.
LlrMatrix deinterleave(const LlrMatrix& z, std::span<const std::uint8_t> shifts);

std::vector<std::uint8_t> apply_dither(std::span<const std::uint8_t> bits, std::span<const std::uint8_t> dither);

/// z_j = z'_j (1 - 2 d_j).
std::vector<double> remove_dither_llr(std::span<const double> llr, std::span<const std::uint8_t> dither);

enum class DitherMode {
  Enabled,            // dither at both ends
  Disabled,           // no dither anywhere
  SkipAtTransmitter,  // fault injection: receiver still removes the dither
};

/// Encode each level, dither, interleave, map and pass n symbols through the channel.
std::vector<ChannelOutput> pbicm_transmit(std::span<const std::size_t> messages, const BinaryCode& code,
                                          const PbicmState& state, const ChannelModel& base,
                                          const Constellation& cons, Rng& rng,
                                          DitherMode mode = DitherMode::Enabled);

/// Decoder-input LLRs: demap at every position, de-interleave, remove dither.
LlrMatrix pbicm_receive_llrs(std::span<const ChannelOutput> y, const PbicmState& state, const ChannelModel& base,
                             const Constellation& cons, DitherMode mode = DitherMode::Enabled);

std::vector<std::size_t> pbicm_receive(std::span<const ChannelOutput> y, const PbicmState& state,
                                       const BinaryCode& code, const ChannelModel& base, const Constellation& cons,
                                       DitherMode mode = DitherMode::Enabled);

/// One use of the dithered state channel: draws s and d, sends b xor d through
/// W_s (other label bits uniform) and returns the output with its LLR.
struct WbarSample {
  WbarOutput out;
  double llr = 0.0;
};
WbarSample sample_wbar(int bit, const ChannelModel& base, const Constellation& cons, Rng& rng);

}  // namespace pbicm
