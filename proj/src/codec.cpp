#include "pbicm/codec.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pbicm/subchannel.hpp"

namespace pbicm {

BinaryCode::BinaryCode(CodeKind kind, std::size_t n, std::size_t m, std::vector<std::uint8_t> book,
                       std::uint64_t seed)
    : kind_(kind), n_(n), m_(m), book_(std::move(book)), seed_(seed) {}

BinaryCode BinaryCode::repetition(std::size_t n) {
  if (n == 0) throw std::invalid_argument("repetition length must be >= 1");
  std::vector<std::uint8_t> book(2 * n, 0);
  std::fill(book.begin() + static_cast<std::ptrdiff_t>(n), book.end(), 1);
  return {CodeKind::Repetition, n, 2, std::move(book)};
}

BinaryCode BinaryCode::hamming74() {
  // Systematic: d1 d2 d3 d4 p1 p2 p3 with p1 = d1^d2^d4, p2 = d1^d3^d4, p3 = d2^d3^d4.
  std::vector<std::uint8_t> book;
  book.reserve(16 * 7);
  for (unsigned m = 0; m < 16; ++m) {
    const std::uint8_t d1 = (m >> 3) & 1, d2 = (m >> 2) & 1, d3 = (m >> 1) & 1, d4 = m & 1;
    for (std::uint8_t v : {d1, d2, d3, d4, static_cast<std::uint8_t>(d1 ^ d2 ^ d4),
                           static_cast<std::uint8_t>(d1 ^ d3 ^ d4), static_cast<std::uint8_t>(d2 ^ d3 ^ d4)}) {
      book.push_back(v);
    }
  }
  return {CodeKind::Hamming74, 7, 16, std::move(book)};
}

BinaryCode BinaryCode::random_codebook(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("code length must be >= 1");
  if (m < 2 || m > kMaxCodewords) throw std::invalid_argument("codebook size must lie in [2, 65536]");
  Rng rng = make_stream(seed, 0);
  std::vector<std::uint8_t> book(n * m);
  for (auto& b : book) b = static_cast<std::uint8_t>(rng() >> 63);
  return {CodeKind::RandomCodebook, n, m, std::move(book), seed};
}

double BinaryCode::rate() const { return std::log2(static_cast<double>(m_)) / static_cast<double>(n_); }

int BinaryCode::message_bits() const { return static_cast<int>(std::bit_width(m_ - 1)); }

std::span<const std::uint8_t> BinaryCode::codeword(std::size_t message) const {
  if (message >= m_) throw std::out_of_range("message index out of range");
  return {book_.data() + message * n_, n_};
}

std::string to_string(const BinaryCode& code) {
  switch (code.kind()) {
    case CodeKind::Repetition: return "repetition(" + std::to_string(code.length()) + ")";
    case CodeKind::Hamming74: return "hamming74";
    case CodeKind::RandomCodebook:
      return "random(" + std::to_string(code.length()) + "," + std::to_string(code.size()) + "," +
             std::to_string(code.seed()) + ")";
  }
  return "?";
}

std::size_t ml_decode(const BinaryCode& code, std::span<const double> llr) {
  if (llr.size() != code.length()) throw std::invalid_argument("LLR vector length does not match the code");
  std::size_t best = 0;
  double best_metric = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < code.size(); ++m) {
    const auto c = code.codeword(m);
    double metric = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) metric += c[j] ? -llr[j] : llr[j];
    if (metric > best_metric) {
      best_metric = metric;
      best = m;
    }
  }
  return best;
}

PbicmState PbicmState::draw(int levels, std::size_t n, Rng& rng) {
  if (levels < 1) throw std::invalid_argument("need at least one level");
  PbicmState st;
  st.shifts.resize(n);
  std::uniform_int_distribution<int> shift(0, levels - 1);
  for (auto& s : st.shifts) s = static_cast<std::uint8_t>(shift(rng));
  st.dither = BitMatrix(static_cast<std::size_t>(levels), n);
  for (std::size_t l = 0; l < st.dither.rows(); ++l)
    for (auto& d : st.dither.row(l)) d = static_cast<std::uint8_t>(rng() >> 63);
  return st;
}

namespace {

void check_shifts(std::size_t rows, std::size_t cols, std::span<const std::uint8_t> shifts) {
  if (shifts.size() != cols) throw std::invalid_argument("state vector length does not match block length");
  for (std::uint8_t s : shifts)
    if (s >= rows) throw std::invalid_argument("interleaver state out of range");
}

}  // namespace

BitMatrix interleave(const BitMatrix& b, std::span<const std::uint8_t> shifts) {
  check_shifts(b.rows(), b.cols(), shifts);
  const std::size_t levels = b.rows();
  BitMatrix out(levels, b.cols());
  for (std::size_t k = 0; k < b.cols(); ++k)
    for (std::size_t l = 0; l < levels; ++l) out(l, k) = b((l + shifts[k]) % levels, k);
  return out;
}

std::vector<std::size_t> map_columns(const Constellation& c, const BitMatrix& interleaved) {
  if (interleaved.rows() != static_cast<std::size_t>(c.bits_per_symbol())) {
    throw std::invalid_argument("interleaved matrix must have L rows");
  }
  std::vector<std::size_t> x(interleaved.cols());
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::uint32_t label = 0;
    for (std::size_t l = 0; l < interleaved.rows(); ++l) label = (label << 1) | interleaved(l, k);
    x[k] = c.point_of_label(label);
  }
  return x;
}

LlrMatrix deinterleave(const LlrMatrix& z, std::span<const std::uint8_t> shifts) {
  check_shifts(z.rows(), z.cols(), shifts);
  const std::size_t levels = z.rows();
  LlrMatrix out(levels, z.cols());
  for (std::size_t k = 0; k < z.cols(); ++k)
    for (std::size_t l = 0; l < levels; ++l) out((l + shifts[k]) % levels, k) = z(l, k);
  return out;
}

std::vector<std::uint8_t> apply_dither(std::span<const std::uint8_t> bits, std::span<const std::uint8_t> dither) {
  if (bits.size() != dither.size()) throw std::invalid_argument("dither length mismatch");
  std::vector<std::uint8_t> out(bits.size());
  for (std::size_t j = 0; j < bits.size(); ++j) out[j] = bits[j] ^ dither[j];
  return out;
}

std::vector<double> remove_dither_llr(std::span<const double> llr, std::span<const std::uint8_t> dither) {
  if (llr.size() != dither.size()) throw std::invalid_argument("dither length mismatch");
  std::vector<double> out(llr.size());
  for (std::size_t j = 0; j < llr.size(); ++j) out[j] = dither[j] ? -llr[j] : llr[j];
  return out;
}

std::vector<ChannelOutput> pbicm_transmit(std::span<const std::size_t> messages, const BinaryCode& code,
                                          const PbicmState& state, const ChannelModel& base,
                                          const Constellation& cons, Rng& rng, DitherMode mode) {
  const auto levels = static_cast<std::size_t>(cons.bits_per_symbol());
  const std::size_t n = code.length();
  if (messages.size() != levels) throw std::invalid_argument("need one message per level");
  if (state.dither.rows() != levels || state.length() != n) throw std::invalid_argument("state dimensions mismatch");
  check_compatible(base, cons);

  BitMatrix b(levels, n);
  for (std::size_t l = 0; l < levels; ++l) {
    const auto c = code.codeword(messages[l]);
    const auto d = state.dither.row(l);
    for (std::size_t j = 0; j < n; ++j) b(l, j) = mode == DitherMode::Enabled ? (c[j] ^ d[j]) : c[j];
  }
  const std::vector<std::size_t> x = map_columns(cons, interleave(b, state.shifts));
  std::vector<ChannelOutput> y(n);
  for (std::size_t k = 0; k < n; ++k) y[k] = sample(base, input_of(cons, x[k]), rng);
  return y;
}

LlrMatrix pbicm_receive_llrs(std::span<const ChannelOutput> y, const PbicmState& state, const ChannelModel& base,
                             const Constellation& cons, DitherMode mode) {
  const auto levels = static_cast<std::size_t>(cons.bits_per_symbol());
  if (state.dither.rows() != levels || state.length() != y.size()) {
    throw std::invalid_argument("state dimensions mismatch");
  }
  const Demapper demapper(base, cons);
  LlrMatrix tilde(levels, y.size());
  std::vector<double> col(levels);
  for (std::size_t k = 0; k < y.size(); ++k) {
    demapper.llrs(y[k], col);
    for (std::size_t l = 0; l < levels; ++l) tilde(l, k) = col[l];
  }
  LlrMatrix z = deinterleave(tilde, state.shifts);
  if (mode != DitherMode::Disabled) {
    for (std::size_t l = 0; l < levels; ++l) {
      auto row = z.row(l);
      const auto d = state.dither.row(l);
      for (std::size_t j = 0; j < row.size(); ++j)
        if (d[j]) row[j] = -row[j];
    }
  }
  return z;
}

std::vector<std::size_t> pbicm_receive(std::span<const ChannelOutput> y, const PbicmState& state,
                                       const BinaryCode& code, const ChannelModel& base, const Constellation& cons,
                                       DitherMode mode) {
  if (y.size() != code.length()) throw std::invalid_argument("received block length does not match the code");
  const LlrMatrix z = pbicm_receive_llrs(y, state, base, cons, mode);
  std::vector<std::size_t> m(z.rows());
  for (std::size_t l = 0; l < z.rows(); ++l) m[l] = ml_decode(code, z.row(l));
  return m;
}

WbarSample sample_wbar(int bit, const ChannelModel& base, const Constellation& cons, Rng& rng) {
  const int levels = cons.bits_per_symbol();
  WbarSample s;
  s.out.state = std::uniform_int_distribution<int>(0, levels - 1)(rng);
  s.out.dither = static_cast<int>(rng() >> 63);
  // Label with b xor d at the state position and uniform bits elsewhere.
  std::uint32_t label = 0;
  for (int p = 0; p < levels; ++p) {
    const std::uint32_t v = p == s.out.state ? static_cast<std::uint32_t>(bit ^ s.out.dither)
                                             : static_cast<std::uint32_t>(rng() >> 63);
    label = (label << 1) | v;
  }
  s.out.y = sample(base, input_of(cons, cons.point_of_label(label)), rng);
  s.llr = llr_wbar(base, cons, s.out);
  return s;
}

}  // namespace pbicm
