#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pbicm/channel.hpp"
#include "pbicm/codec.hpp"
#include "pbicm/constellation.hpp"
#include "pbicm/stats.hpp"

namespace pbicm {

struct PbicmSimConfig {
  BinaryCode code = BinaryCode::hamming74();
  Constellation cons = make_constellation(ConstellationKind::Qpsk);
  ChannelModel channel = awgn_from_snr(Snr{0.0});
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  DitherMode dither = DitherMode::Enabled;
  /// Informational; set by the config loader for Gaussian channels.
  std::optional<double> snr_db;
};

/// Raw counters; merged by summation.
struct SimulationCounters {
  std::size_t trials = 0;
  std::size_t frame_errors = 0;  // any level wrong
  std::vector<std::size_t> level_errors;
  std::vector<std::size_t> level_bit_errors;
  std::size_t wbar_errors = 0;
  std::size_t wbar_bit_errors = 0;

  void merge(const SimulationCounters& other);
  bool operator==(const SimulationCounters&) const = default;
};

struct SimulationResult {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  int levels = 0;
  int message_bits = 0;
  Estimate pe_overall;
  std::vector<Estimate> pe_per_level;
  Estimate pe_wbar_direct;
  double ber_overall = 0.0;
  std::vector<double> ber_per_level;
  double ber_wbar_direct = 0.0;
  SimulationCounters counters;
};

/// Trials per random stream; stream b covers trials [b * kTrialsPerStream, ...).
inline constexpr std::size_t kTrialsPerStream = 256;

/// Runs `trials` independent uses of the full pipeline (fresh s, d and
/// messages each time) and the same number of frames over directly
/// synthesized uses of the dithered state channel. OpenMP-parallel over
/// streams; the result is identical for every thread count.
SimulationResult simulate(const PbicmSimConfig& cfg);

/// Counters for one stream block (shared by the parallel and serial drivers).
SimulationCounters simulate_block(const PbicmSimConfig& cfg, std::size_t block);

SimulationResult finalize(const PbicmSimConfig& cfg, const SimulationCounters& c);

enum class EquivalenceMethod { KolmogorovSmirnov, ChiSquare };

struct EquivalenceConfig {
  PbicmSimConfig sim;
  std::size_t samples_per_bit = 100000;
  /// Levels other than the first send codeword 0 (used for the negative control).
  bool zero_other_levels = false;
};

struct EquivalenceReport {
  EquivalenceMethod method = EquivalenceMethod::KolmogorovSmirnov;
  std::size_t samples_per_bit = 0;
  TestResult given_zero;  // conditioned on b = 0
  TestResult given_one;   // conditioned on b = 1
  double p_value() const { return std::min(given_zero.p_value, given_one.p_value); }
};

inline constexpr std::size_t kMinEquivalenceSamples = 10000;

/// Compares level-1 decoder-input LLRs of the pipeline, conditioned on the
/// transmitted bit, against LLRs of directly synthesized dithered-state
/// channel uses. KS for continuous channels, chi-square for discrete ones.
EquivalenceReport equivalence_test(const EquivalenceConfig& cfg);

/// Null calibration: two independent runs of the pipeline sampler.
EquivalenceReport pipeline_split_half_test(const EquivalenceConfig& cfg);

/// Level-1 pipeline LLR samples conditioned on the transmitted bit.
struct LlrSamples {
  std::vector<double> given[2];
};
LlrSamples pipeline_llr_samples(const EquivalenceConfig& cfg, std::uint64_t stream_base);
LlrSamples wbar_llr_samples(const PbicmSimConfig& cfg, std::size_t per_bit, std::uint64_t stream_base);

}  // namespace pbicm
