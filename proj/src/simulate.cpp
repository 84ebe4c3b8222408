#include "pbicm/simulate.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "pbicm/subchannel.hpp"

namespace pbicm {

namespace {

constexpr std::uint64_t kWbarStreamOffset = std::uint64_t{1} << 40;
constexpr std::uint64_t kPipelineSampleOffset = std::uint64_t{2} << 40;
constexpr std::uint64_t kWbarSampleOffset = std::uint64_t{3} << 40;
constexpr std::uint64_t kSplitHalfOffset = std::uint64_t{4} << 40;

int bit_errors(std::size_t a, std::size_t b) { return std::popcount(a ^ b); }

std::size_t block_count(std::size_t trials) { return (trials + kTrialsPerStream - 1) / kTrialsPerStream; }

}  // namespace

void SimulationCounters::merge(const SimulationCounters& other) {
  if (level_errors.empty()) {
    level_errors.assign(other.level_errors.size(), 0);
    level_bit_errors.assign(other.level_bit_errors.size(), 0);
  }
  trials += other.trials;
  frame_errors += other.frame_errors;
  for (std::size_t l = 0; l < other.level_errors.size(); ++l) {
    level_errors[l] += other.level_errors[l];
    level_bit_errors[l] += other.level_bit_errors[l];
  }
  wbar_errors += other.wbar_errors;
  wbar_bit_errors += other.wbar_bit_errors;
}

SimulationCounters simulate_block(const PbicmSimConfig& cfg, std::size_t block) {
  const int levels = cfg.cons.bits_per_symbol();
  const std::size_t n = cfg.code.length();
  const std::size_t first = block * kTrialsPerStream;
  const std::size_t count = std::min(kTrialsPerStream, cfg.trials - first);

  SimulationCounters c;
  c.level_errors.assign(static_cast<std::size_t>(levels), 0);
  c.level_bit_errors.assign(static_cast<std::size_t>(levels), 0);
  c.trials = count;

  Rng rng = make_stream(cfg.seed, block);
  std::uniform_int_distribution<std::size_t> message(0, cfg.code.size() - 1);
  std::vector<std::size_t> sent(static_cast<std::size_t>(levels));
  for (std::size_t t = 0; t < count; ++t) {
    for (auto& m : sent) m = message(rng);
    const PbicmState state = PbicmState::draw(levels, n, rng);
    const auto y = pbicm_transmit(sent, cfg.code, state, cfg.channel, cfg.cons, rng, cfg.dither);
    const auto got = pbicm_receive(y, state, cfg.code, cfg.channel, cfg.cons, cfg.dither);
    bool any = false;
    for (std::size_t l = 0; l < sent.size(); ++l) {
      if (got[l] != sent[l]) {
        any = true;
        ++c.level_errors[l];
        c.level_bit_errors[l] += static_cast<std::size_t>(bit_errors(got[l], sent[l]));
      }
    }
    if (any) ++c.frame_errors;
  }

  Rng wrng = make_stream(cfg.seed, kWbarStreamOffset + block);
  std::vector<double> llr(n);
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t m = message(wrng);
    const auto cw = cfg.code.codeword(m);
    for (std::size_t j = 0; j < n; ++j) llr[j] = sample_wbar(cw[j], cfg.channel, cfg.cons, wrng).llr;
    const std::size_t got = ml_decode(cfg.code, llr);
    if (got != m) {
      ++c.wbar_errors;
      c.wbar_bit_errors += static_cast<std::size_t>(bit_errors(got, m));
    }
  }
  return c;
}

SimulationResult finalize(const PbicmSimConfig& cfg, const SimulationCounters& c) {
  SimulationResult r;
  r.trials = c.trials;
  r.seed = cfg.seed;
  r.levels = cfg.cons.bits_per_symbol();
  r.message_bits = cfg.code.message_bits();
  r.counters = c;
  r.pe_overall = wilson_estimate(c.frame_errors, c.trials);
  const double bits = static_cast<double>(c.trials) * r.message_bits;
  double ber_sum = 0.0;
  for (std::size_t l = 0; l < c.level_errors.size(); ++l) {
    r.pe_per_level.push_back(wilson_estimate(c.level_errors[l], c.trials));
    r.ber_per_level.push_back(static_cast<double>(c.level_bit_errors[l]) / bits);
    ber_sum += static_cast<double>(c.level_bit_errors[l]);
  }
  r.ber_overall = ber_sum / (bits * static_cast<double>(c.level_errors.size()));
  r.pe_wbar_direct = wilson_estimate(c.wbar_errors, c.trials);
  r.ber_wbar_direct = static_cast<double>(c.wbar_bit_errors) / bits;
  return r;
}

SimulationResult simulate(const PbicmSimConfig& cfg) {
  if (cfg.trials == 0) throw std::invalid_argument("trials must be >= 1");
  check_compatible(cfg.channel, cfg.cons);
  const std::size_t blocks = block_count(cfg.trials);
  std::vector<SimulationCounters> parts(blocks);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t b = 0; b < blocks; ++b) parts[b] = simulate_block(cfg, b);
  SimulationCounters total;
  for (const auto& p : parts) total.merge(p);
  return finalize(cfg, total);
}

namespace {

constexpr std::size_t kFramesPerSampleBlock = 512;

// Runs `frames` pipeline frames from one stream and appends level-1 LLRs by transmitted bit.
void pipeline_block(const EquivalenceConfig& cfg, Rng rng, LlrSamples& out) {
  const PbicmSimConfig& sim = cfg.sim;
  const int levels = sim.cons.bits_per_symbol();
  const std::size_t n = sim.code.length();
  std::uniform_int_distribution<std::size_t> message(0, sim.code.size() - 1);
  std::vector<std::size_t> sent(static_cast<std::size_t>(levels), 0);
  for (std::size_t f = 0; f < kFramesPerSampleBlock; ++f) {
    for (std::size_t l = 0; l < sent.size(); ++l) sent[l] = (l > 0 && cfg.zero_other_levels) ? 0 : message(rng);
    const PbicmState state = PbicmState::draw(levels, n, rng);
    const auto y = pbicm_transmit(sent, sim.code, state, sim.channel, sim.cons, rng, sim.dither);
    const LlrMatrix z = pbicm_receive_llrs(y, state, sim.channel, sim.cons, sim.dither);
    const auto cw = sim.code.codeword(sent[0]);
    for (std::size_t j = 0; j < n; ++j) out.given[cw[j]].push_back(z(0, j));
  }
}

void wbar_block(const PbicmSimConfig& sim, Rng rng, LlrSamples& out) {
  for (std::size_t i = 0; i < kFramesPerSampleBlock * 8; ++i) {
    const int bit = static_cast<int>(rng() >> 63);
    out.given[bit].push_back(sample_wbar(bit, sim.channel, sim.cons, rng).llr);
  }
}

// Generates blocks in parallel rounds until both conditional sample sets hold
// `per_bit` values, then truncates. Blocks are concatenated in index order.
template <class Block>
LlrSamples collect(std::size_t per_bit, std::uint64_t seed, std::uint64_t stream_base, Block&& block) {
  LlrSamples all;
  std::size_t next = 0;
  const std::size_t round = 16;
  while (all.given[0].size() < per_bit || all.given[1].size() < per_bit) {
    std::vector<LlrSamples> parts(round);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < round; ++i) block(make_stream(seed, stream_base + next + i), parts[i]);
    next += round;
    for (auto& p : parts)
      for (int b = 0; b < 2; ++b) all.given[b].insert(all.given[b].end(), p.given[b].begin(), p.given[b].end());
    if (next > (std::size_t{1} << 30)) throw std::runtime_error("code never sends one of the bit values");
  }
  for (auto& g : all.given) g.resize(per_bit);
  return all;
}

TestResult compare(EquivalenceMethod method, const std::vector<double>& a, const std::vector<double>& b) {
  return method == EquivalenceMethod::ChiSquare ? chi_square_two_sample(a, b) : ks_two_sample(a, b);
}

EquivalenceMethod method_for(const ChannelModel& ch) {
  return ch.is_discrete() ? EquivalenceMethod::ChiSquare : EquivalenceMethod::KolmogorovSmirnov;
}

void check_samples(const EquivalenceConfig& cfg) {
  if (cfg.samples_per_bit < kMinEquivalenceSamples) {
    throw std::invalid_argument("equivalence test needs at least 10000 samples per bit");
  }
  check_compatible(cfg.sim.channel, cfg.sim.cons);
}

}  // namespace

LlrSamples pipeline_llr_samples(const EquivalenceConfig& cfg, std::uint64_t stream_base) {
  return collect(cfg.samples_per_bit, cfg.sim.seed, stream_base,
                 [&](Rng rng, LlrSamples& out) { pipeline_block(cfg, std::move(rng), out); });
}

LlrSamples wbar_llr_samples(const PbicmSimConfig& cfg, std::size_t per_bit, std::uint64_t stream_base) {
  return collect(per_bit, cfg.seed, stream_base, [&](Rng rng, LlrSamples& out) { wbar_block(cfg, std::move(rng), out); });
}

EquivalenceReport equivalence_test(const EquivalenceConfig& cfg) {
  check_samples(cfg);
  const LlrSamples pipe = pipeline_llr_samples(cfg, kPipelineSampleOffset);
  const LlrSamples direct = wbar_llr_samples(cfg.sim, cfg.samples_per_bit, kWbarSampleOffset);
  EquivalenceReport r;
  r.method = method_for(cfg.sim.channel);
  r.samples_per_bit = cfg.samples_per_bit;
  r.given_zero = compare(r.method, pipe.given[0], direct.given[0]);
  r.given_one = compare(r.method, pipe.given[1], direct.given[1]);
  return r;
}

EquivalenceReport pipeline_split_half_test(const EquivalenceConfig& cfg) {
  check_samples(cfg);
  const LlrSamples a = pipeline_llr_samples(cfg, kPipelineSampleOffset);
  const LlrSamples b = pipeline_llr_samples(cfg, kSplitHalfOffset);
  EquivalenceReport r;
  r.method = method_for(cfg.sim.channel);
  r.samples_per_bit = cfg.samples_per_bit;
  r.given_zero = compare(r.method, a.given[0], b.given[0]);
  r.given_one = compare(r.method, a.given[1], b.given[1]);
  return r;
}

}  // namespace pbicm
