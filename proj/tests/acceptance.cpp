// Acceptance suite: one PASS/FAIL line per criterion, exit code 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pbicm/dmc.hpp"
#include "pbicm/info.hpp"
#include "pbicm/qfunc.hpp"
#include "pbicm/simulate.hpp"
#include "pbicm/subchannel.hpp"
#include "test_util.hpp"

using namespace pbicm;

namespace {

// Tolerances and budgets.
constexpr double kCapacityTol = 0.02;
constexpr double kOracleTol = 1e-9;
constexpr double kKsPass = 0.01;
constexpr double kKsFail = 0.001;
constexpr double kSigmaSlack = 3.0;
constexpr double kJensenMargin = 1e-6;
constexpr double kExponentTol = 1e-6;
constexpr double kClosedFormTol = 1e-9;
constexpr double kIdentityTol = 1e-12;
constexpr double kQinvTol = 1e-12;
constexpr double kSlopeTol = 1e-4;
// Orderings between exponents that both vanish at capacity are compared up to
// floating-point round-off.
constexpr double kRoundoffTol = 1e-12;

struct Check {
  bool pass = true;
  std::ostringstream log;

  void expect(bool ok, const std::string& what) {
    if (!ok) pass = false;
    log << "    " << (ok ? "ok   " : "FAIL ") << what << '\n';
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<double> rho_grid() {
  std::vector<double> r;
  for (int i = 1; i <= 10; ++i) r.push_back(0.1 * i);
  return r;
}

AnalysisPtr qam16_rayleigh() {
  static const AnalysisPtr a = analyze(rayleigh_from_snr(Snr{5.0}), make_constellation(ConstellationKind::Qam16));
  return a;
}

void paper_capacity(Check& c) {
  const ChannelAnalysis a(awgn_from_snr(Snr{5.0}), make_constellation(ConstellationKind::Psk8));
  const double cm = capacity_cm(a);
  const double pb = capacity_pbicm(a);
  c.expect(std::abs(cm - 1.86) <= kCapacityTol, fmt("C_cm = %.6f (1.86 +- 0.02)", cm));
  c.expect(std::abs(pb - 1.84) <= kCapacityTol, fmt("C_pbicm = %.6f (1.84 +- 0.02)", pb));
}

void oracle_equivalence(Check& c) {
  Rng rng = make_stream(2024, 0);
  const Constellation cons = testing::index_constellation(2);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t outputs = 3 + static_cast<std::size_t>(t % 3);
    const ChannelModel base = testing::random_dmc(rng, 4, outputs);
    const AnalysisPtr a = analyze(base, cons);
    const DmcMatrix wbar = wbar_as_dmc(base, cons);
    const E0Evaluator ev = E0Evaluator::wbar_combined(a);
    const DispersionReport d = dispersion_report(*a);

    auto track = [&](double x, double y) { worst = std::max(worst, std::abs(x - y)); };
    track(d.c_wbar, dmc::capacity_blahut_arimoto(wbar));
    track(d.c_wbar, dmc::mutual_information_uniform(wbar));
    for (double rho : rho_grid()) track(ev(rho), dmc::e0_uniform(wbar, rho));
    for (int i = 0; i < 20; ++i) {
      const double r = d.c_wbar * i / 19.0;
      track(random_coding_exponent(ev, r), dmc::random_coding_exponent(wbar, r));
    }
    track(d.v_wbar, dmc::dispersion_uniform(wbar));
  }
  c.expect(worst <= kOracleTol, fmt("max |combiner - explicit W-bar| over 20 channels = %.3e", worst));
}

void statistical_equivalence(Check& c) {
  EquivalenceConfig cfg;
  cfg.sim.cons = make_constellation(ConstellationKind::Qpsk);
  cfg.sim.channel = awgn_from_snr(Snr{2.0});
  cfg.sim.seed = 11;
  cfg.samples_per_bit = 100000;
  const EquivalenceReport r = equivalence_test(cfg);
  c.expect(r.p_value() > kKsPass,
           fmt("QPSK pipeline vs direct: p(b=0) = %.4f, p(b=1) = %.4f (> 0.01)", r.given_zero.p_value,
               r.given_one.p_value));

  EquivalenceConfig neg = cfg;
  neg.sim.dither = DitherMode::Disabled;
  neg.zero_other_levels = true;
  const EquivalenceReport rn = equivalence_test(neg);
  c.expect(rn.p_value() < kKsFail, fmt("QPSK no-dither control: p = %.4g (< 0.001)", rn.p_value()));

  // Same control where the label bits interact in the demapper.
  for (ConstellationKind k : {ConstellationKind::Psk8, ConstellationKind::Qam16}) {
    EquivalenceConfig n2 = neg;
    n2.sim.cons = make_constellation(k);
    const EquivalenceReport r2 = equivalence_test(n2);
    c.log << "    info " << n2.sim.cons.name() << " no-dither control: p = " << r2.p_value() << '\n';
  }
}

void sandwich(Check& c) {
  PbicmSimConfig cfg;
  cfg.cons = make_constellation(ConstellationKind::Qpsk);
  cfg.channel = awgn_from_snr(Snr{2.0});
  cfg.trials = 100000;
  cfg.seed = 5;
  const SimulationResult r = simulate(cfg);
  const double levels = r.levels;
  const double pe = r.pe_overall.value;
  const double pw = r.pe_wbar_direct.value;
  const double slack_lo = kSigmaSlack * std::hypot(r.pe_overall.sigma(), r.pe_wbar_direct.sigma());
  const double slack_hi = kSigmaSlack * std::hypot(r.pe_overall.sigma(), levels * r.pe_wbar_direct.sigma());
  c.log << "    info pe_overall = " << pe << ", pe_wbar_direct = " << pw << '\n';
  c.expect(pw <= pe + slack_lo, fmt("pe_wbar_direct %.5f <= pe_overall %.5f + %.5f", pw, pe, slack_lo));
  c.expect(pe <= levels * pw + slack_hi,
           fmt("pe_overall %.5f <= L*pe_wbar_direct %.5f + %.5f", pe, levels * pw, slack_hi));
}

void jensen(Check& c) {
  const E0Evaluator comb = E0Evaluator::wbar_combined(qam16_rayleigh());
  const E0Evaluator wach = E0Evaluator::wachsmann_averaged(qam16_rayleigh());
  double least = std::numeric_limits<double>::infinity();
  for (double rho : rho_grid()) least = std::min(least, wach(rho) - comb(rho));
  c.expect(least > kJensenMargin, fmt("min over rho of averaged - combined = %.6e (> 1e-6)", least));
}

void exponent_structure_of(Check& c, const char* name, const E0Evaluator& ev) {
  const double rc = critical_rate(ev);
  const double cap = ev.capacity();
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double r = rc + (cap - rc) * i / 20.0;
    worst = std::max(worst, std::abs(random_coding_exponent(ev, r) - sphere_packing_exponent(ev, r)));
  }
  c.expect(rc < cap, std::string(name) + fmt(": critical rate %.6f < capacity %.6f", rc, cap));
  c.expect(worst <= kExponentTol, std::string(name) + fmt(": max |E_r - E_sp| on [R_crit, C] = %.3e", worst));
  const double er = random_coding_exponent(ev, cap);
  const double esp = sphere_packing_exponent(ev, cap);
  c.expect(std::abs(er) <= kExponentTol && std::abs(esp) <= kExponentTol,
           std::string(name) + fmt(": E_r(C) = %.3e, E_sp(C) = %.3e", er, esp));
}

void exponent_structure(Check& c) {
  const AnalysisPtr bsc = analyze(testing::bsc(0.1), testing::index_constellation(1));
  exponent_structure_of(c, "BSC(0.1)", E0Evaluator::wbar_combined(bsc));
  exponent_structure_of(c, "16QAM/Rayleigh 5 dB W-bar", E0Evaluator::wbar_combined(qam16_rayleigh()));
}

void closed_forms(Check& c) {
  const double p = 0.1;
  const AnalysisPtr a = analyze(testing::bsc(p), testing::index_constellation(1));
  const double cap = 1.0 - testing::h2(p);
  const double e01 = 1.0 - 2.0 * std::log2(std::sqrt(1 - p) + std::sqrt(p));
  const double lr = std::log2((1 - p) / p);
  const double disp = p * (1 - p) * lr * lr;
  const double got_cap = capacity_cm(*a);
  const double got_e0 = E0Evaluator::unconstrained(a)(1.0);
  const double got_disp = dispersion_report(*a).per_subchannel[0].dispersion;
  c.expect(std::abs(got_cap - cap) <= kClosedFormTol, fmt("capacity %.12f vs %.12f", got_cap, cap));
  c.expect(std::abs(got_e0 - e01) <= kClosedFormTol, fmt("E0(1) %.12f vs %.12f", got_e0, e01));
  c.expect(std::abs(got_disp - disp) <= kClosedFormTol, fmt("dispersion %.12f vs %.12f", got_disp, disp));
}

void dispersion_identities(Check& c) {
  Rng rng = make_stream(88, 0);
  struct Named {
    std::string name;
    AnalysisPtr a;
  };
  std::vector<Named> channels{
      {"8PSK/AWGN 5 dB", analyze(awgn_from_snr(Snr{5.0}), make_constellation(ConstellationKind::Psk8))},
      {"QPSK/AWGN 2 dB", analyze(awgn_from_snr(Snr{2.0}), make_constellation(ConstellationKind::Qpsk))},
      {"16QAM/Rayleigh 5 dB", qam16_rayleigh()},
      {"64QAM/AWGN 12 dB", analyze(awgn_from_snr(Snr{12.0}), make_constellation(ConstellationKind::Qam64))},
      {"BSC(0.1)", analyze(testing::bsc(0.1), testing::index_constellation(1))},
  };
  for (int t = 0; t < 5; ++t) {
    channels.push_back({"random 8-input DMC", analyze(testing::random_dmc(rng, 8, 6), testing::index_constellation(3))});
  }
  double worst_l2 = 0.0;
  double worst_tv = 0.0;
  for (const auto& ch : channels) {
    const DispersionReport d = dispersion_report(*ch.a);
    const double l = ch.a->levels();
    double mean_v = 0.0;
    for (const auto& s : d.per_subchannel) mean_v += s.dispersion;
    mean_v /= l;
    worst_l2 = std::max(worst_l2, std::abs(d.v_pbicm - l * l * d.v_wbar));
    worst_tv = std::max(worst_tv, std::abs(d.v_wbar - (mean_v + d.penalty)));
  }
  c.expect(worst_l2 <= kIdentityTol, fmt("max |v_pbicm - L^2 v_wbar| = %.3e", worst_l2));
  c.expect(worst_tv <= kIdentityTol, fmt("max |v_wbar - (mean V_s + var C_S)| = %.3e", worst_tv));
}

void qinv_property(Check& c) {
  double prev = -1.0;
  for (double eps : {1e-4, 1e-8, 1e-12}) {
    const double q = qinv(eps);
    const double ratio = q * q / (2.0 * std::log(1.0 / eps));
    const double rel = std::abs(qfunc(q) - eps) / eps;
    c.expect(ratio > prev && ratio < 1.0, fmt("eps = %.0e: qinv^2 / (2 ln(1/eps)) = %.9f", eps, ratio));
    c.expect(rel <= kQinvTol, fmt("eps = %.0e: |Q(qinv) - eps| / eps = %.3e", eps, rel));
    prev = ratio;
  }
}

void slope_and_orderings(Check& c) {
  const AnalysisPtr a = qam16_rayleigh();
  const E0Evaluator comb = E0Evaluator::wbar_combined(a);
  const E0Evaluator wach = E0Evaluator::wachsmann_averaged(a);
  const E0Evaluator full = E0Evaluator::unconstrained(a);
  const double levels = a->levels();
  const double c_pbicm = capacity_pbicm(*a);
  const double h = 1e-4;

  // Envelope theorem: dE/dR = -rho* for the dithered state channel, so the
  // finite-difference slope of the PBICM exponent must equal -rho*(R/L) / L.
  double worst = 0.0;
  for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double r = frac * c_pbicm;
    const double lhs = (pbicm_exponent(a, r + h, ExponentBound::RandomCoding, false) -
                        pbicm_exponent(a, r - h, ExponentBound::RandomCoding, false)) /
                       (2 * h);
    const double rhs = -random_coding_point(comb, r / levels).rho;
    worst = std::max(worst, std::abs(lhs - rhs / levels));
  }
  c.expect(worst <= kSlopeTol, fmt("max |dE_pbicm/dR + rho*/L| = %.3e", worst));

  bool jensen_rows = true;
  bool normalized_above = false;
  for (int i = 0; i <= 20; ++i) {
    const double r = c_pbicm * i / 20.0;
    const double pb = pbicm_exponent(a, r, ExponentBound::RandomCoding, false);
    if (random_coding_exponent(wach, r / levels) < pb - kRoundoffTol) jensen_rows = false;
    if (levels * pb > random_coding_exponent(full, r)) normalized_above = true;
  }
  c.expect(jensen_rows, "averaged-E0 exponent >= PBICM exponent at every rate");
  c.expect(normalized_above, "normalized PBICM exponent above the unconstrained one at some rate");
  const double at_cap = pbicm_exponent(a, c_pbicm, ExponentBound::RandomCoding, false);
  c.expect(std::abs(at_cap) <= kExponentTol, fmt("PBICM exponent at C_pbicm = %.3e", at_cap));
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0 = no runtime limit
  std::function<void(Check&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> all{
      {1, "8PSK/AWGN 5 dB capacities", 10.0, paper_capacity},
      {2, "combiner formulas vs explicit W-bar matrix", 5.0, oracle_equivalence},
      {3, "pipeline LLR law equals W-bar (KS)", 30.0, statistical_equivalence},
      {4, "error-probability sandwich", 60.0, sandwich},
      {5, "combined E0 below averaged E0", 0.0, jensen},
      {6, "random coding = sphere packing above critical rate", 0.0, exponent_structure},
      {7, "BSC closed forms", 0.0, closed_forms},
      {8, "dispersion identities", 0.0, dispersion_identities},
      {9, "qinv growth property", 0.0, qinv_property},
      {10, "exponent slope relation and orderings", 0.0, slope_and_orderings},
  };
  int failures = 0;
  for (const auto& cr : all) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.budget_s > 0.0) c.expect(secs < cr.budget_s, fmt("runtime %.2f s < %.0f s", secs, cr.budget_s));
    if (!c.pass) ++failures;
    std::printf("criterion %2d %s: %s (%.2f s)\n%s", cr.id, cr.name, c.pass ? "PASS" : "FAIL", secs,
                c.log.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, all.size());
  return failures == 0 ? 0 : 1;
}
