#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pbicm/dmc.hpp"
#include "pbicm/info.hpp"
#include "pbicm/io.hpp"
#include "pbicm/simulate.hpp"
#include "pbicm/subchannel.hpp"

using namespace pbicm;

namespace {

// Sweep description shared by the analysis subcommands. Flags override the
// values read from --config.
struct SweepSpec {
  std::string constellation = "qpsk";
  std::string channel = "awgn";
  std::string dmc_file;
  std::optional<DmcMatrix> dmc_matrix;  // inline "matrix" from the config
  std::vector<double> snr_db{0.0};
  std::optional<double> rate_start, rate_stop;
  double rate_step = 0.05;
  std::vector<double> blocklengths{100, 500, 1000, 5000};
  std::vector<double> error_probs{1e-3};
  int hermite = QuadratureSpec{}.hermite_nodes;
  int laguerre = QuadratureSpec{}.laguerre_nodes;
};

struct Globals {
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string out;
  std::string config;
};

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return Json::parse(in);
}

std::vector<double> numbers(const Json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  return {j.get<double>()};
}

void apply_config(SweepSpec& s, const Json& j) {
  if (j.contains("constellation")) s.constellation = j.at("constellation").get<std::string>();
  if (j.contains("channel")) {
    const Json& c = j.at("channel");
    s.channel = c.is_string() ? c.get<std::string>() : c.at("kind").get<std::string>();
    if (c.is_object() && c.contains("file")) s.dmc_file = c.at("file").get<std::string>();
    if (c.is_object() && c.contains("matrix")) s.dmc_matrix = dmc_from_json(c);
    if (c.is_object() && c.contains("snr_db")) s.snr_db = numbers(c.at("snr_db"));
  }
  if (j.contains("snr_db")) s.snr_db = numbers(j.at("snr_db"));
  if (j.contains("rates")) {
    const Json& r = j.at("rates");
    if (r.contains("start")) s.rate_start = r.at("start").get<double>();
    if (r.contains("stop")) s.rate_stop = r.at("stop").get<double>();
    if (r.contains("step")) s.rate_step = r.at("step").get<double>();
  }
  if (j.contains("blocklengths")) s.blocklengths = numbers(j.at("blocklengths"));
  if (j.contains("pe")) s.error_probs = numbers(j.at("pe"));
  if (j.contains("quadrature")) {
    const Json& q = j.at("quadrature");
    s.hermite = q.value("hermite_nodes", s.hermite);
    s.laguerre = q.value("laguerre_nodes", s.laguerre);
  }
}

bool discrete(const SweepSpec& s) { return s.channel == "dmc"; }

// One analysed point of a sweep.
struct Point {
  std::optional<double> snr_db;
  AnalysisPtr analysis;
};

std::vector<Point> analyses(const SweepSpec& s) {
  const Constellation cons = make_constellation(parse_constellation_kind(s.constellation));
  QuadratureSpec q;
  q.hermite_nodes = s.hermite;
  q.laguerre_nodes = s.laguerre;
  std::vector<Point> pts;
  if (discrete(s)) {
    if (s.dmc_file.empty() && !s.dmc_matrix) throw std::invalid_argument("--channel dmc needs --dmc-file");
    DmcMatrix m = s.dmc_file.empty() ? *s.dmc_matrix : load_dmc(s.dmc_file);
    pts.push_back({std::nullopt, analyze(ChannelModel(std::move(m)), cons, q)});
    return pts;
  }
  if (s.snr_db.empty()) throw std::invalid_argument("SNR list is empty");
  std::vector<double> snrs = s.snr_db;
  std::sort(snrs.begin(), snrs.end());
  for (double snr : snrs) {
    ChannelModel ch = [&] {
      if (s.channel == "awgn") return awgn_from_snr(Snr{snr});
      if (s.channel == "rayleigh") return rayleigh_from_snr(Snr{snr});
      throw std::invalid_argument("unknown channel: " + s.channel);
    }();
    pts.push_back({snr, analyze(std::move(ch), cons, q)});
  }
  return pts;
}

std::string snr_cell(const Point& p) { return p.snr_db ? format_double(*p.snr_db) : ""; }

// Writes to --out when given, stdout otherwise.
void emit(const Globals& g, const std::function<void(std::ostream&)>& write) {
  if (g.out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + g.out);
  write(f);
  if (!f) throw std::runtime_error("write failed: " + g.out);
}

int cmd_capacity(const Globals& g, const SweepSpec& s) {
  const auto pts = analyses(s);
  const int levels = pts.front().analysis->levels();
  CsvTable t;
  t.header = {"snr_db", "c_cm_bits", "c_pbicm_bits"};
  for (int l = 1; l <= levels; ++l) t.header.push_back("c_sub_" + std::to_string(l));
  for (const auto& p : pts) {
    const ChannelAnalysis& a = *p.analysis;
    std::vector<std::string> row{snr_cell(p), format_double(capacity_cm(a)), format_double(capacity_pbicm(a))};
    for (int l = 0; l < levels; ++l) row.push_back(format_double(capacity_subchannel(a, l)));
    t.rows.push_back(std::move(row));
  }
  emit(g, [&](std::ostream& os) { t.write(os); });
  return 0;
}

int cmd_exponents(const Globals& g, const SweepSpec& s, const std::string& curve_out) {
  auto pts = analyses(s);
  if (pts.size() != 1) throw std::invalid_argument("exponents takes a single SNR");
  const AnalysisPtr a = pts.front().analysis;
  const std::vector<double> rates =
      rate_grid(s.rate_start.value_or(0.0), s.rate_stop.value_or(capacity_cm(*a)), s.rate_step);

  const E0Evaluator full = E0Evaluator::unconstrained(a);
  const E0Evaluator comb = E0Evaluator::wbar_combined(a);
  const E0Evaluator wach = E0Evaluator::wachsmann_averaged(a);
  const std::vector<ExponentCurve> curves{
      exponent_curve(full, CurveKind::UnconstrainedRandomCoding, rates),
      exponent_curve(comb, CurveKind::PbicmRandomCoding, rates),
      exponent_curve(comb, CurveKind::PbicmNormalized, rates),
      exponent_curve(wach, CurveKind::PbicmRandomCoding, rates),
  };

  CsvTable t;
  t.header = {"rate_bits", "unconstrained", "pbicm", "pbicm_normalized", "wachsmann_flawed"};
  for (std::size_t i = 0; i < rates.size(); ++i) {
    std::vector<std::string> row{format_double(rates[i])};
    for (const auto& c : curves) row.push_back(format_double(c.values[i]));
    t.rows.push_back(std::move(row));
  }
  emit(g, [&](std::ostream& os) { t.write(os); });

  if (!curve_out.empty()) {
    const char* names[] = {"unconstrained", "pbicm", "pbicm_normalized", "wachsmann_flawed"};
    CsvTable long_form;
    long_form.header = {"rate_bits", "value_bits", "kind"};
    for (std::size_t k = 0; k < curves.size(); ++k)
      for (std::size_t i = 0; i < rates.size(); ++i)
        long_form.rows.push_back({format_double(rates[i]), format_double(curves[k].values[i]), names[k]});
    std::ofstream f(curve_out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + curve_out);
    long_form.write(f);
  }
  return 0;
}

int cmd_dispersion(const Globals& g, const SweepSpec& s) {
  Json rows = Json::array();
  for (const auto& p : analyses(s)) {
    Json j = to_json(dispersion_report(*p.analysis));
    j["constellation"] = p.analysis->constellation().name();
    j["channel"] = s.channel;
    if (p.snr_db) j["snr_db"] = *p.snr_db;
    rows.push_back(std::move(j));
  }
  emit(g, [&](std::ostream& os) { os << rows.dump(2) << '\n'; });
  return 0;
}

int cmd_ratebounds(const Globals& g, const SweepSpec& s) {
  CsvTable t;
  t.header = {"snr_db", "blocklength", "pe", "c_pbicm_bits", "v_pbicm_bits2", "lower_bits", "upper_bits"};
  for (const auto& p : analyses(s)) {
    const DispersionReport d = dispersion_report(*p.analysis);
    for (double n : s.blocklengths)
      for (double pe : s.error_probs) {
        const RateBounds b = rate_bounds(d, p.analysis->levels(), n, pe);
        t.rows.push_back({snr_cell(p), format_double(n), format_double(pe), format_double(d.c_pbicm),
                          format_double(d.v_pbicm), format_double(b.lower), format_double(b.upper)});
      }
  }
  emit(g, [&](std::ostream& os) { t.write(os); });
  return 0;
}

int cmd_simulate(const Globals& g, PbicmSimConfig cfg) {
  const SimulationResult r = simulate(cfg);
  Json j = to_json(r);
  j["config"] = to_json(cfg);
  emit(g, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return 0;
}

// Oracle suite. Exit code 0 iff every check passes.
int cmd_verify(const Globals& g, bool quick, const std::string& fault) {
  DitherMode pipeline_dither = DitherMode::Enabled;
  if (fault == "skip-dither") pipeline_dither = DitherMode::SkipAtTransmitter;
  else if (!fault.empty()) throw std::invalid_argument("unknown fault: " + fault);
  const std::uint64_t seed = g.seed;

  Json checks = Json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool pass, Json detail) {
    all = all && pass;
    detail["name"] = name;
    detail["pass"] = pass;
    checks.push_back(std::move(detail));
    std::cerr << (pass ? "PASS " : "FAIL ") << name << '\n';
  };

  // Combiner formulas against the explicit dithered-state matrix.
  {
    Rng rng = make_stream(seed, 0);
    std::exponential_distribution<double> e(1.0);
    double worst = 0.0;
    const int count = quick ? 5 : 20;
    for (int t = 0; t < count; ++t) {
      const std::size_t outputs = 3 + static_cast<std::size_t>(t % 3);
      std::vector<double> p(4 * outputs);
      for (std::size_t x = 0; x < 4; ++x) {
        double sum = 0.0;
        for (std::size_t y = 0; y < outputs; ++y) sum += p[x * outputs + y] = e(rng) + 1e-3;
        double acc = 0.0;
        for (std::size_t y = 0; y + 1 < outputs; ++y) acc += p[x * outputs + y] /= sum;
        p[x * outputs + outputs - 1] = 1.0 - acc;
      }
      const ChannelModel base = make_dmc(4, outputs, std::move(p));
      const Constellation cons = make_constellation(ConstellationKind::Qpsk);
      const AnalysisPtr a = analyze(base, cons);
      const DmcMatrix wbar = wbar_as_dmc(base, cons);
      const DispersionReport d = dispersion_report(*a);
      const E0Evaluator ev = E0Evaluator::wbar_combined(a);
      worst = std::max(worst, std::abs(d.c_wbar - dmc::capacity_blahut_arimoto(wbar)));
      worst = std::max(worst, std::abs(d.v_wbar - dmc::dispersion_uniform(wbar)));
      for (double rho : {0.1, 0.5, 1.0}) worst = std::max(worst, std::abs(ev(rho) - dmc::e0_uniform(wbar, rho)));
    }
    record("dmc-combiner-vs-explicit", worst <= 1e-9, {{"max_abs_diff", worst}, {"channels", count}});
  }

  const std::size_t samples = quick ? 20000 : 100000;
  auto equivalence = [&](const std::string& name, PbicmSimConfig sim) {
    sim.dither = pipeline_dither;
    sim.seed = seed;
    EquivalenceConfig cfg{sim, samples, false};
    const EquivalenceReport r = equivalence_test(cfg);
    record(name, r.p_value() > 0.01, to_json(r));
  };
  {
    PbicmSimConfig sim;
    std::vector<double> p{0.7, 0.1, 0.1, 0.1, 0.2, 0.5, 0.2, 0.1, 0.05, 0.15, 0.6, 0.2, 0.1, 0.1, 0.1, 0.7};
    sim.channel = make_dmc(4, 4, std::move(p));
    sim.cons = make_constellation(ConstellationKind::Qpsk);
    equivalence("dmc-llr-law", sim);
  }
  {
    PbicmSimConfig sim;
    sim.cons = make_constellation(ConstellationKind::Qpsk);
    sim.channel = awgn_from_snr(Snr{2.0});
    equivalence("qpsk-awgn-llr-law", sim);
  }
  {
    PbicmSimConfig sim;
    sim.cons = make_constellation(ConstellationKind::Psk8);
    sim.channel = rayleigh_from_snr(Snr{6.0});
    sim.code = BinaryCode::repetition(3);
    equivalence("8psk-rayleigh-llr-law", sim);
  }
  {
    PbicmSimConfig sim;
    sim.cons = make_constellation(ConstellationKind::Qpsk);
    sim.channel = awgn_from_snr(Snr{2.0});
    sim.trials = quick ? 20000 : 100000;
    sim.seed = seed;
    sim.dither = pipeline_dither;
    const SimulationResult r = simulate(sim);
    const double pe = r.pe_overall.value;
    const double pw = r.pe_wbar_direct.value;
    const double lo = 3.0 * std::hypot(r.pe_overall.sigma(), r.pe_wbar_direct.sigma());
    const double hi = 3.0 * std::hypot(r.pe_overall.sigma(), r.levels * r.pe_wbar_direct.sigma());
    const bool pass = pw <= pe + lo && pe <= r.levels * pw + hi;
    record("error-probability-sandwich", pass, {{"pe_overall", pe}, {"pe_wbar_direct", pw}, {"trials", r.trials}});
  }

  Json report{{"quick", quick}, {"seed", seed}, {"checks", checks}, {"pass", all}};
  if (!fault.empty()) report["inject_fault"] = fault;
  emit(g, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  return all ? 0 : 1;
}

int cmd_constellation(const Globals& g, const std::string& name) {
  const Json j = to_json(make_constellation(parse_constellation_kind(name)));
  emit(g, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return 0;
}

void set_threads_from_env() {
  if (const char* v = std::getenv("PBICM_NUM_THREADS")) {
    const int n = std::atoi(v);
    if (n < 1) throw std::invalid_argument("PBICM_NUM_THREADS must be a positive integer");
    omp_set_num_threads(n);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel bit-interleaved coded modulation: capacities, exponents, dispersion and simulation"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->each([&](const std::string&) { g.seed_given = true; });
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);

  SweepSpec spec;
  auto add_sweep = [&](CLI::App* sub) {
    sub->add_option("--constellation", spec.constellation, "bpsk, qpsk, 8psk, 16qam or 64qam");
    sub->add_option("--channel", spec.channel, "awgn, rayleigh or dmc");
    sub->add_option("--dmc-file", spec.dmc_file, "Transition matrix (CSV or JSON) for --channel dmc");
    sub->add_option("--snr", spec.snr_db, "Es/N0 in dB, comma separated")->delimiter(',');
    sub->add_option("--hermite-nodes", spec.hermite, "Gauss-Hermite nodes per dimension");
    sub->add_option("--laguerre-nodes", spec.laguerre, "Gauss-Laguerre nodes for the fading gain");
  };

  auto* capacity = app.add_subcommand("capacity", "Coded-modulation, PBICM and sub-channel capacities");
  add_sweep(capacity);

  std::string curve_out;
  auto* exponents = app.add_subcommand("exponents", "Random-coding exponents on a rate grid");
  add_sweep(exponents);
  exponents->add_option("--rate-start", spec.rate_start, "First rate (bits per channel use)");
  exponents->add_option("--rate-stop", spec.rate_stop, "Last rate (default: coded-modulation capacity)");
  exponents->add_option("--rate-step", spec.rate_step, "Rate step")->check(CLI::PositiveNumber);
  exponents->add_option("--curves", curve_out, "Also write the curves as rate_bits,value_bits,kind");

  auto* dispersion = app.add_subcommand("dispersion", "Dispersion report as JSON");
  add_sweep(dispersion);

  auto* ratebounds = app.add_subcommand("ratebounds", "Normal-approximation rate bounds");
  add_sweep(ratebounds);
  ratebounds->add_option("--n,--blocklengths", spec.blocklengths, "Blocklengths, comma separated")->delimiter(',');
  ratebounds->add_option("--pe", spec.error_probs, "Error probabilities, comma separated")->delimiter(',');

  std::optional<std::size_t> trials;
  std::string sim_code, sim_dither;
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo simulation of the PBICM pipeline");
  add_sweep(sim);
  sim->add_option("--trials", trials, "Number of trials");
  sim->add_option("--code", sim_code, "hamming74, repetition:N or random:N:M");
  sim->add_option("--dither", sim_dither, "enabled, disabled or skip-at-transmitter");

  bool quick = false;
  std::string fault;
  auto* verify = app.add_subcommand("verify", "Oracle suite; exits non-zero when a check fails");
  verify->add_flag("--quick", quick, "Smaller sample sizes");
  verify->add_option("--inject-fault", fault, "skip-dither: transmitter omits the dither");

  std::string cons_name = "qpsk";
  auto* constellation = app.add_subcommand("constellation", "Points and labels of a constellation as JSON");
  constellation->add_option("name", cons_name, "Constellation name");

  CLI11_PARSE(app, argc, argv);

  try {
    set_threads_from_env();
    Json config = Json::object();
    if (!g.config.empty()) config = read_json(g.config);
    if (!sim->parsed()) {
      // Flags were parsed into `spec` already; reapply them over the config.
      SweepSpec from_config;
      apply_config(from_config, config);
      SweepSpec merged = from_config;
      auto* active = app.get_subcommands().front();
      auto given = [&](const char* opt) { return active->get_option_no_throw(opt) && active->count(opt) > 0; };
      if (given("--constellation")) merged.constellation = spec.constellation;
      if (given("--channel")) merged.channel = spec.channel;
      if (given("--dmc-file")) merged.dmc_file = spec.dmc_file;
      if (given("--snr")) merged.snr_db = spec.snr_db;
      if (given("--hermite-nodes")) merged.hermite = spec.hermite;
      if (given("--laguerre-nodes")) merged.laguerre = spec.laguerre;
      if (given("--rate-start")) merged.rate_start = spec.rate_start;
      if (given("--rate-stop")) merged.rate_stop = spec.rate_stop;
      if (given("--rate-step")) merged.rate_step = spec.rate_step;
      if (given("--n")) merged.blocklengths = spec.blocklengths;
      if (given("--pe")) merged.error_probs = spec.error_probs;
      spec = merged;
    }

    if (capacity->parsed()) return cmd_capacity(g, spec);
    if (exponents->parsed()) return cmd_exponents(g, spec, curve_out);
    if (dispersion->parsed()) return cmd_dispersion(g, spec);
    if (ratebounds->parsed()) return cmd_ratebounds(g, spec);
    if (verify->parsed()) return cmd_verify(g, quick, fault);
    if (constellation->parsed()) return cmd_constellation(g, cons_name);
    if (sim->parsed()) {
      Json j = config;
      auto given = [&](const char* opt) { return sim->count(opt) > 0; };
      if (given("--constellation")) j["constellation"] = spec.constellation;
      if (given("--channel") || given("--dmc-file")) {
        Json c{{"kind", spec.channel}};
        if (!spec.dmc_file.empty()) c["file"] = spec.dmc_file;
        j["channel"] = c;
      }
      if (given("--snr")) {
        if (spec.snr_db.size() != 1) throw std::invalid_argument("simulate takes a single SNR");
        j["snr_db"] = spec.snr_db.front();
        if (j.contains("channel") && j["channel"].is_object()) j["channel"].erase("snr_db");
      }
      if (trials) j["trials"] = *trials;
      if (!sim_dither.empty()) j["dither"] = sim_dither;
      if (!sim_code.empty()) {
        std::vector<std::string> parts;
        std::stringstream ss(sim_code);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        Json code{{"kind", parts[0]}};
        if (parts[0] == "repetition" && parts.size() == 2) code["n"] = std::stoul(parts[1]);
        if (parts[0] == "random" && parts.size() == 3) {
          code["n"] = std::stoul(parts[1]);
          code["m"] = std::stoul(parts[2]);
          code["seed"] = g.seed;
        }
        j["code"] = code;
      }
      if (g.seed_given) j["seed"] = g.seed;
      return cmd_simulate(g, sim_config_from_json(j));
    }
  } catch (const QuadratureError& e) {
    std::cerr << "error: " << e.what() << " (raise --hermite-nodes / --laguerre-nodes)\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
