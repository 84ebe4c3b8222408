#include "pbicm/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pbicm {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

Json to_json(const Constellation& c) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Complex p = c.point(i);
    pts.push_back({{"index", i}, {"re", p.real()}, {"im", p.imag()}, {"label", c.label_of_point(i)}});
  }
  return {{"name", c.name()}, {"L", c.bits_per_symbol()}, {"points", pts}};
}

DmcMatrix dmc_from_json(const Json& j) {
  const Json& rows = j.at("matrix");
  const std::size_t x = j.contains("inputs") ? j.at("inputs").get<std::size_t>() : rows.size();
  if (rows.size() != x) throw std::invalid_argument("matrix row count does not match \"inputs\"");
  if (x == 0) throw std::invalid_argument("matrix has no rows");
  const std::size_t y = j.contains("outputs") ? j.at("outputs").get<std::size_t>() : rows.at(0).size();
  std::vector<double> p;
  p.reserve(x * y);
  for (const auto& r : rows) {
    if (r.size() != y) throw std::invalid_argument("matrix row length does not match \"outputs\"");
    for (const auto& v : r) p.push_back(v.get<double>());
  }
  return DmcMatrix(x, y, std::move(p));
}

Json to_json(const DmcMatrix& m) {
  Json rows = Json::array();
  for (std::size_t x = 0; x < m.inputs(); ++x) {
    const auto r = m.row(x);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"inputs", m.inputs()}, {"outputs", m.outputs()}, {"matrix", rows}};
}

namespace {

std::vector<double> split_numbers(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    out.push_back(std::stod(cell, &used));
  }
  return out;
}

DmcMatrix dmc_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty DMC file");
  const auto dims = split_numbers(line);
  if (dims.size() != 2) throw std::invalid_argument("DMC CSV header must be \"inputs,outputs\"");
  const auto x = static_cast<std::size_t>(dims[0]);
  const auto y = static_cast<std::size_t>(dims[1]);
  std::vector<double> p;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto row = split_numbers(line);
    if (row.size() != y) throw std::invalid_argument("DMC CSV row length does not match the header");
    p.insert(p.end(), row.begin(), row.end());
  }
  if (p.size() != x * y) throw std::invalid_argument("DMC CSV row count does not match the header");
  return DmcMatrix(x, y, std::move(p));
}

}  // namespace

DmcMatrix load_dmc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  const int first = (in >> std::ws).peek();
  if (first == '{') return dmc_from_json(Json::parse(in));
  return dmc_from_csv(in);
}

void write_dmc_csv(std::ostream& os, const DmcMatrix& m) {
  os << m.inputs() << ',' << m.outputs() << '\n';
  for (std::size_t x = 0; x < m.inputs(); ++x) {
    for (std::size_t y = 0; y < m.outputs(); ++y) os << (y ? "," : "") << format_double(m(x, y));
    os << '\n';
  }
}

BinaryCode code_from_json(const Json& j) {
  const std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
  if (kind == "hamming74") return BinaryCode::hamming74();
  if (kind == "repetition") return BinaryCode::repetition(j.at("n").get<std::size_t>());
  if (kind == "random") {
    return BinaryCode::random_codebook(j.at("n").get<std::size_t>(), j.at("m").get<std::size_t>(),
                                       j.value("seed", std::uint64_t{1}));
  }
  throw std::invalid_argument("unknown code kind: " + kind);
}

Json to_json(const BinaryCode& code) {
  switch (code.kind()) {
    case CodeKind::Hamming74: return {{"kind", "hamming74"}};
    case CodeKind::Repetition: return {{"kind", "repetition"}, {"n", code.length()}};
    case CodeKind::RandomCodebook:
      return {{"kind", "random"}, {"n", code.length()}, {"m", code.size()}, {"seed", code.seed()}};
  }
  return {};
}

ChannelModel channel_from_json(const Json& j, const Constellation& cons, std::optional<double> default_snr_db) {
  const std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
  auto snr = [&] {
    if (j.is_object() && j.contains("snr_db")) return j.at("snr_db").get<double>();
    if (default_snr_db) return *default_snr_db;
    throw std::invalid_argument("channel \"" + kind + "\" needs snr_db");
  };
  ChannelModel ch = [&] {
    if (kind == "awgn") return awgn_from_snr(Snr{snr()});
    if (kind == "rayleigh") return rayleigh_from_snr(Snr{snr()});
    if (kind == "dmc") {
      if (j.is_object() && j.contains("file")) return ChannelModel(load_dmc(j.at("file").get<std::string>()));
      if (j.is_object() && j.contains("matrix")) return ChannelModel(dmc_from_json(j));
      throw std::invalid_argument("dmc channel needs \"matrix\" or \"file\"");
    }
    throw std::invalid_argument("unknown channel kind: " + kind);
  }();
  check_compatible(ch, cons);
  return ch;
}

DitherMode parse_dither_mode(const std::string& s) {
  if (s == "enabled") return DitherMode::Enabled;
  if (s == "disabled") return DitherMode::Disabled;
  if (s == "skip-at-transmitter") return DitherMode::SkipAtTransmitter;
  throw std::invalid_argument("unknown dither mode: " + s);
}

std::string to_string(DitherMode m) {
  switch (m) {
    case DitherMode::Enabled: return "enabled";
    case DitherMode::Disabled: return "disabled";
    case DitherMode::SkipAtTransmitter: return "skip-at-transmitter";
  }
  return "?";
}

PbicmSimConfig sim_config_from_json(const Json& j) {
  PbicmSimConfig cfg;
  if (j.contains("code")) cfg.code = code_from_json(j.at("code"));
  if (j.contains("constellation")) {
    cfg.cons = make_constellation(parse_constellation_kind(j.at("constellation").get<std::string>()));
  }
  std::optional<double> snr;
  if (j.contains("snr_db")) snr = j.at("snr_db").get<double>();
  if (j.contains("channel")) {
    const Json& c = j.at("channel");
    if (c.is_object() && c.contains("snr_db")) snr = c.at("snr_db").get<double>();
    cfg.channel = channel_from_json(c, cfg.cons, snr);
  } else {
    cfg.channel = awgn_from_snr(Snr{snr.value_or(0.0)});
    if (!snr) snr = 0.0;
  }
  cfg.snr_db = cfg.channel.is_discrete() ? std::nullopt : snr;
  if (j.contains("trials")) {
    const auto t = j.at("trials").get<long long>();
    if (t < 1) throw std::invalid_argument("trials must be >= 1");
    cfg.trials = static_cast<std::size_t>(t);
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("dither")) cfg.dither = parse_dither_mode(j.at("dither").get<std::string>());
  check_compatible(cfg.channel, cfg.cons);
  return cfg;
}

Json to_json(const PbicmSimConfig& cfg) {
  Json ch;
  switch (cfg.channel.kind()) {
    case ChannelKind::Awgn: ch = {{"kind", "awgn"}}; break;
    case ChannelKind::RayleighCsi: ch = {{"kind", "rayleigh"}}; break;
    case ChannelKind::Dmc: ch = to_json(cfg.channel.dmc()); ch["kind"] = "dmc"; break;
  }
  if (cfg.snr_db) ch["snr_db"] = *cfg.snr_db;
  return {{"code", to_json(cfg.code)}, {"constellation", std::string(cfg.cons.name())}, {"channel", ch},
          {"trials", cfg.trials},      {"seed", cfg.seed},                              {"dither", to_string(cfg.dither)}};
}

Json to_json(const Estimate& e) {
  return {{"value", e.value}, {"ci_lower", e.lower}, {"ci_upper", e.upper}, {"errors", e.successes},
          {"trials", e.trials}};
}

Json to_json(const SimulationResult& r) {
  Json levels = Json::array();
  for (const auto& e : r.pe_per_level) levels.push_back(to_json(e));
  return {{"trials", r.trials},
          {"seed", r.seed},
          {"levels", r.levels},
          {"pe_overall", to_json(r.pe_overall)},
          {"pe_per_level", levels},
          {"pe_wbar_direct", to_json(r.pe_wbar_direct)},
          {"ber_overall", r.ber_overall},
          {"ber_per_level", r.ber_per_level},
          {"ber_wbar_direct", r.ber_wbar_direct}};
}

Json to_json(const DispersionReport& r) {
  Json subs = Json::array();
  for (const auto& s : r.per_subchannel) subs.push_back({{"capacity_bits", s.capacity}, {"dispersion_bits2", s.dispersion}});
  return {{"subchannels", subs},   {"c_wbar_bits", r.c_wbar},           {"v_wbar_bits2", r.v_wbar},
          {"c_pbicm_bits", r.c_pbicm}, {"v_pbicm_bits2", r.v_pbicm}, {"state_penalty_bits2", r.penalty}};
}

Json to_json(const EquivalenceReport& r) {
  auto one = [](const TestResult& t) { return Json{{"statistic", t.statistic}, {"p_value", t.p_value}}; };
  return {{"method", r.method == EquivalenceMethod::ChiSquare ? "chi-square" : "kolmogorov-smirnov"},
          {"samples_per_bit", r.samples_per_bit},
          {"given_zero", one(r.given_zero)},
          {"given_one", one(r.given_one)}};
}

void CsvTable::write(std::ostream& os) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

}  // namespace pbicm
