#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbicm/channel.hpp"
#include "pbicm/codec.hpp"
#include "pbicm/constellation.hpp"
#include "pbicm/info.hpp"
#include "pbicm/simulate.hpp"

namespace pbicm {

using Json = nlohmann::json;

/// printf("%.9g"); the number format of every CSV file.
std::string format_double(double v);

Json to_json(const Constellation& c);

/// {"inputs": X, "outputs": Y, "matrix": [[...], ...]}.
DmcMatrix dmc_from_json(const Json& j);
Json to_json(const DmcMatrix& m);

/// Reads a transition matrix from a JSON file (see dmc_from_json) or a CSV
/// file whose first line is "X,Y" followed by X rows of Y probabilities.
DmcMatrix load_dmc(const std::string& path);

/// Transition matrix as CSV in the format accepted by load_dmc.
void write_dmc_csv(std::ostream& os, const DmcMatrix& m);

BinaryCode code_from_json(const Json& j);
Json to_json(const BinaryCode& code);

/// {"kind": "awgn"|"rayleigh"|"dmc", "snr_db": ..., "matrix"/"file": ...}.
/// A string is shorthand for {"kind": ...}; `snr_db` falls back to
/// `default_snr_db` when absent.
ChannelModel channel_from_json(const Json& j, const Constellation& cons, std::optional<double> default_snr_db = {});

DitherMode parse_dither_mode(const std::string& s);
std::string to_string(DitherMode m);

PbicmSimConfig sim_config_from_json(const Json& j);
Json to_json(const PbicmSimConfig& cfg);

Json to_json(const Estimate& e);
Json to_json(const SimulationResult& r);
Json to_json(const DispersionReport& r);
Json to_json(const EquivalenceReport& r);

/// One CSV file: a header line and rows already formatted as cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& os) const;
};

}  // namespace pbicm
