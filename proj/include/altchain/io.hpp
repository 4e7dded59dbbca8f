#pragma once

// JSON/CSV surfaces: triple and configuration documents, reports, manifests.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "altchain/chain.hpp"
#include "altchain/criteria.hpp"
#include "altchain/optimize.hpp"
#include "altchain/potentials.hpp"

namespace altchain::io {

using nlohmann::json;

/// {"kind":"powerlaw","c":1.0,"p":3.0} and friends. Throws ParseError on
/// unknown kinds or keys; the message names the offending key.
Potential potential_from_json(const json& j, const std::string& where = "potential");
json to_json(const Potential& p);

/// {"f11": {...}, "f22": {...}, "f12": {...}}
PotentialTriple triple_from_json(const json& j);
json to_json(const PotentialTriple& t);

/// {"N": 8, "rho": 1.0, "gaps": [...]}. Schema errors throw ParseError;
/// physical violations (gap <= 0, wrong sum) throw PreconditionError.
Configuration configuration_from_json(const json& j);
json to_json(const Configuration& c);

json to_json(const EnergyReport& r);
json to_json(const CriterionReport& r);
json to_json(const MinimizeResult& r);

/// Header trial,converged,final_energy,distance_to_equidistant,iterations.
std::string results_csv(const std::vector<MinimizeResult>& results);

/// Shortest representation that round-trips exactly.
std::string format_double(double v);

/// Parses a whole document; ParseError on malformed JSON.
json parse_json_text(const std::string& text, const std::string& source);
json read_json_file(const std::string& path);

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::optional<std::uint64_t> seed;
  std::string tool_version;
  /// ISO-8601; empty when omitted for byte-stable output.
  std::string timestamp;
};

json to_json(const RunManifest& m);
std::string iso8601_now();

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace altchain::io
