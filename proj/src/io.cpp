#include "altchain/io.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace altchain::io {
namespace {

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw ParseError(where + ": expected a JSON object");
  }
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (allowed.count(key) == 0) {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  }
}

double number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) {
    throw ParseError(where + ": missing key '" + key + "'");
  }
  const json& v = j.at(key);
  if (!v.is_number()) {
    throw ParseError(where + ": key '" + key + "' must be a number");
  }
  return v.get<double>();
}

// Non-finite values cannot be represented in JSON.
json number_json(double v) {
  if (std::isfinite(v)) {
    return v;
  }
  return nullptr;
}

json witness_json(const Witness& w) {
  json values = json::object();
  for (const auto& [k, v] : w.values) {
    values[k] = number_json(v);
  }
  return {{"values", values}, {"note", w.note}};
}

}  // namespace

Potential potential_from_json(const json& j, const std::string& where) {
  require_object(j, where);
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw ParseError(where + ": missing string key 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "powerlaw") {
      reject_unknown(j, {"kind", "c", "p"}, where);
      return Potential::power_law(number(j, "c", where), number(j, "p", where));
    }
    if (kind == "gaussian") {
      reject_unknown(j, {"kind", "c", "w"}, where);
      return Potential::gaussian(number(j, "c", where), number(j, "w", where));
    }
    if (kind == "morse") {
      reject_unknown(j, {"kind", "D", "a", "r_e"}, where);
      return Potential::morse(number(j, "D", where), number(j, "a", where), number(j, "r_e", where));
    }
    if (kind == "zero") {
      reject_unknown(j, {"kind"}, where);
      return Potential::zero();
    }
  } catch (const DomainError& e) {
    throw PreconditionError(where + ": " + e.what());
  }
  throw ParseError(where + ".kind: unknown potential kind '" + kind + "'");
}

json to_json(const Potential& p) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PowerLaw>) {
          return {{"kind", "powerlaw"}, {"c", k.c}, {"p", k.p}};
        } else if constexpr (std::is_same_v<K, Gaussian>) {
          return {{"kind", "gaussian"}, {"c", k.c}, {"w", k.w}};
        } else if constexpr (std::is_same_v<K, Morse>) {
          return {{"kind", "morse"}, {"D", k.depth}, {"a", k.stiffness}, {"r_e", k.r_e}};
        } else {
          return {{"kind", "zero"}};
        }
      },
      p.kind());
}

PotentialTriple triple_from_json(const json& j) {
  require_object(j, "triple");
  reject_unknown(j, {"f11", "f22", "f12"}, "triple");
  for (const char* key : {"f11", "f22", "f12"}) {
    if (!j.contains(key)) {
      throw ParseError(std::string("triple: missing key '") + key + "'");
    }
  }
  return {potential_from_json(j.at("f11"), "f11"), potential_from_json(j.at("f22"), "f22"),
          potential_from_json(j.at("f12"), "f12")};
}

json to_json(const PotentialTriple& t) {
  return {{"f11", to_json(t.f11)}, {"f22", to_json(t.f22)}, {"f12", to_json(t.f12)}};
}

Configuration configuration_from_json(const json& j) {
  require_object(j, "configuration");
  reject_unknown(j, {"N", "rho", "gaps"}, "configuration");
  if (!j.contains("N") || !j.at("N").is_number_integer()) {
    throw ParseError("configuration: key 'N' must be an integer");
  }
  const auto n = j.at("N").get<long long>();
  const double rho = number(j, "rho", "configuration");
  if (!j.contains("gaps") || !j.at("gaps").is_array()) {
    throw ParseError("configuration: key 'gaps' must be an array");
  }
  std::vector<double> gaps;
  for (const auto& g : j.at("gaps")) {
    if (!g.is_number()) {
      throw ParseError("configuration: every entry of 'gaps' must be a number");
    }
    gaps.push_back(g.get<double>());
  }
  if (static_cast<long long>(gaps.size()) != n) {
    throw PreconditionError("configuration: N = " + std::to_string(n) + " but " +
                            std::to_string(gaps.size()) + " gaps given");
  }
  return Configuration(std::move(gaps), rho);
}

json to_json(const Configuration& c) {
  return {{"N", c.size()},
          {"rho", c.rho()},
          {"gaps", std::vector<double>(c.gaps().begin(), c.gaps().end())}};
}

json to_json(const EnergyReport& r) {
  return {{"energy", r.energy},
          {"image_count", r.image_count},
          {"tail_bound", r.tail_bound},
          {"breakdown", {{"f12", r.breakdown.f12}, {"f11", r.breakdown.f11}, {"f22", r.breakdown.f22}}},
          {"summation_order", r.summation_order}};
}

json to_json(const CriterionReport& r) {
  return {{"criterion", to_string(r.criterion)},
          {"verdict", to_string(r.verdict)},
          {"witness", witness_json(r.witness)},
          {"grid",
           {{"spacing", r.grid.spacing},
            {"lo", number_json(r.grid.lo)},
            {"hi", number_json(r.grid.hi)},
            {"points", r.grid.points}}}};
}

json to_json(const MinimizeResult& r) {
  return {{"converged", r.converged},
          {"iterations", r.iterations},
          {"start_energy", r.start_energy},
          {"final_energy", r.final_energy},
          {"distance_to_equidistant", r.distance_to_equidistant},
          {"gradient_norm", r.gradient_norm},
          {"message", r.message},
          {"start_config", to_json(r.start_config)},
          {"final_config", to_json(r.final_config)}};
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

std::string results_csv(const std::vector<MinimizeResult>& results) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << "trial,converged,final_energy,distance_to_equidistant,iterations\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out << i << ',' << (r.converged ? 1 : 0) << ',' << format_double(r.final_energy) << ','
        << format_double(r.distance_to_equidistant) << ',' << r.iterations << '\n';
  }
  return out.str();
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": malformed JSON: " + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path + ": cannot open file");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path);
}

json to_json(const RunManifest& m) {
  json j = {{"command", m.command}, {"parameters", m.parameters}, {"tool_version", m.tool_version}};
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  if (!m.timestamp.empty()) {
    j["timestamp"] = m.timestamp;
  }
  return j;
}

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm utc{};
  gmtime_r(&t, &utc);
  std::ostringstream out;
  out << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace altchain::io
