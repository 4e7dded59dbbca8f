#include <doctest.h>

#include <cmath>
#include <limits>

#include "altchain/io.hpp"

using namespace altchain;
using namespace altchain::io;

TEST_CASE("potential documents round-trip") {
  for (const auto& p : {Potential::power_law(-1.5, 3.0), Potential::gaussian(0.5, 0.2), Potential::morse(1.0, 2.0, 0.7),
                        Potential::zero()}) {
    const json j = to_json(p);
    const Potential back = potential_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(back(1.3) == p(1.3));
  }
}

TEST_CASE("triple documents") {
  const json j = json::parse(R"({"f11": {"kind": "powerlaw", "c": -1, "p": 1},
                                 "f22": {"kind": "powerlaw", "c": -1, "p": 1},
                                 "f12": {"kind": "powerlaw", "c": 1, "p": 1}})");
  const PotentialTriple t = triple_from_json(j);
  CHECK(t.f12(2.0) == 0.5);
  CHECK(t.f22(2.0) == -0.5);
  CHECK(to_json(t) == j);
}

TEST_CASE("schema violations name the offending key") {
  CHECK_THROWS_WITH_AS(potential_from_json(json::parse(R"({"kind": "yukawa", "c": 1})")), doctest::Contains("yukawa"),
                       ParseError);
  CHECK_THROWS_WITH_AS(potential_from_json(json::parse(R"({"kind": "gaussian", "c": 1, "w": 1, "x": 2})")),
                       doctest::Contains("'x'"), ParseError);
  CHECK_THROWS_WITH_AS(potential_from_json(json::parse(R"({"kind": "gaussian", "c": 1})")), doctest::Contains("'w'"),
                       ParseError);
  CHECK_THROWS_WITH_AS(potential_from_json(json::parse(R"({"kind": "gaussian", "c": "big", "w": 1})")),
                       doctest::Contains("'c'"), ParseError);
  CHECK_THROWS_AS(potential_from_json(json::parse(R"([1, 2])")), ParseError);
  CHECK_THROWS_WITH_AS(triple_from_json(json::parse(R"({"f11": {"kind": "zero"}, "f22": {"kind": "zero"}})")),
                       doctest::Contains("f12"), ParseError);
  CHECK_THROWS_WITH_AS(
      triple_from_json(json::parse(
          R"({"f11": {"kind": "zero"}, "f22": {"kind": "zero"}, "f12": {"kind": "zero"}, "f21": {"kind": "zero"}})")),
      doctest::Contains("f21"), ParseError);
  CHECK_THROWS_AS(potential_from_json(json::parse(R"({"kind": "gaussian", "c": 1, "w": -1})")), PreconditionError);
}

TEST_CASE("configuration documents") {
  const Configuration c = configuration_from_json(json::parse(R"({"N": 4, "rho": 2, "gaps": [0.5, 0.5, 0.4, 0.6]})"));
  CHECK(c.size() == 4);
  CHECK(c.rho() == 2.0);
  CHECK(configuration_from_json(to_json(c)).gaps()[3] == 0.6);
  CHECK_THROWS_AS(configuration_from_json(json::parse(R"({"N": 4, "rho": 1, "gaps": [1, 1, 1, 0]})")),
                  PreconditionError);
  CHECK_THROWS_AS(configuration_from_json(json::parse(R"({"N": 3, "rho": 1, "gaps": [1, 1, 1, 1]})")),
                  PreconditionError);
  CHECK_THROWS_AS(configuration_from_json(json::parse(R"({"N": 4.5, "rho": 1, "gaps": [1, 1, 1, 1]})")), ParseError);
  CHECK_THROWS_AS(configuration_from_json(json::parse(R"({"N": 4, "rho": 1, "gaps": [1, 1, "a", 1]})")), ParseError);
  CHECK_THROWS_AS(configuration_from_json(json::parse(R"({"N": 4, "rho": 1, "gaps": [1, 1, 1, 1], "x0": 0})")),
                  ParseError);
}

TEST_CASE("report serialization") {
  const EnergyReport e = energy(Configuration::equidistant(4, 1.0), riesz_triple(1.0));
  const json je = to_json(e);
  for (const char* key : {"energy", "image_count", "tail_bound", "breakdown", "summation_order"}) {
    CHECK(je.contains(key));
  }
  CHECK(je["breakdown"].contains("f12"));

  CriterionReport r;
  r.criterion = Criterion::StabilitySpectrum;
  r.verdict = Verdict::Fail;
  r.witness.set("S_min", -1.0);
  r.witness.set("bad", std::numeric_limits<double>::infinity());
  r.witness.note = "x";
  const json jr = to_json(r);
  CHECK(jr["criterion"] == "StabilitySpectrum");
  CHECK(jr["verdict"] == "FAIL");
  CHECK(jr["witness"]["values"]["S_min"] == -1.0);
  CHECK(jr["witness"]["values"]["bad"].is_null());
  CHECK(jr.contains("grid"));
  CHECK(json::parse(jr.dump()) == jr);
}

TEST_CASE("results CSV layout") {
  BasinScanOptions opt;
  opt.n = 4;
  opt.trials = 3;
  const auto results = basin_scan(riesz_triple(2.0), opt, Tolerance{1e-10, 1e-12, 500});
  const std::string csv = results_csv(results);
  CHECK(csv.rfind("trial,converged,final_energy,distance_to_equidistant,iterations\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.find("\n0,1,") != std::string::npos);
}

TEST_CASE("format_double round-trips with the shortest form") {
  CHECK(format_double(0.3) == "0.3");
  CHECK(format_double(1.0) == "1");
  for (double v : {std::numbers::pi, 1e-300, -2.5e17, 0.1 + 0.2}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("manifest") {
  RunManifest m{"scan", {{"quantity", "F"}}, std::nullopt, kToolVersion, ""};
  json j = to_json(m);
  CHECK(j["seed"].is_null());
  CHECK_FALSE(j.contains("timestamp"));
  m.seed = 7;
  m.timestamp = iso8601_now();
  j = to_json(m);
  CHECK(j["seed"] == 7);
  CHECK(j["timestamp"].get<std::string>().size() == 20);
}

TEST_CASE("malformed documents") {
  CHECK_THROWS_AS(parse_json_text("{\"N\": ", "x"), ParseError);
  CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), ParseError);
}
