#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/zeta.hpp>
#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "altchain");
  std::ostringstream out;
  std::ostringstream err;
  const int code = altchain::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("altchain_cli_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(path / name) << content;
    return (path / name).string();
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kRiesz1 = R"({"f11": {"kind": "powerlaw", "c": -1, "p": 1},
                          "f22": {"kind": "powerlaw", "c": -1, "p": 1},
                          "f12": {"kind": "powerlaw", "c": 1, "p": 1}})";

}  // namespace

TEST_CASE("energy command") {
  TempDir dir;
  const auto triple = dir.write("t.json", kRiesz1);
  const auto config = dir.write("c.json", R"({"N": 8, "rho": 1, "gaps": [1, 1, 1, 1, 1, 1, 1, 1]})");
  const Run ok = run({"energy", "--config", config, "--triple", triple});
  CHECK(ok.code == 0);
  const json j = json::parse(ok.out);
  CHECK(std::abs(j["energy"].get<double>() - 1.3862944) < 1e-7);

  const auto bad = dir.write("bad.json", R"({"N": 8, "rho": 1, "gaps": [1, 1, 1, 1, 1, 1, 1, 0]})");
  const Run gap = run({"energy", "--config", bad, "--triple", triple});
  CHECK(gap.code == 3);
  CHECK(gap.out.empty());

  const auto broken = dir.write("broken.json", R"({"N": 8, "rho": )");
  CHECK(run({"energy", "--config", broken, "--triple", triple}).code == 2);
  CHECK(run({"energy", "--config", config, "--triple", dir.file("missing.json")}).code == 2);

  const auto charged = dir.write("q.json", R"({"f11": {"kind": "powerlaw", "c": -1, "p": 1},
                                               "f22": {"kind": "powerlaw", "c": -2, "p": 1},
                                               "f12": {"kind": "powerlaw", "c": 1, "p": 1}})");
  const Run nn = run({"energy", "--config", config, "--triple", charged});
  CHECK(nn.code == 3);
  CHECK(nn.err.find("non-neutral non-tempered triple") != std::string::npos);

  const auto unknown = dir.write("u.json", R"({"f11": {"kind": "zero"}, "f22": {"kind": "zero"},
                                               "f12": {"kind": "yukawa"}})");
  const Run uk = run({"energy", "--config", config, "--triple", unknown});
  CHECK(uk.code == 2);
  CHECK(uk.err.find("yukawa") != std::string::npos);
}

TEST_CASE("minimize command") {
  TempDir dir;
  const auto triple = dir.write("t.json", kRiesz1);
  const auto csv1 = dir.file("a.csv");
  const auto csv2 = dir.file("b.csv");
  const Run a = run({"minimize", "--triple", triple, "--n", "8", "--trials", "20", "--seed", "7", "--csv", csv1});
  CHECK(a.code == 0);
  const json s = json::parse(a.out);
  CHECK(s["fraction_equidistant"] == 1.0);
  CHECK(s["manifest"]["seed"] == 7);
  const Run b = run({"minimize", "--riesz", "1", "--n", "8", "--trials", "20", "--seed", "7", "--csv", csv2,
                     "--threads", "3"});
  CHECK(b.code == 0);
  CHECK(slurp(csv1) == slurp(csv2));
  CHECK(fs::exists(csv1 + ".manifest.json"));
  const json manifest = json::parse(slurp(csv1 + ".manifest.json"));
  CHECK(manifest.contains("timestamp"));
  CHECK(manifest["command"] == "minimize");

  const Run c = run({"minimize", "--riesz", "1", "--n", "8", "--trials", "5", "--seed", "7"});
  const Run d = run({"minimize", "--riesz", "1", "--n", "8", "--trials", "5", "--seed", "7"});
  CHECK(c.out == d.out);
  CHECK(json::parse(c.out)["results"].size() == 5);

  CHECK(run({"minimize", "--riesz", "1", "--trials", "0"}).code == 3);
  CHECK(run({"minimize", "--riesz", "1", "--n", "7"}).code == 3);
  CHECK(run({"minimize", "--riesz", "1", "--perturbation", "1.5"}).code == 3);
  CHECK(run({"minimize"}).code == 3);
  CHECK(run({"minimize", "--riesz", "1", "--n", "abc"}).code == 3);
}

TEST_CASE("check command exit codes") {
  const Run cor = run({"check", "--criterion", "corollary", "--p", "3", "--m", "1"});
  CHECK(cor.code == 0);
  const json j = json::parse(cor.out);
  CHECK(j["verdict"] == "PASS");
  CHECK(j["criterion"] == "CorollaryWindow");
  CHECK(cor.err.find("PASS") != std::string::npos);

  const Run riesz = run({"check", "--criterion", "riesz", "--p", "0.5"});
  CHECK(riesz.code == 1);
  CHECK(json::parse(riesz.out)["verdict"] == "FAIL");

  CHECK(run({"check", "--criterion", "fourier", "--riesz", "1"}).code == 4);
  CHECK(run({"check", "--criterion", "thm2", "--p", "3", "--m", "1"}).code == 0);
  CHECK(run({"check", "--criterion", "thm2", "--powerlaw", "3", "--p", "3", "--m", "20"}).code == 3);
  CHECK(run({"check", "--criterion", "thm2", "--p", "3", "--m", "20"}).code == 1);
  CHECK(run({"check", "--criterion", "stability", "--riesz", "1", "--ell", "2"}).code == 0);
  CHECK(run({"check", "--criterion", "stability", "--riesz", "1", "--flip-sign"}).code == 1);
  CHECK(run({"check", "--criterion", "corollary", "--p", "3"}).code == 3);
  CHECK(run({"check", "--criterion", "bogus"}).code == 3);
  CHECK(run({"check", "--criterion", "stability", "--riesz", "1", "--ell", "-1"}).code == 3);

  TempDir dir;
  const auto gauss = dir.write("g.json", R"({"f11": {"kind": "zero"}, "f22": {"kind": "zero"},
                                             "f12": {"kind": "gaussian", "c": 1, "w": 1}})");
  const Run f = run({"check", "--criterion", "fourier", "--triple", gauss});
  CHECK(f.code == 0);
  CHECK(json::parse(f.out)["witness"]["note"].get<std::string>().find("necessary condition satisfied") !=
        std::string::npos);
}

TEST_CASE("constants command") {
  const Run p0 = run({"constants", "--which", "p0"});
  CHECK(p0.code == 0);
  CHECK(std::abs(json::parse(p0.out)["value"].get<double>() - 0.655) < 5e-3);
  const Run p1 = run({"constants", "--which", "p1"});
  CHECK(std::abs(json::parse(p1.out)["value"].get<double>() - 1.46498) < 1e-5);
  CHECK(json::parse(p1.out).contains("tolerance"));
  const Run mw = run({"constants", "--which", "mwindow", "--p", "3"});
  CHECK(mw.code == 0);
  const json w = json::parse(mw.out);
  CHECK(std::abs(w["m_lo"].get<double>() - 0.07556) < 1e-5);
  CHECK(std::abs(w["m_hi"].get<double>() - 13.2349) < 1e-4);
  CHECK(run({"constants", "--which", "mwindow", "--p", "1.2"}).code == 3);
  CHECK(run({"constants", "--which", "mwindow"}).code == 3);
  CHECK(run({"constants", "--which", "p7"}).code == 3);
}

TEST_CASE("scan command") {
  const Run f = run({"scan", "--quantity", "F", "--powerlaw", "3", "--m", "1", "--lo", "0.5", "--hi", "5", "--points",
                     "100"});
  CHECK(f.code == 0);
  std::istringstream lines(f.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "r,F");
  int rows = 0;
  const double coeff = 2.0 - 2.0 * boost::math::zeta(3.0) / 8.0;
  while (std::getline(lines, line)) {
    const auto comma = line.find(',');
    const double r = std::stod(line.substr(0, comma));
    const double v = std::stod(line.substr(comma + 1));
    CHECK(std::abs(v - coeff * std::pow(r, -3.0)) < 1e-8);
    ++rows;
  }
  CHECK(rows == 100);

  const Run s = run({"scan", "--quantity", "spectrum", "--riesz", "1", "--ell", "1", "--lo", "0", "--hi", "3.141592653589793",
                     "--points", "257"});
  CHECK(s.code == 0);
  std::istringstream sl(s.out);
  std::getline(sl, line);
  CHECK(line.rfind("q,S", 0) == 0);
  double min_s = 1e300;
  while (std::getline(sl, line)) {
    min_s = std::min(min_s, std::stod(line.substr(line.find(',') + 1)));
  }
  CHECK(min_s >= -1e-9);

  TempDir dir;
  const auto out = dir.file("h.csv");
  const Run h = run({"scan", "--quantity", "fourier", "--triple",
                     dir.write("g.json", R"({"f11": {"kind": "zero"}, "f22": {"kind": "zero"},
                                             "f12": {"kind": "gaussian", "c": 1, "w": 1}})"),
                     "--lo", "0", "--hi", "4", "--points", "5", "--out", out});
  CHECK(h.code == 0);
  std::istringstream hl(slurp(out));
  std::getline(hl, line);
  CHECK(line == "k,h");
  while (std::getline(hl, line)) {
    const double k = std::stod(line.substr(0, line.find(',')));
    CHECK(std::abs(std::stod(line.substr(line.find(',') + 1)) - std::exp(-k * k / 2.0)) < 1e-10);
  }
  CHECK(fs::exists(out + ".manifest.json"));
  CHECK(json::parse(h.out)["command"] == "scan");

  CHECK(run({"scan", "--quantity", "F", "--powerlaw", "3", "--m", "1", "--points", "0"}).code == 3);
  CHECK(run({"scan", "--quantity", "F", "--powerlaw", "3", "--m", "1", "--lo", "2", "--hi", "1", "--points", "5"}).code ==
        3);
  CHECK(run({"scan", "--quantity", "F", "--riesz", "1", "--lo", "1", "--hi", "2", "--points", "5"}).code == 3);
}

TEST_CASE("help and unknown commands") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({}).code == 3);
  CHECK(run({"frobnicate"}).code == 3);
}
