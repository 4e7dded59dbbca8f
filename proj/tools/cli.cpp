#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "altchain/chain.hpp"
#include "altchain/criteria.hpp"
#include "altchain/errors.hpp"
#include "altchain/io.hpp"
#include "altchain/optimize.hpp"
#include "altchain/potentials.hpp"

namespace altchain::cli {
namespace {

using io::json;

struct TolFlags {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_iter = 200;

  Tolerance get() const {
    Tolerance t{abs_tol, rel_tol, max_iter};
    try {
      t.validate();
    } catch (const DomainError& e) {
      throw PreconditionError(std::string("tolerance flags: ") + e.what());
    }
    return t;
  }
};

void add_tol_flags(CLI::App* cmd, TolFlags& tol) {
  cmd->add_option("--abs-tol", tol.abs_tol, "absolute tolerance");
  cmd->add_option("--rel-tol", tol.rel_tol, "relative tolerance");
  cmd->add_option("--max-iter", tol.max_iter, "iteration cap");
}

struct TripleFlags {
  std::string file;
  std::optional<double> riesz;
  std::optional<double> powerlaw;
  std::optional<double> mass;
  bool flip = false;

  bool given() const { return !file.empty() || riesz || powerlaw; }

  PotentialTriple get() const {
    const int sources = (!file.empty() ? 1 : 0) + (riesz ? 1 : 0) + (powerlaw ? 1 : 0);
    if (sources != 1) {
      throw PreconditionError("exactly one of --triple, --riesz, --powerlaw is required");
    }
    PotentialTriple t;
    if (!file.empty()) {
      t = io::triple_from_json(io::read_json_file(file));
    } else if (riesz) {
      t = riesz_triple(*riesz);
    } else {
      if (!mass) {
        throw PreconditionError("--powerlaw requires --m");
      }
      t = powerlaw_triple(*powerlaw, *mass);
    }
    return flip ? flip_sign(t) : t;
  }

  void describe(std::map<std::string, std::string>& params) const {
    if (!file.empty()) params["triple"] = file;
    if (riesz) params["riesz"] = io::format_double(*riesz);
    if (powerlaw) params["powerlaw"] = io::format_double(*powerlaw);
    if (mass) params["m"] = io::format_double(*mass);
    if (flip) params["flip_sign"] = "true";
  }
};

void add_triple_flags(CLI::App* cmd, TripleFlags& t, bool with_mass = true) {
  cmd->add_option("--triple", t.file, "triple JSON file");
  cmd->add_option("--riesz", t.riesz, "Riesz triple with exponent p");
  cmd->add_option("--powerlaw", t.powerlaw, "power-law triple with exponent p (needs --m)");
  if (with_mass) {
    cmd->add_option("--m", t.mass, "mass ratio for --powerlaw");
  }
  cmd->add_flag("--flip-sign", t.flip, "negate every potential of the triple");
}

struct GridFlags {
  double lo = 0.0;
  double hi = 0.0;
  int points = 0;
  std::string spacing = "uniform";

  std::vector<double> get() const {
    if (points < 1) {
      throw PreconditionError("grid: --points must be >= 1");
    }
    if (!(std::isfinite(lo) && std::isfinite(hi)) || lo > hi || (points > 1 && lo == hi)) {
      throw PreconditionError("grid: need finite --lo < --hi");
    }
    std::vector<double> grid(static_cast<std::size_t>(points));
    if (points == 1) {
      grid[0] = lo;
      return grid;
    }
    if (spacing == "geometric") {
      if (!(lo > 0.0)) {
        throw PreconditionError("grid: geometric spacing needs --lo > 0");
      }
      const double ratio = std::log(hi / lo) / (points - 1);
      for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i);
      }
    } else {
      const double h = (hi - lo) / (points - 1);
      for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = lo + h * i;
      }
    }
    grid.back() = hi;
    return grid;
  }
};

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
  cmd->add_option("--lo", g.lo, "grid start");
  cmd->add_option("--hi", g.hi, "grid end");
  cmd->add_option("--points", g.points, "grid size");
  cmd->add_option("--spacing", g.spacing, "uniform or geometric")
      ->check(CLI::IsMember({"uniform", "geometric"}));
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw PreconditionError(path + ": cannot open for writing");
  }
  file << content;
}

void write_sidecar(const std::string& path, io::RunManifest manifest) {
  manifest.timestamp = io::iso8601_now();
  write_file(path + ".manifest.json", io::to_json(manifest).dump(2) + "\n");
}

int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return kOk;
    case Verdict::Fail:
      return kFail;
    case Verdict::Inapplicable:
      return kInapplicable;
  }
  return kFail;
}

std::string summary_line(const CriterionReport& r) {
  std::ostringstream s;
  s << to_string(r.criterion) << ": " << to_string(r.verdict);
  if (!r.witness.note.empty()) {
    s << " (" << r.witness.note << ")";
  }
  return s.str();
}

// energy

struct EnergyCmd {
  std::string config;
  std::string triple;
  TolFlags tol;

  int run(std::ostream& out, std::ostream& err) const {
    const Configuration c = io::configuration_from_json(io::read_json_file(config));
    const PotentialTriple t = io::triple_from_json(io::read_json_file(triple));
    const EnergyReport report = energy(c, t, tol.get());
    out << io::to_json(report).dump(2) << "\n";
    err << "energy = " << io::format_double(report.energy) << " (N = " << c.size()
        << ", rho = " << io::format_double(c.rho()) << ")\n";
    return kOk;
  }
};

// minimize

struct MinimizeCmd {
  TripleFlags triple;
  BasinScanOptions options;
  std::string csv;
  TolFlags tol{1e-10, 1e-12, 2000};
  static constexpr double kEquidistantTol = 1e-6;

  int run(std::ostream& out, std::ostream& err) const {
    const PotentialTriple t = triple.get();
    const std::vector<MinimizeResult> results = basin_scan(t, options, tol.get());

    int converged = 0;
    int equidistant = 0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : results) {
      converged += r.converged ? 1 : 0;
      equidistant += (r.converged && r.distance_to_equidistant <= kEquidistantTol) ? 1 : 0;
      best = std::min(best, r.final_energy);
    }
    const double trials = static_cast<double>(results.size());

    io::RunManifest manifest{"minimize", {}, options.seed, io::kToolVersion, ""};
    triple.describe(manifest.parameters);
    manifest.parameters["n"] = std::to_string(options.n);
    manifest.parameters["rho"] = io::format_double(options.rho);
    manifest.parameters["trials"] = std::to_string(options.trials);
    manifest.parameters["perturbation"] = io::format_double(options.perturbation);
    manifest.parameters["abs_tol"] = io::format_double(tol.abs_tol);
    manifest.parameters["max_iter"] = std::to_string(tol.max_iter);

    const Configuration eq = Configuration::equidistant(options.n, options.rho);
    json summary = {
        {"manifest", io::to_json(manifest)},
        {"trials", results.size()},
        {"converged", converged},
        {"fraction_converged", converged / trials},
        {"fraction_equidistant", equidistant / trials},
        {"equidistant_tolerance", kEquidistantTol},
        {"equidistant_energy", energy(eq, t, tol.get()).energy},
        {"best_energy", best},
    };
    if (!csv.empty()) {
      write_file(csv, io::results_csv(results));
      write_sidecar(csv, manifest);
      summary["csv"] = csv;
    } else {
      json rows = json::array();
      for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        rows.push_back({{"trial", i},
                        {"converged", r.converged},
                        {"final_energy", r.final_energy},
                        {"distance_to_equidistant", r.distance_to_equidistant},
                        {"iterations", r.iterations}});
      }
      summary["results"] = rows;
    }
    out << summary.dump(2) << "\n";
    err << converged << "/" << results.size() << " converged, " << equidistant
        << " at the equidistant chain within " << kEquidistantTol << "\n";
    return kOk;
  }
};

// check

struct CheckCmd {
  std::string criterion;
  TripleFlags triple;
  std::optional<double> p;
  std::optional<double> m;
  int kmax = 200;
  double ell = 1.0;
  GridFlags k_grid{0.0, 20.0, 401, "uniform"};
  int q_points = 256;
  TolFlags tol;

  double need(const std::optional<double>& v, const char* flag) const {
    if (!v) {
      throw PreconditionError("--criterion " + criterion + " requires " + flag);
    }
    return *v;
  }

  PotentialTriple resolve_triple() const {
    if (triple.given()) {
      return triple.get();
    }
    if (p && m) {
      const PotentialTriple t = powerlaw_triple(*p, *m);
      return triple.flip ? flip_sign(t) : t;
    }
    throw PreconditionError("--criterion " + criterion +
                            " requires --triple, --riesz or --powerlaw (or --p with --m)");
  }

  int run(std::ostream& out, std::ostream& err) const {
    const Tolerance t = tol.get();
    if (!(ell > 0.0) || !std::isfinite(ell)) {
      throw PreconditionError("--ell must be positive");
    }
    CriterionReport report;
    if (criterion == "thm2") {
      report = criteria::check_theorem2(resolve_triple(), t, ell);
    } else if (criterion == "riesz") {
      if (kmax < 1) {
        throw PreconditionError("--kmax must be >= 1");
      }
      report = criteria::check_riesz_coefficients(need(p, "--p"), kmax);
    } else if (criterion == "corollary") {
      report = criteria::check_corollary_window(need(p, "--p"), need(m, "--m"));
    } else if (criterion == "fourier") {
      report = criteria::fourier_condition(resolve_triple(), k_grid.get(), t);
    } else {
      if (q_points < 1) {
        throw PreconditionError("--q-points must be >= 1");
      }
      report = criteria::stability_spectrum(resolve_triple(), ell, criteria::default_q_grid(q_points), t);
    }
    out << io::to_json(report).dump(2) << "\n";
    err << summary_line(report) << "\n";
    return verdict_code(report.verdict);
  }
};

// constants

struct ConstantsCmd {
  std::string which;
  std::optional<double> p;
  TolFlags tol;

  int run(std::ostream& out, std::ostream& err) const {
    const Tolerance t = tol.get();
    json j = {{"which", which}};
    if (which == "p0") {
      j["value"] = criteria::solve_p0(t);
      j["tolerance"] = t.abs_tol;
    } else if (which == "p1") {
      j["value"] = criteria::solve_p1(t);
      j["tolerance"] = t.abs_tol;
    } else {
      if (!p) {
        throw PreconditionError("--which mwindow requires --p");
      }
      const double p1 = criteria::solve_p1(t);
      if (!(*p > p1)) {
        throw PreconditionError("mwindow requires p > p1 = " + io::format_double(p1));
      }
      const auto [lo, hi] = criteria::m_window(*p);
      j["p"] = *p;
      j["m_lo"] = lo;
      j["m_hi"] = hi;
      j["tolerance"] = 1e-12;
    }
    out << j.dump(2) << "\n";
    err << which << " computed\n";
    return kOk;
  }
};

// scan

struct ScanCmd {
  std::string quantity;
  TripleFlags triple;
  GridFlags grid;
  double ell = 1.0;
  std::string out_path;
  TolFlags tol;

  int run(std::ostream& out, std::ostream& err) const {
    const Tolerance t = tol.get();
    const PotentialTriple tr = triple.get();
    std::vector<double> xs;
    std::vector<double> ys;
    std::string header;
    if (quantity == "F") {
      xs = grid.get();
      ConvexDecomposition decomp;
      try {
        decomp = decompose(tr);
      } catch (const DecompositionError& e) {
        throw PreconditionError(std::string("F scan: ") + e.what());
      }
      for (double r : xs) {
        if (!(r > 0.0)) {
          throw PreconditionError("F scan: grid must be positive");
        }
        ys.push_back(criteria::composite_F(decomp, r, t));
      }
      header = "r,F";
    } else if (quantity == "spectrum") {
      if (!(ell > 0.0) || !std::isfinite(ell)) {
        throw PreconditionError("--ell must be positive");
      }
      xs = grid.get();
      ys = criteria::spectrum_values(tr, ell, xs, t);
      header = "q,S[ell=" + io::format_double(ell) + "]";
    } else {
      xs = grid.get();
      for (double k : xs) {
        ys.push_back(criteria::combined_transform(tr, k, t));
      }
      header = "k,h";
    }

    std::ostringstream csv;
    csv.imbue(std::locale::classic());
    csv << header << "\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      csv << io::format_double(xs[i]) << "," << io::format_double(ys[i]) << "\n";
    }

    if (out_path.empty()) {
      out << csv.str();
    } else {
      io::RunManifest manifest{"scan", {}, std::nullopt, io::kToolVersion, ""};
      triple.describe(manifest.parameters);
      manifest.parameters["quantity"] = quantity;
      manifest.parameters["lo"] = io::format_double(grid.lo);
      manifest.parameters["hi"] = io::format_double(grid.hi);
      manifest.parameters["points"] = std::to_string(grid.points);
      manifest.parameters["spacing"] = grid.spacing;
      if (quantity == "spectrum") manifest.parameters["ell"] = io::format_double(ell);
      write_file(out_path, csv.str());
      write_sidecar(out_path, manifest);
      out << io::to_json(manifest).dump(2) << "\n";
    }
    err << xs.size() << " rows of " << quantity << "\n";
    return kOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energies, minimizers and crystallization criteria for alternating two-species chains"};
  app.name(args.empty() ? "altchain" : args.front());
  app.require_subcommand(1);

  EnergyCmd energy_cmd;
  auto* energy = app.add_subcommand("energy", "per-particle energy of a configuration");
  energy->add_option("--config", energy_cmd.config, "configuration JSON")->required();
  energy->add_option("--triple", energy_cmd.triple, "triple JSON")->required();
  add_tol_flags(energy, energy_cmd.tol);

  MinimizeCmd minimize_cmd;
  auto* minimize = app.add_subcommand("minimize", "basin scan from random starts");
  add_triple_flags(minimize, minimize_cmd.triple);
  minimize->add_option("--n", minimize_cmd.options.n, "particles per period");
  minimize->add_option("--rho", minimize_cmd.options.rho, "density");
  minimize->add_option("--trials", minimize_cmd.options.trials, "number of random starts");
  minimize->add_option("--seed", minimize_cmd.options.seed, "RNG seed");
  minimize->add_option("--perturbation", minimize_cmd.options.perturbation, "relative gap perturbation");
  minimize->add_option("--threads", minimize_cmd.options.threads, "worker threads (0 = all cores)");
  minimize->add_option("--csv", minimize_cmd.csv, "per-trial CSV output path");
  add_tol_flags(minimize, minimize_cmd.tol);

  CheckCmd check_cmd;
  auto* check = app.add_subcommand("check", "evaluate one crystallization criterion");
  check->add_option("--criterion", check_cmd.criterion, "criterion")
      ->required()
      ->check(CLI::IsMember({"thm2", "riesz", "corollary", "fourier", "stability"}));
  add_triple_flags(check, check_cmd.triple, false);
  check->add_option("--p", check_cmd.p, "power-law exponent");
  check->add_option("--m", check_cmd.m, "mass ratio");
  check->add_option("--kmax", check_cmd.kmax, "number of Riesz coefficients");
  check->add_option("--ell", check_cmd.ell, "lattice spacing 1/rho");
  check->add_option("--k-lo", check_cmd.k_grid.lo, "wavenumber grid start");
  check->add_option("--k-hi", check_cmd.k_grid.hi, "wavenumber grid end");
  check->add_option("--k-points", check_cmd.k_grid.points, "wavenumber grid size");
  check->add_option("--q-points", check_cmd.q_points, "spectrum grid size");
  add_tol_flags(check, check_cmd.tol);

  ConstantsCmd constants_cmd;
  auto* constants = app.add_subcommand("constants", "critical exponents and mass windows");
  constants->add_option("--which", constants_cmd.which, "p0, p1 or mwindow")
      ->required()
      ->check(CLI::IsMember({"p0", "p1", "mwindow"}));
  constants->add_option("--p", constants_cmd.p, "exponent for mwindow");
  add_tol_flags(constants, constants_cmd.tol);

  ScanCmd scan_cmd;
  auto* scan = app.add_subcommand("scan", "two-column CSV of F(r), S(q) or h(k)");
  scan->add_option("--quantity", scan_cmd.quantity, "F, spectrum or fourier")
      ->required()
      ->check(CLI::IsMember({"F", "spectrum", "fourier"}));
  add_triple_flags(scan, scan_cmd.triple);
  add_grid_flags(scan, scan_cmd.grid);
  scan->add_option("--ell", scan_cmd.ell, "lattice spacing for spectrum scans");
  scan->add_option("--out", scan_cmd.out_path, "CSV output path");
  add_tol_flags(scan, scan_cmd.tol);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kPrecondition;
  }

  try {
    if (energy->parsed()) return energy_cmd.run(out, err);
    if (minimize->parsed()) return minimize_cmd.run(out, err);
    if (check->parsed()) return check_cmd.run(out, err);
    if (constants->parsed()) return constants_cmd.run(out, err);
    return scan_cmd.run(out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << "\n";
    return kPrecondition;
  } catch (const DomainError& e) {
    err << "precondition violated: " << e.what() << "\n";
    return kPrecondition;
  } catch (const DecompositionError& e) {
    err << "precondition violated: " << e.what() << "\n";
    return kPrecondition;
  } catch (const ConvergenceError& e) {
    err << "did not converge: " << e.what() << "\n";
    return kPrecondition;
  }
}

}  // namespace altchain::cli
