#include "altchain/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace altchain {

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::Theorem2:
      return "Theorem2";
    case Criterion::RieszCoefficients:
      return "RieszCoefficients";
    case Criterion::CorollaryWindow:
      return "CorollaryWindow";
    case Criterion::FourierNecessary:
      return "FourierNecessary";
    case Criterion::StabilitySpectrum:
      return "StabilitySpectrum";
  }
  return "unknown";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "PASS";
    case Verdict::Fail:
      return "FAIL";
    case Verdict::Inapplicable:
      return "INAPPLICABLE";
  }
  return "unknown";
}

double Witness::get(const std::string& key) const {
  for (const auto& [k, v] : values) {
    if (k == key) {
      return v;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

namespace criteria {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

constexpr int kGridPoints = 512;

std::vector<double> geometric_grid(double lo, double hi, int points) {
  std::vector<double> r(static_cast<std::size_t>(points));
  const double ratio = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) {
    r[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i);
  }
  r.back() = hi;
  return r;
}

// Second divided difference on a non-uniform triple of points.
double divided_second(double r0, double r1, double r2, double f0, double f1, double f2) {
  return 2.0 * ((f2 - f1) / (r2 - r1) - (f1 - f0) / (r1 - r0)) / (r2 - r0);
}

enum class Series { Odd, Even };

// sum_{k>=1} term((2k-1) r) or term(2kr) in closed form.
double term_series(const ConvexTerm& term, double r, Series series) {
  if (term.coefficient == 0.0) {
    return 0.0;
  }
  if (term.shape == ConvexTerm::Shape::Power) {
    const double p = term.parameter;
    if (p <= 1.0) {
      throw DomainError("composite_F: minus part r^-p with p <= 1 gives a divergent series");
    }
    const double zeta = numerics::riemann_zeta(p);
    if (series == Series::Even) {
      return term.coefficient * std::pow(2.0 * r, -p) * zeta;
    }
    return term.coefficient * std::pow(r, -p) * (-std::expm1(-p * std::numbers::ln2)) * zeta;
  }
  const double lambda = term.parameter;
  const double e = std::exp(-lambda * r);
  const double denom = -std::expm1(-2.0 * lambda * r);
  if (series == Series::Even) {
    return term.coefficient * e * e / denom;
  }
  return term.coefficient * e / denom;
}

double part_series(const ConvexPart& part, double r, Series series) {
  double v = 0.0;
  for (const auto& t : part.terms) {
    v += term_series(t, r, series);
  }
  return v;
}

struct ConvexityResult {
  bool ok = true;
  double r = 0.0;
  double second = 0.0;
  double threshold = 0.0;
};

template <class F, class Scale>
ConvexityResult check_convex(const std::vector<double>& grid, F&& f, Scale&& magnitude) {
  std::vector<double> v(grid.size());
  std::vector<double> m(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    v[i] = f(grid[i]);
    m[i] = magnitude(grid[i]);
  }
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double d2 = divided_second(grid[i - 1], grid[i], grid[i + 1], v[i - 1], v[i], v[i + 1]);
    const double scale = std::abs(
        divided_second(grid[i - 1], grid[i], grid[i + 1], m[i - 1], m[i], m[i + 1]));
    if (d2 < -1e-9 * scale) {
      return {false, grid[i], d2, -1e-9 * scale};
    }
  }
  return {};
}

double magnitude_of(const ConvexPart& part, double r) {
  double v = 0.0;
  for (const auto& t : part.terms) {
    v += std::abs(t.eval(r));
  }
  return v;
}

}  // namespace

double composite_F(const ConvexDecomposition& decomp, double r, const Tolerance& tol) {
  tol.validate();
  if (!(r > 0.0)) {
    throw DomainError("composite_F: requires r > 0");
  }
  return 2.0 * decomp.s12.plus.eval(r) - part_series(decomp.s12.minus, r, Series::Odd) -
         part_series(decomp.s22.minus, r, Series::Even) -
         part_series(decomp.s11.minus, r, Series::Even);
}

double composite_F_magnitude(const ConvexDecomposition& decomp, double r) {
  return 2.0 * decomp.s12.plus.eval(r) + part_series(decomp.s12.minus, r, Series::Odd) +
         part_series(decomp.s22.minus, r, Series::Even) +
         part_series(decomp.s11.minus, r, Series::Even);
}

CriterionReport check_theorem2(const PotentialTriple& triple, const Tolerance& tol, double ell) {
  tol.validate();
  if (!(ell > 0.0)) {
    throw DomainError("check_theorem2: characteristic length must be > 0");
  }
  CriterionReport report;
  report.criterion = Criterion::Theorem2;
  report.grid = {"geometric", 1e-2 * ell, 1e2 * ell, kGridPoints};

  ConvexDecomposition decomp;
  try {
    decomp = decompose(triple);
  } catch (const DecompositionError& e) {
    report.verdict = Verdict::Inapplicable;
    report.witness.note = e.what();
    return report;
  }

  const std::pair<const char*, const ConvexPart*> parts[] = {
      {"plus11", &decomp.s11.plus},  {"minus11", &decomp.s11.minus}, {"plus22", &decomp.s22.plus},
      {"minus22", &decomp.s22.minus}, {"plus12", &decomp.s12.plus},  {"minus12", &decomp.s12.minus},
  };
  for (const auto& [name, part] : parts) {
    if (!part->strongly_tempered()) {
      report.verdict = Verdict::Fail;
      report.witness.note = std::string(name) + " is not strongly tempered (power law with p <= 1)";
      return report;
    }
  }

  const std::vector<double> part_grid = geometric_grid(1e-3 * ell, 1e3 * ell, kGridPoints);
  for (const auto& [name, part] : parts) {
    const ConvexPart& p = *part;
    const auto result = check_convex(
        part_grid, [&](double r) { return p.eval(r); }, [&](double r) { return magnitude_of(p, r); });
    if (!result.ok) {
      report.verdict = Verdict::Fail;
      report.witness.note = std::string(name) + " is not convex on the sampled grid";
      report.witness.set("r", result.r);
      report.witness.set("second_difference", result.second);
      return report;
    }
  }

  const std::vector<double> grid = geometric_grid(1e-2 * ell, 1e2 * ell, kGridPoints);
  const auto result = check_convex(
      grid, [&](double r) { return composite_F(decomp, r, tol); },
      [&](double r) { return composite_F_magnitude(decomp, r); });
  if (!result.ok) {
    report.verdict = Verdict::Fail;
    report.witness.note = "composite F is not convex";
    report.witness.set("r", result.r);
    report.witness.set("second_difference", result.second);
    report.witness.set("threshold", result.threshold);
    return report;
  }
  report.verdict = Verdict::Pass;
  report.witness.note = "F convex on the sampled grid; all parts convex and strongly tempered";
  return report;
}

double solve_p1(const Tolerance& tol) {
  return numerics::bisect_root(
      [](double p) { return std::pow(2.0, p) - numerics::riemann_zeta(p); }, 1.1, 3.0, tol);
}

std::pair<double, double> m_window(double p) {
  if (!(p > 1.0)) {
    throw DomainError("m_window: requires p > p1");
  }
  const double zeta = numerics::riemann_zeta(p);
  const double two_p = std::pow(2.0, p);
  if (!(two_p > zeta)) {
    std::ostringstream msg;
    msg << "m_window: requires p > p1 (zeta(p) < 2^p), got p = " << p;
    throw DomainError(msg.str());
  }
  // (2^p - sqrt(4^p - zeta^2)) / zeta rewritten without cancellation.
  const double root = std::sqrt((two_p - zeta) * (two_p + zeta));
  const double m_p = zeta / (two_p + root);
  return {m_p, 1.0 / m_p};
}

double corollary_polynomial(double p, double m) {
  const double a = numerics::riemann_zeta(p) / std::pow(2.0, p);
  return -a * m * m + 2.0 * m - a;
}

CriterionReport check_corollary_window(double p, double m) {
  if (!(p > 1.0)) {
    throw DomainError("check_corollary_window: requires p > 1");
  }
  if (!(m > 0.0)) {
    throw DomainError("check_corollary_window: requires m > 0");
  }
  CriterionReport report;
  report.criterion = Criterion::CorollaryWindow;
  report.grid = {"none", p, m, 1};
  const double poly = corollary_polynomial(p, m);
  const bool positive = poly > 0.0;
  report.witness.set("P", poly);
  report.witness.set("zeta_p", numerics::riemann_zeta(p));
  report.verdict = positive ? Verdict::Pass : Verdict::Fail;

  const double zeta = numerics::riemann_zeta(p);
  if (std::pow(2.0, p) > zeta) {
    const auto [lo, hi] = m_window(p);
    report.witness.set("m_lo", lo);
    report.witness.set("m_hi", hi);
    const bool inside = lo < m && m < hi;
    if (inside != positive) {
      report.witness.note = "window membership and sign of P disagree (m at the window edge within rounding)";
    } else {
      report.witness.note = positive ? "m inside (m_p, 1/m_p)" : "m outside (m_p, 1/m_p)";
    }
  } else {
    report.witness.note = "window undefined: p <= p1, P_p(m) < 0 for every m";
  }
  return report;
}

std::vector<double> riesz_coefficients(double p, int k_max) {
  if (!(p > 0.0)) {
    throw DomainError("riesz_coefficients: requires p > 0");
  }
  if (k_max < 1) {
    throw DomainError("riesz_coefficients: requires k_max >= 1");
  }
  std::vector<double> a(static_cast<std::size_t>(k_max));
  a[0] = 1.0 - std::pow(2.0, -(1.0 + p)) * (numerics::riemann_zeta(1.0 + p) + 1.0);
  for (int k = 2; k <= k_max; ++k) {
    // 1 - (1 - 1/(2k))^{1+p}
    a[static_cast<std::size_t>(k - 1)] = -std::expm1((1.0 + p) * std::log1p(-0.5 / k));
  }
  return a;
}

CriterionReport check_riesz_coefficients(double p, int k_max) {
  CriterionReport report;
  report.criterion = Criterion::RieszCoefficients;
  report.grid = {"index", 1.0, static_cast<double>(k_max), k_max};
  const std::vector<double> a = riesz_coefficients(p, k_max);
  report.witness.set("a1", a[0]);
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] < -1e-12) {
      report.verdict = Verdict::Fail;
      report.witness.set("first_negative_k", static_cast<double>(k + 1));
      report.witness.set("a_k", a[k]);
      report.witness.note = "negative coefficient: p below p0";
      return report;
    }
  }
  report.verdict = Verdict::Pass;
  report.witness.note = "all a_k >= 0";
  return report;
}

double solve_p0(const Tolerance& tol) {
  return numerics::bisect_root(
      [](double p) { return riesz_coefficients(p, 1)[0]; }, 0.1, 2.0, tol);
}

double potential_transform(const Potential& f, double k, const Tolerance& tol) {
  if (!f.absolutely_integrable() || !f.decay()) {
    throw DomainError("potential_transform: " + f.kind_name() + " is not absolutely integrable");
  }
  if (f.is_zero()) {
    return 0.0;
  }
  const double start = f.monotone_from(0);
  return numerics::cosine_transform(
      [&f](double x) { return f(x); }, k, tol, [&f, start](double r) {
        return r >= start ? f.envelope_integral(r, 0) : std::numeric_limits<double>::infinity();
      });
}

double combined_transform(const PotentialTriple& triple, double k, const Tolerance& tol) {
  Tolerance part = tol;
  part.abs_tol = tol.abs_tol / 3.0;
  return potential_transform(triple.f12, k, part) +
         0.5 * (potential_transform(triple.f11, k, part) + potential_transform(triple.f22, k, part));
}

CriterionReport fourier_condition(const PotentialTriple& triple, const std::vector<double>& k_grid,
                                  const Tolerance& tol) {
  tol.validate();
  CriterionReport report;
  report.criterion = Criterion::FourierNecessary;
  if (k_grid.empty()) {
    throw DomainError("fourier_condition: empty k grid");
  }
  report.grid = {"uniform", *std::min_element(k_grid.begin(), k_grid.end()),
                 *std::max_element(k_grid.begin(), k_grid.end()), static_cast<int>(k_grid.size())};
  for (const Potential* f : {&triple.f11, &triple.f22, &triple.f12}) {
    if (!f->absolutely_integrable() || !f->decay()) {
      report.verdict = Verdict::Inapplicable;
      report.witness.note = f->kind_name() + " component is not absolutely integrable and strongly tempered";
      return report;
    }
  }
  double worst = std::numeric_limits<double>::infinity();
  double worst_k = 0.0;
  for (double k : k_grid) {
    const double h = combined_transform(triple, k, tol);
    if (h < worst) {
      worst = h;
      worst_k = k;
    }
  }
  report.witness.set("k_min", worst_k);
  report.witness.set("h_min", worst);
  if (worst >= -tol.abs_tol) {
    report.verdict = Verdict::Pass;
    report.witness.note = "necessary condition satisfied (not a proof of minimality)";
  } else {
    report.verdict = Verdict::Fail;
    report.witness.note = "combined transform negative: the equidistant chain is not a high-density minimizer";
  }
  return report;
}

std::vector<double> default_q_grid(int points) {
  if (points < 1) {
    throw DomainError("default_q_grid: requires at least one point");
  }
  std::vector<double> q(static_cast<std::size_t>(points));
  for (int i = 1; i <= points; ++i) {
    q[static_cast<std::size_t>(i - 1)] = std::numbers::pi * i / points;
  }
  return q;
}

std::vector<double> spectrum_values(const PotentialTriple& triple, double ell,
                                    const std::vector<double>& q_grid, const Tolerance& tol) {
  tol.validate();
  if (!(ell > 0.0) || !std::isfinite(ell)) {
    throw DomainError("stability_spectrum: ell must be > 0");
  }
  // Per component: series (odd or even), weight in S, and for power laws
  // f''(r) = C r^{-s}, whose tails are summed with Hurwitz zeta.
  struct Component {
    const Potential* f;
    bool odd;
    double weight;
    bool power;
    double C;
    double s;
  };
  std::vector<Component> parts;
  const auto add = [&](const Potential& f, bool odd, double weight) {
    if (f.is_zero()) {
      return;
    }
    Component c{&f, odd, weight, false, 0.0, 0.0};
    if (const auto* law = std::get_if<PowerLaw>(&f.kind())) {
      c.power = true;
      c.C = law->c * law->p * (law->p + 1.0);
      c.s = law->p + 2.0;
    }
    parts.push_back(c);
  };
  add(triple.f12, true, 1.0);
  add(triple.f11, false, 0.5);
  add(triple.f22, false, 0.5);

  const auto radius = [ell](bool odd, double j) { return odd ? (2.0 * j - 1.0) * ell : 2.0 * j * ell; };

  // sum_{j > J} r_j^{-s} for the odd or even series
  const auto power_tail = [ell](const Component& c, long J) {
    const double a = c.odd ? static_cast<double>(J) + 0.5 : static_cast<double>(J) + 1.0;
    return std::pow(2.0 * ell, -c.s) * numerics::hurwitz_zeta(c.s, a);
  };

  std::vector<double> odd_terms;
  std::vector<double> even_terms;
  const auto ensure = [&](long J) {
    for (auto j = static_cast<long>(odd_terms.size()) + 1; j <= J; ++j) {
      const double jd = static_cast<double>(j);
      odd_terms.push_back(triple.f12.eval(radius(true, jd), 2));
      even_terms.push_back(0.5 * (triple.f11.eval(radius(false, jd), 2) + triple.f22.eval(radius(false, jd), 2)));
    }
  };

  std::vector<double> out;
  out.reserve(q_grid.size());
  for (double q : q_grid) {
    if (!std::isfinite(q)) {
      throw DomainError("stability_spectrum: q must be finite");
    }
    // q on the lattice pi Z: every phase (2j-1) q and 2jq is exact.
    const double turns = std::nearbyint(q / std::numbers::pi);
    const bool lattice = std::abs(q - turns * std::numbers::pi) <= 8.0 * kEps * std::max(1.0, std::abs(q));
    const double odd_cos = std::fmod(std::abs(turns), 2.0) == 0.0 ? 1.0 : -1.0;
    const double sin_q = std::abs(std::sin(q));

    // Terms are 2 (1 - cos(phase_j)) f''(r_j); the tail beyond J splits into a
    // summed part 2 sum f'' and an oscillating part -2 sum cos(phase_j) f''.
    double tail_sum = 0.0;
    const auto tail = [&](long J) {
      double bound = 0.0;
      tail_sum = 0.0;
      for (const auto& c : parts) {
        if (c.power) {
          const double z = c.weight * c.C * power_tail(c, J);
          if (lattice) {
            const double cosine = c.odd ? odd_cos : 1.0;
            tail_sum += 2.0 * (1.0 - cosine) * z;
          } else {
            tail_sum += 2.0 * z;
            const double first = c.weight * std::abs(c.C) * std::pow(radius(c.odd, static_cast<double>(J + 1)), -c.s);
            bound += 2.0 * std::min(first / sin_q, std::abs(z));
          }
        } else {
          const double start = radius(c.odd, static_cast<double>(J + 1));
          if (start < c.f->monotone_from(2)) {
            return std::numeric_limits<double>::infinity();
          }
          bound += 4.0 * c.weight * (c.f->envelope(start, 2) + c.f->envelope_integral(start, 2) / (2.0 * ell));
        }
      }
      return bound;
    };
    long J = 16;
    while (!(tail(J) <= 0.5 * tol.abs_tol)) {
      J *= 2;
      if (J > (1L << 26)) {
        throw ConvergenceError("stability_spectrum: tail not certifiable");
      }
    }
    ensure(J);

    numerics::CompensatedSum s;
    for (long j = 1; j <= J; ++j) {
      const double jd = static_cast<double>(j);
      const auto idx = static_cast<std::size_t>(j - 1);
      // 1 - cos(x) = 2 sin^2(x/2) keeps small-q terms accurate.
      const double so = std::sin(0.5 * (2.0 * jd - 1.0) * q);
      const double se = std::sin(jd * q);
      s += 4.0 * so * so * odd_terms[idx];
      s += 4.0 * se * se * even_terms[idx];
    }
    s += tail_sum;
    out.push_back(s.value());
  }
  return out;
}

CriterionReport stability_spectrum(const PotentialTriple& triple, double ell,
                                   const std::vector<double>& q_grid, const Tolerance& tol) {
  CriterionReport report;
  report.criterion = Criterion::StabilitySpectrum;
  if (q_grid.empty()) {
    throw DomainError("stability_spectrum: empty q grid");
  }
  report.grid = {"uniform", *std::min_element(q_grid.begin(), q_grid.end()),
                 *std::max_element(q_grid.begin(), q_grid.end()), static_cast<int>(q_grid.size())};
  std::vector<double> q_used;
  for (double q : q_grid) {
    if (q != 0.0) {
      q_used.push_back(q);
    }
  }
  report.witness.set("S_at_0", 0.0);
  if (q_used.empty()) {
    report.verdict = Verdict::Pass;
    report.witness.note = "only q = 0 requested; S(0) = 0";
    return report;
  }
  const std::vector<double> s = spectrum_values(triple, ell, q_used, tol);
  const auto it = std::min_element(s.begin(), s.end());
  const auto idx = static_cast<std::size_t>(it - s.begin());
  report.witness.set("q_min", q_used[idx]);
  report.witness.set("S_min", *it);
  report.witness.set("ell", ell);
  if (*it >= -tol.abs_tol) {
    report.verdict = Verdict::Pass;
    report.witness.note = "second-order stable on the grid";
  } else {
    report.verdict = Verdict::Fail;
    report.witness.note = "negative second variation: equidistant chain unstable at this density";
  }
  return report;
}

}  // namespace criteria
}  // namespace altchain
