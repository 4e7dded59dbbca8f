#pragma once

#include <string>
#include <utility>
#include <vector>

#include "altchain/numerics.hpp"
#include "altchain/potentials.hpp"

namespace altchain {

enum class Criterion { Theorem2, RieszCoefficients, CorollaryWindow, FourierNecessary, StabilitySpectrum };
enum class Verdict { Pass, Fail, Inapplicable };

std::string to_string(Criterion c);
std::string to_string(Verdict v);

/// Sampling grid a verdict was computed on.
struct GridDescription {
  std::string spacing;  // "geometric", "uniform", "index" or "none"
  double lo = 0.0;
  double hi = 0.0;
  int points = 0;
};

/// Named numbers plus a free-text note. FAIL verdicts always carry one.
struct Witness {
  std::vector<std::pair<std::string, double>> values;
  std::string note;

  void set(std::string key, double value) { values.emplace_back(std::move(key), value); }
  /// NaN when absent.
  double get(const std::string& key) const;
};

struct CriterionReport {
  Criterion criterion = Criterion::Theorem2;
  Verdict verdict = Verdict::Inapplicable;
  Witness witness;
  GridDescription grid;
};

namespace criteria {

/// F(r) = 2 plus12(r) - sum_{k>=1} [minus12((2k-1) r) + minus22(2kr) + minus11(2kr)],
/// summed in closed form for power and exponential terms. Throws DomainError
/// when a minus part contains a power r^-p with p <= 1 (divergent series).
double composite_F(const ConvexDecomposition& decomp, double r, const Tolerance& tol = {});

/// Same sum with every part counted with a positive sign; the scale for
/// relative convexity tolerances.
double composite_F_magnitude(const ConvexDecomposition& decomp, double r);

/// Strong temperedness of every part, numerical convexity of every part on
/// 512 geometric points in [1e-3, 1e3] * ell and of F on 512 geometric points
/// in [1e-2, 1e2] * ell. INAPPLICABLE when the triple has no registered split.
CriterionReport check_theorem2(const PotentialTriple& triple, const Tolerance& tol = {},
                               double ell = 1.0);

/// Root of 2^p - zeta(p) on (1.1, 3).
double solve_p1(const Tolerance& tol = {});

/// (m_p, 1 / m_p) with m_p = (2^p - sqrt(4^p - zeta(p)^2)) / zeta(p); DomainError for p <= p1.
std::pair<double, double> m_window(double p);

/// -zeta(p)/2^p m^2 + 2 m - zeta(p)/2^p
double corollary_polynomial(double p, double m);

/// PASS iff corollary_polynomial(p, m) > 0, cross-checked against m_window when p > p1.
CriterionReport check_corollary_window(double p, double m);

/// a_1 = 1 - 2^{-(1+p)} (zeta(1+p) + 1), a_k = 1 - ((2k-1)/(2k))^{1+p}.
std::vector<double> riesz_coefficients(double p, int k_max);

/// PASS iff every a_k >= -1e-12.
CriterionReport check_riesz_coefficients(double p, int k_max = 200);

/// Root of a_1(p) on (0.1, 2).
double solve_p0(const Tolerance& tol = {});

/// (1/sqrt(2 pi)) int f(x) cos(kx) dx of one potential; DomainError unless
/// absolutely integrable.
double potential_transform(const Potential& f, double k, const Tolerance& tol = {});

/// f12^(k) + (f11^(k) + f22^(k)) / 2
double combined_transform(const PotentialTriple& triple, double k, const Tolerance& tol = {});

/// Necessary condition for high-density minimality. PASS means only that the
/// condition holds; FAIL rules out the equidistant chain as a high-density minimizer.
CriterionReport fourier_condition(const PotentialTriple& triple, const std::vector<double>& k_grid,
                                  const Tolerance& tol = {});

/// S(q) = sum_{j in Z} (1 - cos((2j-1) q)) f12''((2j-1) ell)
///      + sum_{j in Z} (1 - cos(2jq)) g''(2j ell),  g = (f11 + f22) / 2,
/// up to an overall positive constant. The j-series is truncated where the
/// second-derivative envelopes certify the remainder below tol.abs_tol / 2.
std::vector<double> spectrum_values(const PotentialTriple& triple, double ell,
                                    const std::vector<double>& q_grid, const Tolerance& tol = {});

/// q_i = i pi / points, i = 1..points (q = 0 is excluded; S(0) = 0).
std::vector<double> default_q_grid(int points = 256);

/// PASS iff min S over the grid >= -tol.abs_tol.
CriterionReport stability_spectrum(const PotentialTriple& triple, double ell,
                                   const std::vector<double>& q_grid, const Tolerance& tol = {});

}  // namespace criteria
}  // namespace altchain
