#pragma once

// Special functions, root bracketing, oscillatory quadrature and small
// finite-difference helpers shared by the rest of the library.

#include <cstddef>
#include <functional>
#include <span>

#include "altchain/errors.hpp"

namespace altchain {

struct Tolerance {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_iter = 200;

  /// Throws DomainError unless both tolerances are finite and positive and max_iter >= 1.
  void validate() const;
};

namespace numerics {

/// Riemann zeta for real s > 1, relative error <= 1e-12.
double riemann_zeta(double s);

/// Hurwitz zeta sum_{k>=0} (k + a)^{-s} for s > 1, a > 0.
double hurwitz_zeta(double s, double a);

/// sum_{m > M} m^{-s}, i.e. the tail of the zeta series after M terms.
double zeta_tail(double s, long M);

/// Dirichlet eta sum_{j>=1} (-1)^{j+1} j^{-s} for s > 0.
double dirichlet_eta(double s);

/// Sum of sum_{k>=0} (-1)^k a_k using the Cohen-Villegas-Zagier weights on
/// the first `terms.size()` entries. Intended for completely monotone a_k.
double accelerated_alternating_sum(std::span<const double> terms);

/// Bisection on a sign-changing bracket. Returns the midpoint of the final
/// bracket, whose width is <= tol.abs_tol.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   const Tolerance& tol);

/// Bound on int_R^inf |f(x)| dx, used to terminate the tail of an integral.
using TailBound = std::function<double(double)>;

/// Cosine transform (1/sqrt(2 pi)) int_R f(x) cos(kx) dx of an even,
/// absolutely integrable f. The half-line integral is split at the zeros of
/// cos(kx); pieces are summed directly until `tail` certifies the remainder,
/// with an alternating-series fallback for slowly decaying tails.
double cosine_transform(const std::function<double(double)>& f, double k,
                        const Tolerance& tol, const TailBound& tail);

/// Central second difference (f(x-h) - 2 f(x) + f(x+h)) / h^2.
double finite_diff_2nd(const std::function<double(double)>& f, double x, double h);

/// Compensated (Neumaier) accumulator. Rounding error stays ~eps*|sum| plus
/// O(n eps^2) * sum|terms| independent of the number of terms.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (v >= 0 ? v : -v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
    abs_ += v >= 0 ? v : -v;
  }
  CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }
  double value() const { return sum_ + comp_; }
  /// Sum of magnitudes of everything added so far.
  double magnitude() const { return abs_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  double abs_ = 0.0;
};

/// Rising factorial ratio (q)_n / n! = Gamma(q+n) / (Gamma(q) n!).
double rising_ratio(double q, int n);

}  // namespace numerics
}  // namespace altchain
