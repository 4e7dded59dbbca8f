#include "altchain/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace altchain {

void Tolerance::validate() const {
  if (!(std::isfinite(abs_tol) && abs_tol > 0.0)) {
    throw DomainError("tolerance: abs_tol must be finite and positive");
  }
  if (!(std::isfinite(rel_tol) && rel_tol > 0.0)) {
    throw DomainError("tolerance: rel_tol must be finite and positive");
  }
  if (max_iter < 1) {
    throw DomainError("tolerance: max_iter must be at least 1");
  }
}

namespace numerics {
namespace {

// B_{2i} / (2i)! for i = 1..12.
constexpr std::array<double, 12> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
    -174611.0 / 330.0 / 2432902008176640000.0,
    854513.0 / 138.0 / 1.1240007277776077e21,
    -236364091.0 / 2730.0 / 6.204484017332394e23,
};

constexpr double kInvSqrtTwoPi = 0.3989422804014326779399460599343818684758586311649;

}  // namespace

double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0) || !std::isfinite(s)) {
    throw DomainError("hurwitz_zeta: requires finite s > 1, got " + std::to_string(s));
  }
  if (!(a > 0.0)) {
    throw DomainError("hurwitz_zeta: requires a > 0");
  }
  // Shift the Euler-Maclaurin start point past max(s, 12) so the asymptotic
  // correction terms shrink monotonically.
  const double start = std::max(12.0, s + 4.0);
  const long direct = a >= start ? 0 : static_cast<long>(std::ceil(start - a));

  CompensatedSum sum;
  for (long k = 0; k < direct; ++k) {
    sum += std::pow(static_cast<double>(k) + a, -s);
  }
  const double x = static_cast<double>(direct) + a;
  const double x_pow = std::pow(x, -s);
  sum += x * x_pow / (s - 1.0);
  sum += 0.5 * x_pow;

  // Correction sum_i B_{2i}/(2i)! * (s)_{2i-1} * x^{-s-2i+1}.
  double rising = s;  // (s)_{2i-1}
  double x_term = x_pow / x;
  const double inv_x2 = 1.0 / (x * x);
  for (std::size_t i = 0; i < kBernoulliOverFactorial.size(); ++i) {
    const double term = kBernoulliOverFactorial[i] * rising * x_term;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum.value())) {
      break;
    }
    rising *= (s + 2.0 * static_cast<double>(i) + 1.0) * (s + 2.0 * static_cast<double>(i) + 2.0);
    x_term *= inv_x2;
  }
  return sum.value();
}

double riemann_zeta(double s) {
  if (!(s > 1.0)) {
    throw DomainError("riemann_zeta: requires s > 1, got " + std::to_string(s));
  }
  if (s > 60.0) {
    // 1 + 2^-s + 3^-s ... ; beyond s = 60 only the first terms matter at double precision.
    return 1.0 + std::pow(2.0, -s) + std::pow(3.0, -s);
  }
  return hurwitz_zeta(s, 1.0);
}

double zeta_tail(double s, long M) {
  if (M < 0) {
    throw DomainError("zeta_tail: M must be non-negative");
  }
  return hurwitz_zeta(s, static_cast<double>(M) + 1.0);
}

double accelerated_alternating_sum(std::span<const double> terms) {
  const auto n = static_cast<double>(terms.size());
  if (terms.empty()) {
    return 0.0;
  }
  double d = std::pow(3.0 + std::sqrt(8.0), n);
  d = 0.5 * (d + 1.0 / d);
  double b = -1.0;
  double c = -d;
  CompensatedSum sum;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto kd = static_cast<double>(k);
    c = b - c;
    sum += c * terms[k];
    b = (kd + n) * (kd - n) * b / ((kd + 0.5) * (kd + 1.0));
  }
  return sum.value() / d;
}

double dirichlet_eta(double s) {
  if (!(s > 0.0)) {
    throw DomainError("dirichlet_eta: requires s > 0, got " + std::to_string(s));
  }
  if (s > 1.0) {
    const double factor = -std::expm1((1.0 - s) * std::numbers::ln2);
    return factor * riemann_zeta(s);
  }
  std::vector<double> terms(48);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    terms[k] = std::pow(static_cast<double>(k + 1), -s);
  }
  return accelerated_alternating_sum(terms);
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   const Tolerance& tol) {
  tol.validate();
  if (lo > hi) {
    std::swap(lo, hi);
  }
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) {
    return lo;
  }
  if (f_hi == 0.0) {
    return hi;
  }
  if (!(f_lo * f_hi < 0.0)) {
    throw DomainError("bisect_root: no sign change on [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  for (int iter = 0; iter < tol.max_iter; ++iter) {
    if (hi - lo <= tol.abs_tol) {
      return 0.5 * (lo + hi);
    }
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) {
      return mid;
    }
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  if (hi - lo <= tol.abs_tol) {
    return 0.5 * (lo + hi);
  }
  throw ConvergenceError("bisect_root: bracket wider than abs_tol after max_iter iterations");
}

namespace {

struct Piece {
  double value;
  double error;
  double l1;
};

// Rounding floor of the Gauss-Kronrod estimate, relative to the L1 norm.
constexpr double kRoundoffFloor = 64.0 * std::numeric_limits<double>::epsilon();

Piece gk31(const std::function<double(double)>& g, double a, double b) {
  Piece p{0.0, 0.0, 0.0};
  p.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 0, 0.0, &p.error, &p.l1);
  return p;
}

// Bisection comparing the 31-point rule on [a, b] against its two halves.
// Boost's own recursion accumulates a depth-dependent error floor.
// abs_budget is halved with each split so a piece never exceeds it in total.
Piece refine(const std::function<double(double)>& g, double a, double b, const Piece& whole,
             double abs_budget, int depth) {
  const double m = 0.5 * (a + b);
  const Piece left = gk31(g, a, m);
  const Piece right = gk31(g, m, b);
  const double halves = left.value + right.value;
  const double l1 = left.l1 + right.l1;
  const double diff = std::abs(whole.value - halves);
  if (diff <= std::max(kRoundoffFloor * l1, abs_budget) || depth >= 30) {
    return {halves, diff, l1};
  }
  const Piece l = refine(g, a, m, left, 0.5 * abs_budget, depth + 1);
  const Piece r = refine(g, m, b, right, 0.5 * abs_budget, depth + 1);
  return {l.value + r.value, l.error + r.error, l.l1 + r.l1};
}

Piece integrate_piece(const std::function<double(double)>& g, double a, double b, double abs_budget) {
  return refine(g, a, b, gk31(g, a, b), abs_budget, 0);
}

}  // namespace

double cosine_transform(const std::function<double(double)>& f, double k,
                        const Tolerance& tol, const TailBound& tail) {
  tol.validate();
  if (!std::isfinite(k)) {
    throw DomainError("cosine_transform: k must be finite");
  }
  k = std::abs(k);
  // Half-line integral times 2 / sqrt(2 pi).
  const double scale = 2.0 * kInvSqrtTwoPi;
  const double target = tol.abs_tol / (4.0 * scale);
  const double piece_budget = 1e-6 * target;

  CompensatedSum total;
  double error = 0.0;
  double l1 = 0.0;

  if (k == 0.0) {
    double a = 0.0;
    double b = 1.0;
    for (int piece = 0; piece < 2048; ++piece) {
      const Piece p = integrate_piece(f, a, b, piece_budget);
      total += p.value;
      error += p.error;
      l1 += p.l1;
      if (tail(b) <= target) {
        if (error > target + kRoundoffFloor * l1) {
          throw ConvergenceError("cosine_transform: quadrature error estimate exceeds tolerance");
        }
        return scale * total.value();
      }
      a = b;
      b = b < 64.0 ? 2.0 * b : b + 64.0;
    }
    throw ConvergenceError("cosine_transform: tail bound not reached");
  }

  const auto g = [&f, k](double x) { return f(x) * std::cos(k * x); };
  const double half_period = std::numbers::pi / k;
  auto zero = [half_period](long j) { return (static_cast<double>(j) + 0.5) * half_period; };

  // Short pieces keep the Gauss-Kronrod rule well inside its resolution.
  auto piece_between = [&](double a, double b) {
    const int splits = std::max(1, static_cast<int>(std::ceil((b - a) / 4.0)));
    Piece out{0.0, 0.0, 0.0};
    const double h = (b - a) / splits;
    for (int s = 0; s < splits; ++s) {
      const Piece p = integrate_piece(g, a + s * h, a + (s + 1) * h, piece_budget / splits);
      out.value += p.value;
      out.error += p.error;
      out.l1 += p.l1;
    }
    return out;
  };

  {
    const Piece p = piece_between(0.0, zero(0));
    total += p.value;
    error += p.error;
    l1 += p.l1;
  }
  constexpr long kMaxDirect = 20000;
  long j = 0;
  for (; j < kMaxDirect; ++j) {
    if (tail(zero(j)) <= target) {
      if (error > target + kRoundoffFloor * l1) {
        throw ConvergenceError("cosine_transform: quadrature error estimate exceeds tolerance");
      }
      return scale * total.value();
    }
    const Piece p = piece_between(zero(j), zero(j + 1));
    total += p.value;
    error += p.error;
    l1 += p.l1;
  }

  // Slowly decaying tail: the remaining pieces alternate in sign; sum them
  // with alternating-series acceleration.
  std::vector<double> pieces(40);
  double sign = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const long idx = j + static_cast<long>(i);
    const double v = piece_between(zero(idx), zero(idx + 1)).value;
    if (i == 0) {
      sign = v >= 0.0 ? 1.0 : -1.0;
    }
    const double expected = (i % 2 == 0) ? sign : -sign;
    if (v * expected < 0.0) {
      throw ConvergenceError("cosine_transform: tail pieces do not alternate; cannot accelerate");
    }
    pieces[i] = std::abs(v);
  }
  total += sign * accelerated_alternating_sum(pieces);
  return scale * total.value();
}

double finite_diff_2nd(const std::function<double(double)>& f, double x, double h) {
  if (!(h > 0.0)) {
    throw DomainError("finite_diff_2nd: h must be positive");
  }
  return (f(x - h) - 2.0 * f(x) + f(x + h)) / (h * h);
}

double rising_ratio(double q, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) {
    r *= (q + i) / (i + 1.0);
  }
  return r;
}

}  // namespace numerics
}  // namespace altchain
