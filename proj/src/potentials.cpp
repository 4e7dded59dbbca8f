#include "altchain/potentials.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace altchain {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

// (q)_n = q (q + 1) ... (q + n - 1)
double pochhammer(double q, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) {
    r *= q + i;
  }
  return r;
}

// d^order/dr^order of r^{-p} times c, r > 0.
double power_derivative(double c, double p, double r, int order) {
  switch (order) {
    case 0:
      return c * std::pow(r, -p);
    case 1:
      return -c * p * std::pow(r, -p - 1.0);
    case 2:
      return c * p * (p + 1.0) * std::pow(r, -p - 2.0);
    default:
      throw DomainError("potential: derivative order must be 0, 1 or 2");
  }
}

void check_order(int order) {
  if (order < 0 || order > 2) {
    throw DomainError("potential: derivative order must be 0, 1 or 2");
  }
}

}  // namespace

Potential::Potential(Kind kind) : kind_(kind) {
  std::visit(Overloaded{
                 [](const PowerLaw& k) {
                   if (!(k.p > 0.0) || !std::isfinite(k.p) || !std::isfinite(k.c)) {
                     throw DomainError("powerlaw: exponent p must be finite and > 0");
                   }
                 },
                 [](const Gaussian& k) {
                   if (!(k.w > 0.0) || !std::isfinite(k.w) || !std::isfinite(k.c)) {
                     throw DomainError("gaussian: width w must be finite and > 0");
                   }
                 },
                 [](const Morse& k) {
                   if (!(k.stiffness > 0.0) || !(k.r_e > 0.0) || !std::isfinite(k.depth)) {
                     throw DomainError("morse: stiffness a and r_e must be > 0");
                   }
                 },
                 [](const Zero&) {},
             },
             kind_);
}

std::string Potential::kind_name() const {
  return std::visit(Overloaded{
                        [](const PowerLaw&) { return std::string("powerlaw"); },
                        [](const Gaussian&) { return std::string("gaussian"); },
                        [](const Morse&) { return std::string("morse"); },
                        [](const Zero&) { return std::string("zero"); },
                    },
                    kind_);
}

bool Potential::is_zero() const {
  return std::visit(Overloaded{
                        [](const PowerLaw& k) { return k.c == 0.0; },
                        [](const Gaussian& k) { return k.c == 0.0; },
                        [](const Morse& k) { return k.depth == 0.0; },
                        [](const Zero&) { return true; },
                    },
                    kind_);
}

double Potential::eval(double x, int order) const {
  check_order(order);
  return std::visit(
      Overloaded{
          [&](const PowerLaw& k) {
            if (k.c == 0.0) {
              return 0.0;
            }
            if (x == 0.0) {
              throw DomainError("powerlaw: singular at x = 0");
            }
            const double r = std::abs(x);
            const double v = power_derivative(k.c, k.p, r, order);
            return order == 1 ? sign_of(x) * v : v;
          },
          [&](const Gaussian& k) {
            const double w2 = k.w * k.w;
            const double e = k.c * std::exp(-x * x / (2.0 * w2));
            switch (order) {
              case 0:
                return e;
              case 1:
                return -x / w2 * e;
              default:
                return (x * x / (w2 * w2) - 1.0 / w2) * e;
            }
          },
          [&](const Morse& k) {
            const double r = std::abs(x);
            const double a = k.stiffness;
            const double e1 = std::exp(-a * (r - k.r_e));
            const double e2 = e1 * e1;
            switch (order) {
              case 0:
                return k.depth * (e2 - 2.0 * e1);
              case 1:
                if (x == 0.0) {
                  return 0.0;
                }
                return sign_of(x) * k.depth * (-2.0 * a * e2 + 2.0 * a * e1);
              default:
                return k.depth * (4.0 * a * a * e2 - 2.0 * a * a * e1);
            }
          },
          [](const Zero&) { return 0.0; },
      },
      kind_);
}

double Potential::delta(double x, double h) const {
  if (h == 0.0) {
    return 0.0;
  }
  const double y = x + h;
  if ((x < 0.0) != (y < 0.0) || x == 0.0 || y == 0.0) {
    return eval(y) - eval(x);
  }
  // Reduce to r = |x| > 0 with increment dr = |y| - |x|.
  const double r = std::abs(x);
  const double dr = x < 0.0 ? -h : h;
  return std::visit(
      Overloaded{
          [&](const PowerLaw& k) {
            if (k.c == 0.0) {
              return 0.0;
            }
            return k.c * std::pow(r, -k.p) * std::expm1(-k.p * std::log1p(dr / r));
          },
          [&](const Gaussian& k) {
            const double w2 = k.w * k.w;
            return k.c * std::exp(-r * r / (2.0 * w2)) *
                   std::expm1(-(2.0 * r * dr + dr * dr) / (2.0 * w2));
          },
          [&](const Morse& k) {
            const double a = k.stiffness;
            const double e1 = std::exp(-a * (r - k.r_e));
            return k.depth * (e1 * e1 * std::expm1(-2.0 * a * dr) - 2.0 * e1 * std::expm1(-a * dr));
          },
          [](const Zero&) { return 0.0; },
      },
      kind_);
}

std::optional<DecayCertificate> Potential::decay() const {
  return std::visit(
      Overloaded{
          [](const PowerLaw& k) -> std::optional<DecayCertificate> {
            if (k.c == 0.0) {
              return DecayCertificate{0.0, 1.0, 1.0};
            }
            if (k.p <= 1.0) {
              return std::nullopt;
            }
            return DecayCertificate{std::abs(k.c), k.p - 1.0, 1.0};
          },
          [](const Gaussian& k) -> std::optional<DecayCertificate> {
            // max_x x^2 exp(-x^2 / 2w^2) = 2 w^2 / e
            const double C = std::abs(k.c) * 2.0 * k.w * k.w / std::numbers::e;
            return DecayCertificate{C * (1.0 + 1e-12), 1.0, k.w};
          },
          [](const Morse& k) -> std::optional<DecayCertificate> {
            const double a = k.stiffness;
            // max_x x^2 exp(-2a(x - r_e)) at x = 1/a, max_x x^2 exp(-a(x - r_e)) at x = 2/a.
            const double repulsive = std::exp(-2.0 + 2.0 * a * k.r_e) / (a * a);
            const double attractive = 4.0 * std::exp(-2.0 + a * k.r_e) / (a * a);
            const double C = std::abs(k.depth) * (repulsive + 2.0 * attractive);
            return DecayCertificate{C * (1.0 + 1e-12), 1.0, k.r_e};
          },
          [](const Zero&) -> std::optional<DecayCertificate> {
            return DecayCertificate{0.0, 1.0, 1.0};
          },
      },
      kind_);
}

bool Potential::absolutely_integrable() const {
  return std::visit(Overloaded{
                        [](const PowerLaw& k) { return k.c == 0.0; },
                        [](const Gaussian&) { return true; },
                        [](const Morse&) { return true; },
                        [](const Zero&) { return true; },
                    },
                    kind_);
}

double Potential::envelope(double r, int order) const {
  check_order(order);
  return std::visit(
      Overloaded{
          [&](const PowerLaw& k) {
            if (k.c == 0.0) {
              return 0.0;
            }
            return std::abs(k.c) * pochhammer(k.p, order) * std::pow(r, -k.p - order);
          },
          [&](const Gaussian& k) {
            const double w2 = k.w * k.w;
            return std::abs(k.c) * std::pow(r / w2, order) * std::exp(-r * r / (2.0 * w2));
          },
          [&](const Morse& k) {
            const double a = k.stiffness;
            const double e1 = std::exp(-a * (r - k.r_e));
            return std::abs(k.depth) *
                   (std::pow(2.0 * a, order) * e1 * e1 + 2.0 * std::pow(a, order) * e1);
          },
          [](const Zero&) { return 0.0; },
      },
      kind_);
}

double Potential::envelope_integral(double r, int order) const {
  check_order(order);
  return std::visit(
      Overloaded{
          [&](const PowerLaw& k) {
            if (k.c == 0.0) {
              return 0.0;
            }
            const double s = k.p + order;
            if (s <= 1.0) {
              return kInf;
            }
            return envelope(r, order) * r / (s - 1.0);
          },
          [&](const Gaussian& k) {
            const double w = k.w;
            const double w2 = w * w;
            const double e = std::exp(-r * r / (2.0 * w2));
            const double gauss_tail =
                w * std::sqrt(std::numbers::pi / 2.0) * std::erfc(r / (w * std::numbers::sqrt2));
            switch (order) {
              case 0:
                return std::abs(k.c) * gauss_tail;
              case 1:
                return std::abs(k.c) * e;
              default:
                return std::abs(k.c) * (r * e + gauss_tail) / w2;
            }
          },
          [&](const Morse& k) {
            const double a = k.stiffness;
            const double e1 = std::exp(-a * (r - k.r_e));
            return std::abs(k.depth) *
                   (std::pow(2.0 * a, order - 1) * e1 * e1 + 2.0 * std::pow(a, order - 1) * e1);
          },
          [](const Zero&) { return 0.0; },
      },
      kind_);
}

double Potential::monotone_from(int order) const {
  check_order(order);
  return std::visit(Overloaded{
                        [](const PowerLaw&) { return 0.0; },
                        [](const Gaussian& k) { return k.w * std::numbers::sqrt2; },
                        [](const Morse&) { return 0.0; },
                        [](const Zero&) { return 0.0; },
                    },
                    kind_);
}

Potential Potential::scaled(double factor) const {
  return std::visit(
      Overloaded{
          [&](const PowerLaw& k) { return Potential::power_law(factor * k.c, k.p); },
          [&](const Gaussian& k) { return Potential::gaussian(factor * k.c, k.w); },
          [&](const Morse& k) { return Potential::morse(factor * k.depth, k.stiffness, k.r_e); },
          [](const Zero&) { return Potential::zero(); },
      },
      kind_);
}

PotentialTriple riesz_triple(double p) {
  if (!(p > 0.0)) {
    throw DomainError("riesz_triple: requires p > 0");
  }
  return {Potential::power_law(-1.0, p), Potential::power_law(-1.0, p),
          Potential::power_law(1.0, p)};
}

PotentialTriple powerlaw_triple(double p, double m) {
  if (!(p > 1.0)) {
    throw DomainError("powerlaw_triple: requires p > 1");
  }
  if (!(m > 0.0)) {
    throw DomainError("powerlaw_triple: requires m > 0");
  }
  return {Potential::power_law(-1.0, p), Potential::power_law(-m * m, p),
          Potential::power_law(m, p)};
}

PotentialTriple zero_triple() { return {Potential::zero(), Potential::zero(), Potential::zero()}; }

PotentialTriple scale_triple(const PotentialTriple& triple, double factor) {
  return {triple.f11.scaled(factor), triple.f22.scaled(factor), triple.f12.scaled(factor)};
}

PotentialTriple flip_sign(const PotentialTriple& triple) { return scale_triple(triple, -1.0); }

double ConvexTerm::eval(double r, int order) const {
  check_order(order);
  if (coefficient == 0.0) {
    return 0.0;
  }
  if (shape == Shape::Power) {
    return power_derivative(coefficient, parameter, r, order);
  }
  const double e = coefficient * std::exp(-parameter * r);
  return order == 1 ? -parameter * e : std::pow(parameter, order) * e;
}

double ConvexPart::eval(double r, int order) const {
  double v = 0.0;
  for (const auto& t : terms) {
    v += t.eval(r, order);
  }
  return v;
}

bool ConvexPart::is_zero() const {
  for (const auto& t : terms) {
    if (t.coefficient != 0.0) {
      return false;
    }
  }
  return true;
}

bool ConvexPart::strongly_tempered() const {
  for (const auto& t : terms) {
    if (t.coefficient != 0.0 && t.shape == ConvexTerm::Shape::Power && t.parameter <= 1.0) {
      return false;
    }
  }
  return true;
}

PairSplit decompose(const Potential& potential) {
  return std::visit(
      Overloaded{
          [](const PowerLaw& k) {
            PairSplit split;
            const ConvexTerm term{ConvexTerm::Shape::Power, std::abs(k.c), k.p};
            if (k.c > 0.0) {
              split.plus.terms.push_back(term);
            } else if (k.c < 0.0) {
              split.minus.terms.push_back(term);
            }
            return split;
          },
          [](const Gaussian&) -> PairSplit {
            throw DecompositionError("gaussian: no registered convex decomposition");
          },
          [](const Morse& k) {
            // D e^{2a r_e} e^{-2a r} - 2 D e^{a r_e} e^{-a r}; a negative depth swaps the roles.
            const double a = k.stiffness;
            const ConvexTerm repulsive{ConvexTerm::Shape::Exponential,
                                       std::abs(k.depth) * std::exp(2.0 * a * k.r_e), 2.0 * a};
            const ConvexTerm attractive{ConvexTerm::Shape::Exponential,
                                        2.0 * std::abs(k.depth) * std::exp(a * k.r_e), a};
            PairSplit split;
            if (k.depth > 0.0) {
              split.plus.terms.push_back(repulsive);
              split.minus.terms.push_back(attractive);
            } else if (k.depth < 0.0) {
              split.plus.terms.push_back(attractive);
              split.minus.terms.push_back(repulsive);
            }
            return split;
          },
          [](const Zero&) { return PairSplit{}; },
      },
      potential.kind());
}

ConvexDecomposition decompose(const PotentialTriple& triple) {
  return {decompose(triple.f11), decompose(triple.f22), decompose(triple.f12)};
}

}  // namespace altchain
