#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "altchain/errors.hpp"

namespace altchain {

/// c |x|^{-p}
struct PowerLaw {
  double c = 1.0;
  double p = 1.0;
};

/// c exp(-x^2 / (2 w^2))
struct Gaussian {
  double c = 1.0;
  double w = 1.0;
};

/// depth * (exp(-2 a (|x| - r_e)) - 2 exp(-a (|x| - r_e)))
struct Morse {
  double depth = 1.0;
  double stiffness = 1.0;
  double r_e = 1.0;
};

struct Zero {};

/// Constants (C, eta, r0) with |f(x)| <= C |x|^{-1-eta} for |x| > r0.
struct DecayCertificate {
  double C = 0.0;
  double eta = 1.0;
  double r0 = 1.0;
};

/// Mirror-symmetric pair potential with closed-form derivatives.
class Potential {
 public:
  using Kind = std::variant<PowerLaw, Gaussian, Morse, Zero>;

  Potential() : kind_(Zero{}) {}
  /// Validates parameters; throws DomainError on non-positive exponents or widths.
  explicit Potential(Kind kind);

  static Potential power_law(double c, double p) { return Potential(PowerLaw{c, p}); }
  static Potential gaussian(double c, double w) { return Potential(Gaussian{c, w}); }
  static Potential morse(double depth, double stiffness, double r_e) {
    return Potential(Morse{depth, stiffness, r_e});
  }
  static Potential zero() { return Potential(Zero{}); }

  const Kind& kind() const { return kind_; }
  std::string kind_name() const;

  /// f, f' or f'' at x. PowerLaw throws DomainError at x = 0.
  double eval(double x, int order = 0) const;
  double operator()(double x) const { return eval(x, 0); }

  /// f(x + h) - f(x) without cancellation, for x and x + h of equal sign.
  double delta(double x, double h) const;

  /// Certificate of strong temperedness, or nullopt when none exists (PowerLaw, p <= 1).
  std::optional<DecayCertificate> decay() const;

  /// True when int_R |f| is finite.
  bool absolutely_integrable() const;

  /// Non-increasing bound env(r) >= |f^{(order)}(y)| for all y >= r >= monotone_from(order).
  double envelope(double r, int order) const;
  /// int_r^inf envelope(t, order) dt (may be +inf).
  double envelope_integral(double r, int order) const;
  double monotone_from(int order) const;

  bool is_zero() const;
  Potential scaled(double factor) const;

 private:
  Kind kind_;
};

/// (f11, f22, f12). Species 1 sits on odd indices, species 2 on even ones.
struct PotentialTriple {
  Potential f11;
  Potential f22;
  Potential f12;

  const Potential& between(int species_a, int species_b) const {
    if (species_a != species_b) {
      return f12;
    }
    return species_a == 1 ? f11 : f22;
  }
};

/// f12 = |x|^-p, f11 = f22 = -|x|^-p.
PotentialTriple riesz_triple(double p);

/// f12 = m |x|^-p, f11 = -|x|^-p, f22 = -m^2 |x|^-p.
PotentialTriple powerlaw_triple(double p, double m);

PotentialTriple zero_triple();

/// Multiplies every component by -1 (the opposite sign convention for the
/// dipole discussion, where the equidistant chain is a maximum).
PotentialTriple flip_sign(const PotentialTriple& triple);

PotentialTriple scale_triple(const PotentialTriple& triple, double factor);

/// One convex, non-increasing term on (0, inf): coefficient * r^{-exponent}
/// or coefficient * exp(-rate * r), coefficient >= 0.
struct ConvexTerm {
  enum class Shape { Power, Exponential };
  Shape shape = Shape::Power;
  double coefficient = 0.0;
  double parameter = 1.0;  // exponent for Power, rate for Exponential

  double eval(double r, int order = 0) const;
};

/// Finite sum of convex terms.
struct ConvexPart {
  std::vector<ConvexTerm> terms;

  double eval(double r, int order = 0) const;
  bool is_zero() const;
  bool strongly_tempered() const;
};

struct PairSplit {
  ConvexPart plus;
  ConvexPart minus;
};

/// f_ab(x) = plus_ab(|x|) - minus_ab(|x|) for each species pair.
struct ConvexDecomposition {
  PairSplit s11;
  PairSplit s22;
  PairSplit s12;
};

/// Registered canonical split of one potential; throws DecompositionError for Gaussian.
PairSplit decompose(const Potential& potential);
ConvexDecomposition decompose(const PotentialTriple& triple);

}  // namespace altchain
