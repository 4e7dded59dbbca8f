#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "altchain/numerics.hpp"
#include "altchain/potentials.hpp"

namespace altchain {

/// N-periodic alternating configuration stored as its N positive gaps.
/// Positions are x_0 = 0, x_j = d_1 + ... + d_j; index k carries species 1
/// when k is odd and species 2 when k is even.
class Configuration {
 public:
  /// Throws PreconditionError unless N is even and >= 2, every gap is
  /// finite and positive, and sum(gaps) = N / rho to 1e-9 relative.
  Configuration(std::vector<double> gaps, double rho);

  static Configuration equidistant(int n, double rho);

  int size() const { return static_cast<int>(gaps_.size()); }
  double rho() const { return rho_; }
  double ell() const { return 1.0 / rho_; }
  /// Period length N / rho.
  double period() const { return static_cast<double>(gaps_.size()) / rho_; }
  std::span<const double> gaps() const { return gaps_; }

  /// x_0 .. x_{N-1}.
  std::vector<double> positions() const;
  /// max_n |d_n - ell| / ell
  double distance_to_equidistant() const;

  static int species(long k) { return (k % 2 != 0) ? 1 : 2; }

 private:
  std::vector<double> gaps_;
  double rho_;
};

struct EnergyBreakdown {
  double f12 = 0.0;  // odd separations
  double f11 = 0.0;  // even separations, species 1
  double f22 = 0.0;  // even separations, species 2
};

struct EnergyReport {
  double energy = 0.0;
  /// Number of periodic cells summed explicitly (2M + 1).
  long image_count = 0;
  /// Certified bound on the omitted tail plus a rounding estimate.
  double tail_bound = 0.0;
  EnergyBreakdown breakdown;
  std::string summation_order = "neutral-cells-symmetric";
};

struct GradientReport {
  std::vector<double> gradient;
  /// Bound on truncation plus rounding in every component.
  double error_bound = 0.0;
};

/// Energy evaluator bound to one triple and one period length. Cells
/// |m| <= M are summed explicitly; cells beyond M are summed in +/- pairs,
/// power-law components through their even multipole expansion with
/// Hurwitz-zeta cell sums, other kinds bounded through their decay envelope.
class ChainEnergy {
 public:
  /// Throws PreconditionError for a non-neutral triple with a non-summable
  /// component and ConvergenceError when no M <= the image cap certifies the tail.
  ChainEnergy(const PotentialTriple& triple, int n, double rho, const Tolerance& tol);

  EnergyReport energy(const Configuration& config) const;
  GradientReport gradient(const Configuration& config) const;
  /// E(to) - E(from), computed term by term without cancellation.
  double difference(const Configuration& from, const Configuration& to) const;

  long cells() const { return cells_; }
  int size() const { return n_; }
  double period() const { return period_; }

 private:
  struct PowerTail {
    bool active = false;
    double c = 0.0;
    double p = 0.0;
    bool drop_monopole = false;  // neutral group with p <= 1
    // zeta_tail(p + 2j, M), zeta_tail(p + 2 + 2j, M) for j < kMaxOrder
    std::vector<double> z_even;
    std::vector<double> z_odd;
  };

  void check(const Configuration& config) const;
  const Potential& potential(int type) const;

  PotentialTriple triple_;
  int n_;
  double rho_;
  double period_;
  Tolerance tol_;
  long cells_ = 2;           // M
  double envelope_tail_ = 0.0;  // certified bound for non-power-law kinds
  std::array<PowerTail, 3> power_;  // by pair type 0: f11, 1: f22, 2: f12
};

/// Per-particle energy (1/N) sum_n sum_{k != n} f(x_k - x_n).
EnergyReport energy(const Configuration& config, const PotentialTriple& triple,
                    const Tolerance& tol = {});

/// dE/dd_n with the gaps treated as independent (period = sum of gaps).
std::vector<double> energy_gradient(const Configuration& config, const PotentialTriple& triple,
                                    const Tolerance& tol = {});

}  // namespace altchain
