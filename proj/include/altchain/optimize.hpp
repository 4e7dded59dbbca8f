#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "altchain/chain.hpp"

namespace altchain {

struct MinimizeResult {
  Configuration start_config;
  Configuration final_config;
  double start_energy = 0.0;
  double final_energy = 0.0;
  int iterations = 0;
  bool converged = false;
  /// max_n |d_n - ell| / ell of the final configuration.
  double distance_to_equidistant = 0.0;
  /// Infinity norm of the projected gradient at the final iterate.
  double gradient_norm = 0.0;
  /// Energy after every accepted step, starting with start_energy.
  std::vector<double> energy_trace;
  /// Empty on success; otherwise why the run stopped.
  std::string message;
};

/// Projected gradient descent over {d > 0, sum d = N ell}. Each step moves
/// along the mean-free negative gradient, halving the trial step until every
/// gap stays >= 1e-9 ell and the Armijo condition holds. Converged when the
/// projected gradient is below max(tol.abs_tol, its own rounding bound).
/// A failed line search ends the run with converged = false and a message.
MinimizeResult minimize(const Configuration& start, const PotentialTriple& triple,
                        const Tolerance& tol);

struct BasinScanOptions {
  int n = 8;
  double rho = 1.0;
  int trials = 20;
  std::uint64_t seed = 0;
  /// Relative gap perturbation in [0, 1).
  double perturbation = 0.3;
  /// 0 = hardware concurrency.
  unsigned threads = 0;
};

/// Starting gaps ell * (1 + perturbation * u_n), u_n uniform on [-1, 1],
/// rescaled to sum N ell. Deterministic in the seed.
std::vector<Configuration> random_starts(const BasinScanOptions& options);

/// Runs minimize from every start in random_starts; results follow trial order.
std::vector<MinimizeResult> basin_scan(const PotentialTriple& triple, const BasinScanOptions& options,
                                       const Tolerance& tol);

}  // namespace altchain
