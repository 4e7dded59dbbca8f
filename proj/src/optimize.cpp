#include "altchain/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <thread>

namespace altchain {
namespace {

std::vector<double> project(const std::vector<double>& g) {
  double mean = 0.0;
  for (double v : g) {
    mean += v;
  }
  mean /= static_cast<double>(g.size());
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    out[i] = g[i] - mean;
  }
  return out;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) {
    m = std::max(m, std::abs(x));
  }
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * b[i];
  }
  return s;
}

// Uniform on [-1, 1] from the top 53 bits; identical on every platform.
double symmetric_uniform(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

}  // namespace

MinimizeResult minimize(const Configuration& start, const PotentialTriple& triple,
                        const Tolerance& tol) {
  tol.validate();
  Tolerance energy_tol = tol;
  energy_tol.abs_tol = std::min(tol.abs_tol, 1e-12);
  const ChainEnergy model(triple, start.size(), start.rho(), energy_tol);

  const double ell = start.ell();
  const double min_gap = 1e-9 * ell;
  constexpr double kArmijo = 1e-4;

  MinimizeResult result{.start_config = start, .final_config = start, .energy_trace = {}, .message = {}};
  result.start_energy = model.energy(start).energy;
  result.energy_trace.push_back(result.start_energy);

  Configuration current = start;
  double energy = result.start_energy;
  GradientReport grad = model.gradient(current);
  std::vector<double> pg = project(grad.gradient);
  double step = 0.0;
  std::vector<double> prev_pg;
  std::vector<double> prev_gaps;

  int iter = 0;
  for (; iter < tol.max_iter; ++iter) {
    const double norm = inf_norm(pg);
    result.gradient_norm = norm;
    if (norm <= std::max(tol.abs_tol, grad.error_bound)) {
      result.converged = true;
      break;
    }

    // Barzilai-Borwein trial step, capped so no gap moves by more than ell / 4.
    const std::vector<double> gaps(current.gaps().begin(), current.gaps().end());
    if (!prev_pg.empty()) {
      std::vector<double> s(gaps.size());
      std::vector<double> y(gaps.size());
      for (std::size_t i = 0; i < gaps.size(); ++i) {
        s[i] = gaps[i] - prev_gaps[i];
        y[i] = pg[i] - prev_pg[i];
      }
      const double sy = dot(s, y);
      step = sy > 0.0 ? dot(s, s) / sy : 2.0 * step;
    } else {
      step = 0.05 * ell / norm;
    }
    step = std::min(step, 0.25 * ell / norm);

    const double decrease_rate = dot(pg, pg);
    std::optional<Configuration> accepted;
    double accepted_delta = 0.0;
    while (step * norm >= 1e-16 * ell) {
      std::vector<double> trial(gaps.size());
      bool feasible = true;
      for (std::size_t i = 0; i < gaps.size(); ++i) {
        trial[i] = gaps[i] - step * pg[i];
        feasible = feasible && trial[i] >= min_gap;
      }
      if (feasible) {
        Configuration candidate(std::move(trial), current.rho());
        const double delta = model.difference(current, candidate);
        if (delta <= -kArmijo * step * decrease_rate) {
          accepted = std::move(candidate);
          accepted_delta = delta;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.message = "line search failed: no admissible step above 1e-16 * ell";
      break;
    }

    prev_gaps = gaps;
    prev_pg = pg;
    current = std::move(*accepted);
    energy += accepted_delta;
    result.energy_trace.push_back(energy);
    grad = model.gradient(current);
    pg = project(grad.gradient);
  }
  if (!result.converged && result.message.empty()) {
    result.gradient_norm = inf_norm(pg);
    if (result.gradient_norm <= std::max(tol.abs_tol, grad.error_bound)) {
      result.converged = true;
    } else {
      result.message = "max_iter reached";
    }
  }

  result.iterations = iter;
  result.final_energy = model.energy(current).energy;
  result.distance_to_equidistant = current.distance_to_equidistant();
  result.final_config = std::move(current);
  return result;
}

std::vector<Configuration> random_starts(const BasinScanOptions& options) {
  if (options.trials < 1) {
    throw PreconditionError("basin_scan: trials must be >= 1");
  }
  if (!(options.perturbation >= 0.0 && options.perturbation < 1.0)) {
    throw PreconditionError("basin_scan: perturbation must lie in [0, 1)");
  }
  if (options.n < 2 || options.n % 2 != 0) {
    throw PreconditionError("basin_scan: N must be even and >= 2");
  }
  if (!(options.rho > 0.0)) {
    throw PreconditionError("basin_scan: rho must be > 0");
  }
  std::mt19937_64 rng(options.seed);
  const double ell = 1.0 / options.rho;
  const auto n = static_cast<std::size_t>(options.n);
  std::vector<Configuration> starts;
  starts.reserve(static_cast<std::size_t>(options.trials));
  for (int t = 0; t < options.trials; ++t) {
    std::vector<double> gaps(n);
    double sum = 0.0;
    for (auto& d : gaps) {
      d = ell * (1.0 + options.perturbation * symmetric_uniform(rng));
      sum += d;
    }
    const double rescale = static_cast<double>(n) * ell / sum;
    for (auto& d : gaps) {
      d *= rescale;
    }
    starts.emplace_back(std::move(gaps), options.rho);
  }
  return starts;
}

std::vector<MinimizeResult> basin_scan(const PotentialTriple& triple, const BasinScanOptions& options,
                                       const Tolerance& tol) {
  const std::vector<Configuration> starts = random_starts(options);
  std::vector<std::optional<MinimizeResult>> slots(starts.size());

  unsigned workers = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  workers = std::clamp(workers, 1u, static_cast<unsigned>(starts.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i = next++; i < starts.size(); i = next++) {
      try {
        slots[i] = minimize(starts[i], triple, tol);
      } catch (...) {
        if (!failed.exchange(true)) {
          failure = std::current_exception();
        }
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back(work);
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  std::vector<MinimizeResult> results;
  results.reserve(slots.size());
  for (auto& slot : slots) {
    results.push_back(std::move(*slot));
  }
  return results;
}

}  // namespace altchain
